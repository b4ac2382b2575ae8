"""Text formatting helpers shared by the reports and the command line"""

import math


def format_float(x):
    """Shortest decimal string that round-trips to the same 64-bit float"""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def format_rounded(x, digits=12):
    """Like format_float after rounding to ``digits`` significant digits"""
    x = float(x)
    if not math.isfinite(x):
        return format_float(x)
    return repr(float("{0:.{1}g}".format(x, digits)))


def parse_list(text, conv=float):
    """Parse a comma-separated list such as ``"10,100,1e3"``"""
    items = [s.strip() for s in text.split(",")]
    return [conv(s) for s in items if s]


def parse_int(text):
    """Parse an integer that may be written in float notation (``1e5``)"""
    try:
        return int(text)
    except ValueError:
        x = float(text)
        if not x.is_integer():
            raise ValueError("not an integer: {0}".format(text))
        return int(x)


def state_label(index):
    # states are printed 1-based as in the literature, s1..sS
    return u"s{0}".format(index + 1)
