"""MRP definition files (JSON)

{"num_states": 2,
 "transitions": [[0.5, 0.5], [1.0, 0.0]],
 "rewards": [{"type": "deterministic", "mean": 0.0},
             {"type": "bernoulli", "p": 0.5, "magnitude": 1.0}],
 "r_max": 1.0}
"""

import json
import logging
import numbers

import numpy as np

from .mrp import MRP, Bernoulli, Deterministic, MRPError, check_valid

_logger = logging.getLogger(__name__)

_KEYS = frozenset(("num_states", "transitions", "rewards", "r_max"))


class MRPFormatError(MRPError):
    pass


def _number(value, what):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise MRPFormatError("{0} must be a number, got {1!r}".format(what, value))
    return float(value)


def _reward_from_dict(d, index):
    if not isinstance(d, dict):
        raise MRPFormatError("rewards[{0}] must be an object".format(index))
    kind = d.get("type")
    what = "rewards[{0}]".format(index)
    if kind == Deterministic.kind:
        if set(d) != {"type", "mean"}:
            raise MRPFormatError("{0}: deterministic takes exactly 'mean'".format(what))
        return Deterministic(_number(d["mean"], what + ".mean"))
    elif kind == Bernoulli.kind:
        if set(d) != {"type", "p", "magnitude"}:
            raise MRPFormatError(
                "{0}: bernoulli takes exactly 'p' and 'magnitude'".format(what)
            )
        return Bernoulli(
            _number(d["p"], what + ".p"), _number(d["magnitude"], what + ".magnitude")
        )
    raise MRPFormatError("{0}: unknown reward type {1!r}".format(what, kind))


def mrp_from_dict(d):
    if not isinstance(d, dict):
        raise MRPFormatError("an MRP document must be a JSON object")
    missing = _KEYS - set(d)
    if missing:
        raise MRPFormatError("missing keys: {0}".format(", ".join(sorted(missing))))
    extra = set(d) - _KEYS
    if extra:
        raise MRPFormatError("unknown keys: {0}".format(", ".join(sorted(extra))))

    num_states = d["num_states"]
    if isinstance(num_states, bool) or not isinstance(num_states, int) or num_states < 0:
        raise MRPFormatError("num_states must be a non-negative integer")
    rows = d["transitions"]
    if not isinstance(rows, list) or len(rows) != num_states:
        raise MRPFormatError("transitions must be a list of num_states rows")
    matrix = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != num_states:
            raise MRPFormatError("transitions[{0}] must have num_states entries".format(i))
        matrix.append([_number(x, "transitions[{0}]".format(i)) for x in row])
    rewards = d["rewards"]
    if not isinstance(rewards, list) or len(rewards) != num_states:
        raise MRPFormatError("rewards must be a list of num_states reward specs")
    rewards = [_reward_from_dict(r, i) for (i, r) in enumerate(rewards)]

    matrix = np.array(matrix, dtype=np.float64).reshape(num_states, num_states)
    try:
        return MRP(matrix, rewards, _number(d["r_max"], "r_max"))
    except MRPError as e:
        raise MRPFormatError(str(e))


def mrp_to_dict(mrp):
    return {
        "num_states": mrp.num_states,
        "transitions": mrp.transitions.tolist(),
        "rewards": [r.to_dict() for r in mrp.rewards],
        "r_max": mrp.r_max,
    }


def load_mrp(f, check=True):
    """Read an MRP from a file object; refuse invalid ones when ``check``"""
    try:
        doc = json.load(f)
    except ValueError as e:
        raise MRPFormatError("not valid JSON: {0}".format(e))
    mrp = mrp_from_dict(doc)
    if check:
        check_valid(mrp)
    return mrp


def read_mrp(path, check=True):
    with open(path, "r", encoding="utf-8") as f:
        mrp = load_mrp(f, check=check)
    _logger.debug("loaded %r from %s", mrp, path)
    return mrp


def dump_mrp(mrp, f):
    json.dump(mrp_to_dict(mrp), f, indent=2, sort_keys=True)
    f.write("\n")
