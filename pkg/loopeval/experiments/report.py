"""CSV and JSON output of experiment reports

Each file is written to a temporary sibling first and renamed into place once
complete, so an interrupted run never leaves a truncated report behind.
"""

import csv
import json
import logging
import os
import os.path
import tempfile

import numpy as np

from ..utils.text import format_float

_logger = logging.getLogger(__name__)

TMP_SUFFIX = ".tmp"


class OutputExistsError(Exception):
    def __init__(self, paths):
        self.paths = tuple(paths)
        Exception.__init__(
            self, "refusing to overwrite {0} (use --force)".format(", ".join(self.paths))
        )


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


class AtomicWriter(object):
    """A text file that only appears at ``path`` when closed without error"""

    def __init__(self, path):
        self._path = path
        directory = os.path.dirname(os.path.abspath(path))
        self._tmpf = tempfile.NamedTemporaryFile(
            "w",
            dir=directory,
            delete=False,
            suffix=TMP_SUFFIX,
            encoding="utf-8",
            newline="",
        )

    @property
    def file(self):
        return self._tmpf

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        if exc_type is None:
            self.finalize()
        else:
            self.abort()

    def abort(self):
        if self._tmpf:
            self._tmpf.close()
            os.remove(self._tmpf.name)
            self._tmpf = None

    def finalize(self):
        tmpf = self._tmpf
        self._tmpf = None
        tmpf.close()
        try:
            os.replace(tmpf.name, self._path)
        except OSError:
            os.remove(tmpf.name)
            raise


def write_csv(path, header, rows):
    with AtomicWriter(path) as w:
        dump_csv(w.file, header, rows)
    _logger.info("wrote %s", path)


def dump_csv(f, header, rows):
    writer = csv.writer(f, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])


def write_json(path, doc):
    with AtomicWriter(path) as w:
        json.dump(doc, w.file, indent=2, sort_keys=True)
        w.file.write("\n")
    _logger.info("wrote %s", path)


def report_paths(report, out_dir):
    names = list(report.tables) + ["meta.json"]
    return [os.path.join(out_dir, name) for name in names]


def check_outputs(paths, force=False):
    existing = [p for p in paths if os.path.exists(p)]
    if existing and not force:
        raise OutputExistsError(existing)


def write_report(report, out_dir, force=False):
    """Write every table of ``report`` and meta.json into ``out_dir``"""
    paths = report_paths(report, out_dir)
    check_outputs(paths, force)
    if not os.path.isdir(out_dir):
        os.makedirs(out_dir)
    for name, table in report.tables.items():
        write_csv(os.path.join(out_dir, name), table.header, table.rows)
    write_json(os.path.join(out_dir, "meta.json"), report.meta())
    return paths
