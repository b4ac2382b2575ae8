"""Global configurations"""

import logging
import os
import os.path
import sys

import configparser

from ..utils.text import parse_int, parse_list

_logger = logging.getLogger(__name__)

ENV_VAR = "LOOPEVAL_CONFIG"

_DEFAULTS = {
    "defaults": {
        "gamma": "0.9",
        "delta": "0.05",
        "seed": "0",
        "steps": "100000",
        "runs": "200",
        "jobs": "1",
    },
    "analyze": {
        "visits": "10,100,1000,10000",
        "horizons": "10000,100000,1000000",
    },
    "experiment": {
        "first_checkpoint": "100",
        "checkpoints_per_decade": "4",
        "rate_counts_min": "100",
        "rate_counts_max": "10000",
    },
}

__config = None


class ConfigError(Exception):
    pass


def get_config():
    global __config
    if not __config:
        __config = __Config()
    return __config


def reset_config():
    """Forget the loaded configuration; the next get_config() starts over"""
    global __config
    __config = None


class __Config(object):
    def __init__(self):
        self._parser = self._fresh_parser()
        self.path = None

    @staticmethod
    def _fresh_parser():
        parser = configparser.ConfigParser(interpolation=None)
        parser.read_dict(_DEFAULTS)
        return parser

    def __bool__(self):
        return True

    def __str__(self):
        return "".join(
            [
                "Config(",
                ", ".join(
                    "{0}.{1}: {2}".format(s, k, v)
                    for s in self._parser.sections()
                    for (k, v) in self._parser.items(s)
                ),
                ")",
            ]
        )

    @property
    def _config_dir(self):
        # Windows
        if sys.platform.startswith("win"):
            if "LOCALAPPDATA" in os.environ:
                return os.path.join(os.environ["LOCALAPPDATA"], "LoopEval")
            else:
                return os.path.join(os.environ.get("APPDATA", "~"), "LoopEval")
        # Mac OS X
        elif sys.platform.startswith("darwin"):
            return os.path.expanduser("~/Library/Application Support/LoopEval")
        # Linux
        else:
            base = os.path.join(os.path.expanduser("~"), ".config")
            # XDG
            try:
                import xdg.BaseDirectory

                base = xdg.BaseDirectory.xdg_config_home
            except ImportError:
                if "XDG_CONFIG_HOME" in os.environ:
                    base = os.environ["XDG_CONFIG_HOME"]
            return os.path.join(base, "loopeval")

    @property
    def default_path(self):
        return os.path.join(self._config_dir, "config.ini")

    def load(self, path=None):
        """Read ``path``, else $LOOPEVAL_CONFIG, else the per-user file

        An explicitly named file must exist; the per-user file is optional.
        """
        self._parser = self._fresh_parser()
        self.path = None
        explicit = path or os.environ.get(ENV_VAR) or None
        path = explicit or self.default_path
        if not os.path.exists(path):
            if explicit:
                raise ConfigError("config file not found: {0}".format(path))
            _logger.debug("no config file at %s, using built-in defaults", path)
            return

        loaded = configparser.ConfigParser(interpolation=None)
        try:
            with open(path, "r", encoding="utf-8") as f:
                loaded.read_file(f)
        except (configparser.Error, OSError, UnicodeDecodeError) as e:
            raise ConfigError("cannot read config file {0}: {1}".format(path, e))

        for section in loaded.sections():
            if section not in _DEFAULTS:
                _logger.warning("%s: ignoring unknown section [%s]", path, section)
                continue
            for key, value in loaded.items(section):
                if key not in _DEFAULTS[section]:
                    _logger.warning("%s: ignoring unknown key %s in [%s]", path, key, section)
                    continue
                self._parser.set(section, key, value)
        self.path = path
        _logger.debug("loaded config from %s", path)

    def _convert(self, section, key, conv):
        text = self._parser.get(section, key)
        try:
            return conv(text)
        except ValueError:
            raise ConfigError("bad value for {0} in [{1}]: {2!r}".format(key, section, text))

    def get_float(self, section, key):
        return self._convert(section, key, float)

    def get_int(self, section, key):
        return self._convert(section, key, parse_int)

    def get_list(self, section, key, conv=float):
        return self._convert(section, key, lambda text: parse_list(text, conv))
