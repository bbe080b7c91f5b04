import collections.abc
import copy
import os
import sys
from pathlib import Path

import yaml

from .custom_exceptions import ConfigError
from .log import make_log

log = make_log("config")

DEFAULTS_FILE = Path(__file__).parent / "config.yaml.defaults"
SECTIONS = ("emitter", "cavity", "detection", "scheme")


def recursive_update(d, u):
    # Based on https://stackoverflow.com/a/3233356/214686
    for k, v in u.items():
        if isinstance(v, collections.abc.Mapping):
            r = recursive_update(d.get(k, {}) or {}, v)
            d[k] = r
        else:
            d[k] = u[k]
    return d


def check_keys(template, update, prefix=""):
    """Raise `ConfigError` for any key of `update` absent from `template`.

    Parameters
    ----------
    template : Mapping
        Tree of known keys (the shipped defaults).
    update : Mapping
        Tree being merged on top of `template`.
    prefix : str
        Dotted path of `update` inside the full tree, for error messages.
    """
    if not isinstance(update, collections.abc.Mapping):
        raise ConfigError("expected a mapping", path=prefix or "<root>")
    for key, value in update.items():
        path = f"{prefix}.{key}" if prefix else str(key)
        if key not in template:
            raise ConfigError("unknown configuration key", path=path)
        if isinstance(template[key], collections.abc.Mapping):
            check_keys(template[key], value, prefix=path)


def parse_value(text):
    """Interpret the right-hand side of a `--set key=value` override."""
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"could not parse value [{text}]: {e}")


class Config(dict):
    """To simplify access, the configuration allows fetching nested
    keys separated by a period `.`, e.g.:

    >>> cfg['emitter.gamma_star']

    is equivalent to

    >>> cfg['emitter']['gamma_star']

    Assignment works the same way, but only for keys that already exist.

    """

    def __init__(self, data=None):
        dict.__init__(self)
        if data is not None:
            recursive_update(self, copy.deepcopy(dict(data)))

    def update_from(self, filename):
        """Update configuration from a YAML or JSON file"""
        with open(filename) as f:
            more_cfg = yaml.safe_load(f) or {}
        check_keys(self, more_cfg)
        recursive_update(self, more_cfg)

    def __getitem__(self, key):
        keys = key.split(".")

        val = self
        for key in keys:
            if isinstance(val, dict):
                val = dict.__getitem__(val, key)
            else:
                raise KeyError(key)

        return val

    def __setitem__(self, key, value):
        if "." not in key:
            dict.__setitem__(self, key, value)
            return

        *parents, leaf = key.split(".")
        node = self
        for part in parents:
            node = dict.__getitem__(node, part)
            if not isinstance(node, dict):
                raise KeyError(key)
        if leaf not in node:
            raise KeyError(key)
        node[leaf] = value

    def __contains__(self, key):
        try:
            self.__getitem__(key)
        except KeyError:
            return False
        return True

    def get(self, key, default=None, /):
        try:
            return self.__getitem__(key)
        except KeyError:
            return default

    def copy(self):
        return Config(self)

    def show(self, stream=None):
        """Print configuration"""
        stream = stream or sys.stderr
        print(file=stream)
        print("=" * 78, file=stream)
        print("Configuration", file=stream)
        for key in self:
            print("-" * 78, file=stream)
            print(key, file=stream)

            if isinstance(self[key], dict):
                for key, val in self[key].items():
                    print("  ", key.ljust(30), val, file=stream)

        print("=" * 78, file=stream)


def resolve_path(cfg, key):
    """Map a dotted or bare parameter name onto its full dotted path.

    Bare names (``gamma_star``, ``cooperativity``) are looked up in each
    section and must match exactly one of them.
    """
    if "." in key:
        if key in cfg and not isinstance(cfg[key], dict):
            return key
        raise ConfigError("unknown configuration key", path=key)

    matches = [
        f"{section}.{key}"
        for section in SECTIONS
        if isinstance(cfg.get(section), dict) and key in cfg[section]
    ]
    if len(matches) != 1:
        reason = "unknown configuration key" if not matches else "ambiguous key"
        raise ConfigError(reason, path=key)
    return matches[0]


def apply_overrides(cfg, overrides):
    """Apply `key=value` strings (or `(key, value)` pairs) in order."""
    for override in overrides:
        if isinstance(override, str):
            key, sep, text = override.partition("=")
            if not sep:
                raise ConfigError(f"override [{override}] is not of the form key=value")
            value = parse_value(text.strip())
        else:
            key, value = override
        cfg[resolve_path(cfg, key.strip())] = value
    return cfg


def load_defaults():
    """Return the shipped parameter tree, unit table and presets."""
    with open(DEFAULTS_FILE) as f:
        shipped = yaml.safe_load(f)
    return Config(shipped["defaults"]), dict(shipped["units"]), shipped["presets"]


def load_config(source=None, overrides=()):
    """Build a parameter tree from a preset name or a config file.

    The shipped defaults are always loaded first; the preset section (or
    the user file) and then the overrides are layered on top.

    Parameters
    ----------
    source : str, optional
        Preset name (``scenario1``, ``scenario2``) or path to a JSON/YAML
        file.  Defaults to ``scenario1``.
    overrides : sequence of str or (str, value)
        Applied after the file values.

    Returns
    -------
    cfg : Config
    units : dict
        Per-field angular-frequency table.
    name : str
        Preset name, or the file stem for user files.
    """
    cfg, units, presets = load_defaults()
    source = source or "scenario1"

    if source in presets:
        check_keys(cfg, presets[source])
        recursive_update(cfg, copy.deepcopy(presets[source]))
        name = source
    elif os.path.isfile(source):
        try:
            cfg.update_from(source)
        except yaml.YAMLError as e:
            raise ConfigError(f"could not parse config file: {e}", path=source)
        name = Path(source).stem
        log(f"Loaded configuration from {source}")
    else:
        raise ConfigError(
            f"neither a preset ({', '.join(presets)}) nor an existing file",
            path=source,
        )

    apply_overrides(cfg, overrides)
    return cfg, units, name
