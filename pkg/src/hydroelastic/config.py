"""Flat sectioned key-value configuration (INI) with exact float round-trip.

Every numeric value is parsed as binary64; the effective configuration
(defaults, file values, then ``--set section.key=value`` overrides) is echoed
back with ``repr`` floats, so re-parsing the echo reproduces the same run
bit for bit.  Unknown sections or keys are rejected with a diagnostic naming
them.
"""

import configparser
from pathlib import Path

from . import geometry, stepping
from .errors import ConfigError

SCHEMA = {
    "grid": {"n": "128"},
    "initial": {"theta": "sin:1:0.1", "gamma": "cos:1:0.1"},
    "physics": {
        "rho0": "0.0", "sigma": "0.0", "tau": "1.0",
        "rho1": "1.0", "rho2": "1.0", "gravity": "0.0",
    },
    "stepping": {
        "scheme": "rk4", "dt": "auto", "cfl": "0.5",
        "filter_floor": "1e-13", "monitor_cadence": "10", "probe_cadence": "none",
    },
    "run": {"t_end": "0.25"},
    "sweep": {"pairs": ""},
    "probe": {"trials": "16", "max_iterations": "200"},
    "report": {"source": ""},
}

_SECTION_ORDER = list(SCHEMA)


def load_config(path):
    """Read an INI file into {section: {key: raw string}} over the defaults."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config file not found", path=str(path))
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as fh:
            parser.read_file(fh, source=str(path))
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(f"config parse error: {exc.message.splitlines()[0]}",
                          path=str(path), line=line) from exc
    cfg = {sec: dict(vals) for sec, vals in SCHEMA.items()}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError("unknown config section", path=str(path), key=section)
        for key, value in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError("unknown config key", path=str(path), key=f"{section}.{key}")
            cfg[section][key] = value.strip()
    return cfg


def apply_overrides(cfg, overrides):
    """Apply repeatable ``section.key=value`` overrides onto a config dict."""
    for item in overrides or ():
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError("override must look like section.key=value", key=item)
        dotted, value = item.split("=", 1)
        section, key = dotted.split(".", 1)
        if section not in SCHEMA or key not in SCHEMA[section]:
            raise ConfigError("override references unknown key", key=dotted)
        cfg[section][key] = value.strip()
    return cfg


def render_config(cfg):
    """Deterministic INI text of the effective configuration."""
    lines = []
    for section in _SECTION_ORDER:
        lines.append(f"[{section}]")
        for key in SCHEMA[section]:
            lines.append(f"{key} = {cfg[section][key]}")
        lines.append("")
    return "\n".join(lines)


def _float(cfg, section, key):
    raw = cfg[section][key]
    try:
        value = float(raw)
    except ValueError as exc:
        raise ConfigError(f"expected a number, got {raw!r}", key=f"{section}.{key}") from exc
    # binary64 round-trip sanity: repr must reproduce the identical double
    assert float(repr(value)) == value or value != value
    return value


def _int(cfg, section, key):
    raw = cfg[section][key]
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"expected an integer, got {raw!r}", key=f"{section}.{key}") from exc


def parse_modes(raw, key):
    """Mode list 'sin:k:amp cos:k:amp ...' (comma or space separated)."""
    raw = raw.strip()
    if raw in ("", "none", "0"):
        return ()
    modes = []
    for tok in raw.replace(",", " ").split():
        parts = tok.split(":")
        if len(parts) != 3 or parts[0] not in ("sin", "cos"):
            raise ConfigError(f"bad mode token {tok!r} (want sin:k:amp or cos:k:amp)", key=key)
        try:
            modes.append((parts[0], int(parts[1]), float(parts[2])))
        except ValueError as exc:
            raise ConfigError(f"bad mode token {tok!r}", key=key) from exc
    return tuple(modes)


def parse_pairs(raw, key="sweep.pairs"):
    raw = raw.strip()
    if not raw:
        return ()
    pairs = []
    for tok in raw.replace(",", " ").split():
        parts = tok.split(":")
        if len(parts) != 2:
            raise ConfigError(f"bad pair token {tok!r} (want sigma:rho0)", key=key)
        try:
            pairs.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise ConfigError(f"bad pair token {tok!r}", key=key) from exc
    return tuple(pairs)


def build_params(cfg):
    return geometry.PhysParams(
        rho0=_float(cfg, "physics", "rho0"),
        sigma=_float(cfg, "physics", "sigma"),
        tau=_float(cfg, "physics", "tau"),
        rho1=_float(cfg, "physics", "rho1"),
        rho2=_float(cfg, "physics", "rho2"),
        g=_float(cfg, "physics", "gravity"),
    )


def build_policy(cfg):
    raw_dt = cfg["stepping"]["dt"].strip().lower()
    dt = None if raw_dt in ("auto", "", "none") else _float(cfg, "stepping", "dt")
    raw_probe = cfg["stepping"]["probe_cadence"].strip().lower()
    probe = None if raw_probe in ("", "none", "auto") else _int(cfg, "stepping", "probe_cadence")
    return stepping.StepPolicy(
        scheme=cfg["stepping"]["scheme"].strip(),
        dt=dt,
        cfl_constant=_float(cfg, "stepping", "cfl"),
        filter_floor=_float(cfg, "stepping", "filter_floor"),
        monitor_cadence=_int(cfg, "stepping", "monitor_cadence"),
        probe_cadence=probe,
    )


def build_initial_modes(cfg):
    theta_modes = parse_modes(cfg["initial"]["theta"], "initial.theta")
    gamma_modes = parse_modes(cfg["initial"]["gamma"], "initial.gamma")
    return theta_modes, gamma_modes


def grid_n(cfg):
    n = _int(cfg, "grid", "n")
    if n < 16 or n % 2:
        raise ConfigError(f"grid n must be even and >= 16, got {n}", key="grid.n")
    return n
