"""
Run configuration: flat dotted key=value files, manifest replay, value
parsing and validation into an ExperimentConfig.
"""

import json
import logging
from pathlib import Path

import numpy as np

from analysis.scaling import localization_exponent
from ensemble.parameters import SEED_LIMIT, EnsembleParams, Symmetry
from errors import ConfigError, DomainError
from experiments.config import ExperimentConfig, default_workers

logger = logging.getLogger(__name__)

MAX_RUN_LEVEL = 13
AUTO = "auto"


# -----------------------
# VALUE PARSERS
# -----------------------
def parse_bool(text):
    lowered = str(text).strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_optional(parser):
    def parse(text):
        return None if str(text).strip().lower() in (AUTO, "none", "") else parser(text)
    return parse


def parse_int_list(text):
    """'2..9' (inclusive) or '8,10,12'."""
    text = str(text).strip()
    if ".." in text:
        low, high = (int(part) for part in text.split("..", 1))
        return tuple(range(low, high + 1))
    return tuple(int(part) for part in text.split(",") if part.strip())


def parse_float_list(text):
    return tuple(float(part) for part in str(text).split(",") if part.strip())


def parse_float_pair(text):
    values = parse_float_list(text)
    if len(values) != 2:
        raise ValueError(f"expected two numbers, got {text!r}")
    return values


def parse_complex(text):
    return complex(str(text).replace(" ", ""))


def parse_seed(text):
    seed = int(text)
    if not 0 <= seed < SEED_LIMIT:
        raise ValueError(f"seed {seed} is not an unsigned 64-bit integer")
    return seed


KEYS = {
    "params.n": int,
    "params.c": float,
    "params.symmetry": Symmetry,
    "params.normalized": parse_bool,
    "params.seed": parse_optional(parse_seed),
    "energy": float,
    "trials": int,
    "trial": int,
    "m": parse_optional(int),
    "w": float,
    "epsilon": float,
    "ell_loc": float,
    "z": parse_complex,
    "m_range": parse_optional(parse_int_list),
    "n_values": parse_optional(parse_int_list),
    "c_values": parse_optional(parse_float_list),
    "box_width": float,
    "sites_per_trial": int,
    "window_eigenvalues": int,
    "window_half_width": parse_optional(float),
    "dos_bins": int,
    "dos_range": parse_float_pair,
    "dos_bandwidth": float,
    "bulk_half_width": float,
    "workers": parse_optional(int),
}

DEFAULTS = {
    "params.n": "10",
    "params.c": "1.0",
    "params.symmetry": "orthogonal",
    "params.normalized": "true",
    "params.seed": AUTO,
    "energy": "0.0",
    "trials": "100",
    "trial": "0",
    "m": AUTO,
    "w": "0.2",
    "epsilon": "0.25",
    "ell_loc": "0.3",
    "z": "1j",
    "m_range": AUTO,
    "n_values": AUTO,
    "c_values": AUTO,
    "box_width": "4.0",
    "sites_per_trial": "8",
    "window_eigenvalues": "200",
    "window_half_width": AUTO,
    "dos_bins": "40",
    "dos_range": "-2.5,2.5",
    "dos_bandwidth": "0.05",
    "bulk_half_width": "0.5",
    "workers": AUTO,
}


# -----------------------
# FILES
# -----------------------
def parse_config_text(text, source="<config>"):
    """
    Dotted key=value lines; '#' starts a comment, blank lines are skipped.

    Returns:
        dict: key -> raw string value
    """
    values = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{number}: expected KEY=VALUE, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        check_key(key, f"{source}:{number}")
        values[key] = value
    return values


def check_key(key, where="config"):
    if key not in KEYS:
        raise ConfigError(f"{where}: unknown key {key!r}")


def load_config_file(path):
    """Read a key=value file, or a manifest.json whose 'config' object is replayed."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if path.suffix != ".json":
        return parse_config_text(text, str(path))
    try:
        manifest = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    values = manifest.get("config") if isinstance(manifest, dict) else None
    if not isinstance(values, dict):
        raise ConfigError(f"{path} has no 'config' object")
    for key in values:
        check_key(key, str(path))
    return {key: str(value) for key, value in values.items()}


def parse_assignment(text):
    if "=" not in text:
        raise ConfigError(f"--set expects KEY=VALUE, got {text!r}")
    key, value = (part.strip() for part in text.split("=", 1))
    check_key(key, "--set")
    return key, value


def resolve_values(*layers):
    """Merge DEFAULTS with later layers taking precedence."""
    values = dict(DEFAULTS)
    for layer in layers:
        for key, value in layer.items():
            check_key(key)
            values[key] = value
    return values


# -----------------------
# BUILD AND VALIDATE
# -----------------------
def random_seed():
    return int(np.random.SeedSequence().entropy % SEED_LIMIT)


def _parsed(values):
    parsed = {}
    for key, parser in KEYS.items():
        try:
            parsed[key] = parser(values[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid value for {key}: {values[key]!r} ({exc})") from exc
    return parsed


def build_config(values):
    """
    ExperimentConfig from raw dotted values; a missing seed is drawn at
    random and logged so the run stays reproducible from its manifest.
    """
    parsed = _parsed(values)
    seed = parsed["params.seed"]
    if seed is None:
        seed = random_seed()
        logger.info("no seed given; using params.seed=%d", seed)
    try:
        params = EnsembleParams(
            n=parsed["params.n"],
            c=parsed["params.c"],
            symmetry=parsed["params.symmetry"],
            normalized=parsed["params.normalized"],
            master_seed=seed,
        )
        return ExperimentConfig(
            params=params,
            energy=parsed["energy"],
            trials=parsed["trials"],
            trial=parsed["trial"],
            m=parsed["m"],
            w=parsed["w"],
            epsilon=parsed["epsilon"],
            ell_loc=parsed["ell_loc"],
            z=parsed["z"],
            m_range=parsed["m_range"],
            n_values=parsed["n_values"],
            c_values=parsed["c_values"],
            box_width=parsed["box_width"],
            sites_per_trial=parsed["sites_per_trial"],
            window_eigenvalues=parsed["window_eigenvalues"],
            window_half_width=parsed["window_half_width"],
            dos_bins=parsed["dos_bins"],
            dos_range=parsed["dos_range"],
            dos_bandwidth=parsed["dos_bandwidth"],
            bulk_half_width=parsed["bulk_half_width"],
            workers=parsed["workers"] or default_workers(),
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def _format(value):
    if value is None:
        return AUTO
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Symmetry):
        return value.value
    if isinstance(value, tuple):
        return ",".join(_format(item) for item in value)
    return repr(value) if isinstance(value, (float, complex)) else str(value)


def config_to_values(config):
    """Fully resolved dotted values of a config, as written to the manifest."""
    params = config.params
    return {
        "params.n": _format(params.n),
        "params.c": _format(float(params.c)),
        "params.symmetry": _format(params.symmetry),
        "params.normalized": _format(params.normalized),
        "params.seed": _format(params.master_seed),
        "energy": _format(float(config.energy)),
        "trials": _format(config.trials),
        "trial": _format(config.trial),
        "m": _format(config.m),
        "w": _format(float(config.w)),
        "epsilon": _format(float(config.epsilon)),
        "ell_loc": _format(float(config.ell_loc)),
        "z": _format(config.z),
        "m_range": _format(config.m_range),
        "n_values": _format(config.n_values),
        "c_values": _format(config.c_values),
        "box_width": _format(float(config.box_width)),
        "sites_per_trial": _format(config.sites_per_trial),
        "window_eigenvalues": _format(config.window_eigenvalues),
        "window_half_width": _format(config.window_half_width),
        "dos_bins": _format(config.dos_bins),
        "dos_range": _format(tuple(float(edge) for edge in config.dos_range)),
        "dos_bandwidth": _format(float(config.dos_bandwidth)),
        "bulk_half_width": _format(float(config.bulk_half_width)),
        "workers": _format(config.workers),
    }


def validate(config):
    """
    Range checks and the localization exponent report.

    Returns:
        list: (severity, message) pairs; severity is "error" or "warning"
    """
    violations = []
    for n in (config.params.n,) + tuple(config.n_values or ()):
        if not 0 <= n <= MAX_RUN_LEVEL:
            violations.append(("error", f"n={n} outside [0, {MAX_RUN_LEVEL}]"))
    if config.trials < 1:
        violations.append(("error", f"trials={config.trials} must be at least 1"))
    for name in ("w", "epsilon", "ell_loc"):
        value = getattr(config, name)
        if not 0 < value < 1:
            violations.append(("error", f"{name}={value} outside (0, 1)"))
    if not config.z.imag > 0:
        violations.append(("error", f"z={config.z} must have a positive imaginary part"))

    for c in config.couplings:
        two_mu = localization_exponent(c, config.w, config.epsilon, config.ell_loc)
        logger.info("2mu = %.4f at c=%s, w=%s, epsilon=%s, ell_loc=%s", two_mu, c, config.w, config.epsilon, config.ell_loc)
        if two_mu <= 0:
            violations.append(("warning", f"2mu = {two_mu:.4f} <= 0 at c={c}: no localization decay is predicted"))
    return violations
