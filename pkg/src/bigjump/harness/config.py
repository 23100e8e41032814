"""Experiment configuration: TOML text, schema checks and dotted overrides."""

import copy
import hashlib
import json
import math
import sys
from dataclasses import dataclass

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..errors import ConfigError

# section -> key -> (type check, default); None default means required
SCHEMA = {
    "model": {
        "family": (str, None),
        "alpha": (float, None),
        "beta": (float, None),
        "b": (float, 2.0),
        "ratio": (float, 0.5),
    },
    "grid": {
        "n_list": (list, None),
        "N_rule": (dict, None),
    },
    "estimate": {
        "r": ((int, str), "auto"),
        "r_threshold": (float, 1e-3),
        "r_max": (int, 10),
        "force_regime": (str, ""),
        "large_prefactor": (bool, True),
        "saddle": (bool, True),
    },
    "oracle": {
        "enabled": (bool, False),
        "m_max": (int, 2_000_000),
        "method": (str, "doubling"),
    },
    "tolerances": {
        "tail_eps": (float, 1e-14),
        "eps1": (float, 0.05),
        "eps2": (float, 1.0),
        "clt_floor": (float, 1.0),
        "degenerate_rel": (float, 1e-6),
        "xnr_delta": (float, 0.01),
        "xnr_K": (float, 2.0),
    },
    "output": {
        "dir": (str, "out"),
        "name": (str, "results"),
    },
}

RULE_KEYS = {
    "list": {"kind", "values"},
    "power": {"kind", "A", "theta", "gamma"},
    "N_star": {"kind", "A"},
    "N_2star": {"kind", "A"},
}

FAMILY_PARAMS = {"stretched": {"alpha"}, "loghazard": {"beta", "b"}, "geometric": {"ratio"}}


@dataclass(frozen=True)
class ExperimentConfig:
    data: dict

    def __getitem__(self, section):
        return self.data[section]

    @property
    def model_spec(self):
        m = self.data["model"]
        fam = m["family"]
        return fam, {k: m[k] for k in sorted(FAMILY_PARAMS[fam]) if k in m}

    @property
    def tolerances(self):
        return dict(self.data["tolerances"])

    def canonical(self):
        return json.dumps(self.data, sort_keys=True, separators=(",", ":"))

    def digest(self):
        return hashlib.sha256(self.canonical().encode()).hexdigest()


def _type_ok(value, kind):
    kinds = kind if isinstance(kind, tuple) else (kind,)
    for k in kinds:
        if k is float and isinstance(value, (int, float)) and not isinstance(value, bool):
            return True
        if k is int and isinstance(value, int) and not isinstance(value, bool):
            return True
        if k not in (int, float) and isinstance(value, k):
            return True
    return False


def _check_rule(rule):
    kind = rule.get("kind")
    if kind not in RULE_KEYS:
        raise ConfigError(f"grid.N_rule.kind must be one of {sorted(RULE_KEYS)}, got {kind!r}")
    extra = set(rule) - RULE_KEYS[kind]
    if extra:
        raise ConfigError(f"unknown keys in grid.N_rule ({kind}): {sorted(extra)}")
    if kind == "list":
        vals = rule.get("values")
        if not isinstance(vals, list) or not vals or not all(_type_ok(v, float) and v > 0 for v in vals):
            raise ConfigError("grid.N_rule.values must be a non-empty list of positive numbers")
        return
    rule.setdefault("theta", 1.0) if kind == "power" else None
    rule.setdefault("gamma", 0.0) if kind == "power" else None
    for key in RULE_KEYS[kind] - {"kind"}:
        if not _type_ok(rule.get(key), float):
            raise ConfigError(f"grid.N_rule.{key} must be a number")
    if rule["A"] <= 0:
        raise ConfigError("grid.N_rule.A must be positive")


def validate(raw):
    """Fill defaults and check types; unknown sections or keys are errors."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a table")
    unknown = set(raw) - set(SCHEMA)
    if unknown:
        raise ConfigError(f"unknown sections: {sorted(unknown)}")
    data = {}
    for section, fields in SCHEMA.items():
        given = raw.get(section, {})
        if not isinstance(given, dict):
            raise ConfigError(f"[{section}] must be a table")
        extra = set(given) - set(fields)
        if extra:
            raise ConfigError(f"unknown keys in [{section}]: {sorted(extra)}")
        out = {}
        for key, (kind, default) in fields.items():
            if key in given:
                if not _type_ok(given[key], kind):
                    raise ConfigError(f"{section}.{key} has wrong type: {given[key]!r}")
                out[key] = given[key]
            elif default is not None:
                out[key] = default
        data[section] = out

    model = data["model"]
    fam = model.get("family")
    if fam not in FAMILY_PARAMS:
        raise ConfigError(f"model.family must be one of {sorted(FAMILY_PARAMS)}, got {fam!r}")
    needed = {"stretched": "alpha", "loghazard": "beta"}.get(fam)
    if needed and needed not in model:
        raise ConfigError(f"model.{needed} is required for family {fam}")
    stray = {k for k in ("alpha", "beta") if k in model} - FAMILY_PARAMS[fam]
    if stray:
        raise ConfigError(f"parameters {sorted(stray)} do not apply to family {fam}")

    grid = data["grid"]
    n_list = grid.get("n_list")
    if not n_list:
        raise ConfigError("grid.n_list must be a non-empty list")
    if not all(_type_ok(n, int) and n >= 1 for n in n_list):
        raise ConfigError("grid.n_list entries must be positive integers")
    if "N_rule" not in grid:
        raise ConfigError("grid.N_rule is required")
    _check_rule(grid["N_rule"])

    est = data["estimate"]
    if isinstance(est["r"], str) and est["r"] != "auto":
        raise ConfigError("estimate.r must be an integer or \"auto\"")
    if isinstance(est["r"], int) and not 0 <= est["r"] <= 10:
        raise ConfigError("estimate.r must lie in 0..10")
    if est["force_regime"] not in ("", "moderate", "critical", "bigjump"):
        raise ConfigError(f"estimate.force_regime {est['force_regime']!r} is not a regime")
    if data["oracle"]["method"] not in ("doubling", "sequential"):
        raise ConfigError("oracle.method must be doubling or sequential")
    tol = data["tolerances"]
    if not 0 < tol["tail_eps"] <= 1e-6:
        raise ConfigError("tolerances.tail_eps must lie in (0, 1e-6]")
    return ExperimentConfig(data)


def _parse_value(text):
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def apply_overrides(raw, overrides):
    """Apply ``section.key=value`` strings; values are read as TOML literals, else as bare strings."""
    raw = copy.deepcopy(raw)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        path, text = item.split("=", 1)
        keys = path.strip().split(".")
        if not all(keys):
            raise ConfigError(f"override path {path!r} is malformed")
        node = raw
        for k in keys[:-1]:
            node = node.setdefault(k, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override path {path!r} crosses a non-table value")
        node[keys[-1]] = _parse_value(text.strip())
    return raw


def load(source, overrides=()):
    """Read a config from a path, ``-`` for stdin, or a dict; then apply overrides and validate."""
    if isinstance(source, dict):
        raw = source
    else:
        try:
            text = sys.stdin.read() if source == "-" else open(source, encoding="utf-8").read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {source!r}: {exc}") from None
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"config is not valid TOML: {exc}") from None
    return validate(apply_overrides(raw, overrides))


def rule_values(rule, n, scales):
    """Overshoots for one n; ``scales`` is a zero-argument callable returning CriticalScales."""
    kind = rule["kind"]
    if kind == "list":
        return [float(v) for v in rule["values"]]
    if kind == "power":
        return [rule["A"] * n ** rule["theta"] * math.log(n) ** rule["gamma"]]
    sc = scales()
    return [rule["A"] * (sc.N_star if kind == "N_star" else sc.N_2star)]
