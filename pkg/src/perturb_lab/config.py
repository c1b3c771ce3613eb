"""Experiment configuration files.

Plain INI text read with ``configparser``. Recognised sections and keys
(all optional except ``experiment.family`` and ``experiment.n``):

    [experiment]
    family   = bounded-degree-random-tree   ; one of families.FAMILIES
    n        = 1000, 2000, 4000             ; strictly increasing grid
    p        = 2/n                          ; "a/n", "a*n^-b" or a number
    trials   = 20
    seed     = 1                            ; master seed
    workers  = 1                            ; process pool size
    route    = auto                         ; auto | partition | indep
    timing   = true                         ; false writes elapsed_ms = 0

    [family]
    delta = 3      c = 20     k_paths = 8

    [constants]
    C = 8          Cprime = 8     c = 1.2     r = 1

    [pipeline]
    mode = relaxed     edges_mode = random-only
    ell = 8            window = 4     c_scale = 0.01     coverage = 0.0416667

    [params]
    effort = 4     exact_cap = 10     spectral = true    k =

Command-line flags override keys of the same name.
"""
from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, fields, replace

from .families import FAMILIES

_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_OVER_N = re.compile(rf"^\s*({_NUM})\s*/\s*n\s*$")
_POWER = re.compile(rf"^\s*({_NUM})\s*\*\s*n\s*\^\s*\(?\s*-\s*({_NUM})\s*\)?\s*$")


class ConfigError(ValueError):
    pass


def parse_p_rule(rule: str):
    """Turn "a/n", "a*n^-b" or a plain number into a function of n."""
    rule = str(rule).strip()
    m = _OVER_N.match(rule)
    if m:
        a = float(m.group(1))
        return lambda n: a / n
    m = _POWER.match(rule)
    if m:
        a, b = float(m.group(1)), float(m.group(2))
        return lambda n: a * n ** (-b)
    try:
        v = float(rule)
    except ValueError:
        raise ConfigError(f"cannot parse p rule {rule!r}; use a/n, a*n^-b or a number") from None
    return lambda n: v


@dataclass(frozen=True)
class ExperimentConfig:
    family: str
    n_grid: tuple[int, ...]
    p_rule: str = "2/n"
    trials: int = 1
    seed: int = 0
    workers: int = 1
    route: str = "auto"
    timing: bool = True
    delta: int = 3
    c: float = 20.0
    k_paths: int = 8
    C: float = 8.0
    Cprime: float | None = None
    c_const: float = 1.2
    r: float = 1.0
    mode: str = "relaxed"
    edges_mode: str = "random-only"
    ell: int | None = None
    window: float | None = None
    c_scale: float = 1.0
    coverage: float = 1 / 24
    effort: int = 4
    exact_cap: int = 10
    spectral: bool = True
    k: int | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.n_grid or any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ConfigError(f"n grid must be non-empty and strictly increasing: {self.n_grid}")
        if self.route not in ("auto", "partition", "indep"):
            raise ConfigError(f"route must be auto, partition or indep (got {self.route!r})")
        if self.mode not in ("strict", "relaxed"):
            raise ConfigError(f"mode must be strict or relaxed (got {self.mode!r})")
        parse_p_rule(self.p_rule)

    def p_of(self, n: int) -> float:
        return parse_p_rule(self.p_rule)(n)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)

    def cells(self) -> list[tuple[int, int, int]]:
        """(trial index, n, trial number within the cell) in output order."""
        out = []
        for j, n in enumerate(self.n_grid):
            for t in range(self.trials):
                out.append((j * self.trials + t, n, t))
        return out


# key in file -> (section, field name, converter)
def _bool(s: str) -> bool:
    s = s.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {s!r}")


def _opt(conv):
    return lambda s: None if s.strip() == "" else conv(s)


def _grid(s: str) -> tuple[int, ...]:
    return tuple(int(float(x)) for x in re.split(r"[,\s]+", s.strip()) if x)


_KEYS = {
    ("experiment", "family"): ("family", str.strip),
    ("experiment", "n"): ("n_grid", _grid),
    ("experiment", "p"): ("p_rule", str.strip),
    ("experiment", "trials"): ("trials", int),
    ("experiment", "seed"): ("seed", int),
    ("experiment", "workers"): ("workers", int),
    ("experiment", "route"): ("route", str.strip),
    ("experiment", "timing"): ("timing", _bool),
    ("family", "delta"): ("delta", int),
    ("family", "c"): ("c", float),
    ("family", "k_paths"): ("k_paths", int),
    ("constants", "c"): ("C", float),
    ("constants", "cprime"): ("Cprime", _opt(float)),
    ("constants", "c_const"): ("c_const", float),
    ("constants", "r"): ("r", float),
    ("pipeline", "mode"): ("mode", str.strip),
    ("pipeline", "edges_mode"): ("edges_mode", str.strip),
    ("pipeline", "ell"): ("ell", _opt(int)),
    ("pipeline", "window"): ("window", _opt(float)),
    ("pipeline", "c_scale"): ("c_scale", float),
    ("pipeline", "coverage"): ("coverage", float),
    ("params", "effort"): ("effort", int),
    ("params", "exact_cap"): ("exact_cap", int),
    ("params", "spectral"): ("spectral", _bool),
    ("params", "k"): ("k", _opt(int)),
}


def parse_config(text: str) -> ExperimentConfig:
    # constants.C and constants.c clash once keys are lower-cased, so keep case
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    kw = {}
    for section in cp.sections():
        for key, raw in cp.items(section):
            k = key.lower() if key != "C" else "c"
            if section == "constants" and key == "c":
                k = "c_const"
            spec = _KEYS.get((section.lower(), k))
            if spec is None:
                raise ConfigError(f"unknown key [{section}] {key}")
            name, conv = spec
            try:
                kw[name] = conv(raw)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from None
    for need in ("family", "n_grid"):
        if need not in kw:
            raise ConfigError(f"missing required key for {need}")
    return ExperimentConfig(**kw)


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_fields() -> list[str]:
    return [f.name for f in fields(ExperimentConfig)]
