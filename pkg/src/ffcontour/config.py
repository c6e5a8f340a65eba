"""Flat ``key = value`` configuration shared by the command-line tools.

Every tunable of the evolution, the force field, the initial contour and the
free-space classifier has one key here; ``none`` stands for an unset value.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .forces import EvolutionParams
from .freespace import MatchParams


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    # evolution
    step: float = 1.0
    edge_stop: float = 0.15
    samples_per_patch: int | None = None
    move_eps: float = 0.1
    steady_fraction: float = 0.98
    max_iters: int = 2000
    split_eps: float = 40.0
    merge_eps: float | None = None
    refine: bool = True
    topology: bool = True
    min_component_area: float = 25.0
    confirm_depth: int = 3
    resample_flips: bool = True
    max_patches: int = 20000
    # force field
    sigma: float = 2.0
    p: int = 2
    gain: float = 20.0
    canny_low: float | None = None
    canny_high: float | None = None
    # initial circle; unset seed means the image centre
    n_patches: int = 8
    degree: int = 3
    seed_x: float | None = None
    seed_y: float | None = None
    seed_radius: float | None = None
    # free space
    eps_alt: float = 0.05
    harris_k: float = 0.06
    harris_threshold: float = 0.01
    harris_sigma: float = 1.5
    window: int = 3
    max_disp: float = 30.0
    ncc_threshold: float = 0.8
    assign_margin: int = 3
    # output and benchmarking
    snapshot_every: int = 0
    repeats: int = 10
    bench_patches: int = 40

    def evolution(self) -> EvolutionParams:
        names = {f.name for f in fields(EvolutionParams)}
        return EvolutionParams(**{k: v for k, v in asdict(self).items() if k in names})

    def matching(self) -> MatchParams:
        return MatchParams(self.harris_k, self.harris_threshold, self.harris_sigma,
                           self.window, self.max_disp, self.ncc_threshold, self.assign_margin)

    def canny(self) -> tuple[float, float] | None:
        if self.canny_low is None and self.canny_high is None:
            return None
        if self.canny_low is None or self.canny_high is None:
            raise ConfigError("set both canny_low and canny_high, or neither")
        return (self.canny_low, self.canny_high)

    def seed(self, width: int, height: int) -> tuple[tuple[float, float], float]:
        cx = (width - 1) / 2.0 if self.seed_x is None else self.seed_x
        cy = (height - 1) / 2.0 if self.seed_y is None else self.seed_y
        r = 0.05 * min(width, height) if self.seed_radius is None else self.seed_radius
        return (cx, cy), r


_TYPES = {f.name: f.type for f in fields(Config)}
_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def _parse(key: str, text: str):
    t = _TYPES[key]
    text = text.strip()
    if "None" in t and text.lower() == "none":
        return None
    try:
        if t.startswith("bool"):
            low = text.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(text)
        if t.startswith("int"):
            return int(text)
        return float(text)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {text!r}") from None


def _format(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v)


def apply_overrides(cfg: Config, pairs) -> Config:
    """Apply ``key=value`` strings (or ``(key, value)`` tuples) to ``cfg``."""
    updates = {}
    for item in pairs:
        if isinstance(item, str):
            if "=" not in item:
                raise ConfigError(f"expected key=value, got {item!r}")
            key, value = item.split("=", 1)
        else:
            key, value = item
        key = key.strip()
        if key not in _TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        updates[key] = _parse(key, str(value))
    try:
        new = replace(cfg, **updates)
        new.evolution()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return new


def parse_config(text: str, base: Config | None = None) -> Config:
    pairs = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key = value")
        key, value = line.split("=", 1)
        pairs.append((key, value))
    return apply_overrides(base or Config(), pairs)


def load_config(path) -> Config:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def dump_config(cfg: Config | None = None) -> str:
    cfg = cfg or Config()
    return "".join(f"{k} = {_format(v)}\n" for k, v in asdict(cfg).items())
