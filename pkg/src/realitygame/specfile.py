"""Experiment spec files: flat ``key = value`` text.

Blank lines and ``#`` comments are ignored; ``[section]`` headers are
allowed for readability but do not namespace keys. Example::

    kind = inefficiency
    map = arctan
    alpha = 1.5
    n_players = 3000
    horizon = 10000
    ensemble = 256
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import maps
from .core import PlayerPopulation
from .errors import ParseError, ValidationError

KINDS = ("bias-dynamics", "wealth-dynamics", "subjective-distribution",
         "rational-curve", "inefficiency", "table1")
MAP_NAMES = ("constant", "self-defeating", "arctan", "identity", "multimodal", "table")
NEEDS_MAP = ("bias-dynamics", "wealth-dynamics", "rational-curve", "inefficiency")

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


@dataclass
class ExperimentSpec:
    kind: str
    map: str | None = None
    alpha: float | None = None
    c: float = 0.5
    table: str | None = None
    n_players: int = 29
    horizon: int = 2000
    ensemble: int = 1
    seed: int = 0
    snapshot_stride: int = 100
    fit_lo: int | None = None
    fit_hi: int | None = None
    epsilon_player: bool = True
    rational_wealth: tuple = (0.2, 0.6)
    opponent_strategy: float = 0.5
    out: str | None = None

    def reality_map(self) -> maps.RealityMap:
        return build_map(self.map, alpha=self.alpha, c=self.c, table=self.table)

    def population(self) -> PlayerPopulation:
        return PlayerPopulation.uniform_grid(self.n_players)

    def fit_window(self):
        lo = 100 if self.fit_lo is None else self.fit_lo
        hi = self.horizon // 10 if self.fit_hi is None else self.fit_hi
        return lo, hi

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rational_wealth"] = list(self.rational_wealth)
        return d


def build_map(name, alpha=None, c=0.5, table=None) -> maps.RealityMap:
    if name == "constant":
        return maps.Constant(c)
    if name == "self-defeating":
        return maps.SelfDefeating()
    if name == "arctan":
        return maps.ArctanFamily(alpha)
    if name == "identity":
        return maps.Identity()
    if name == "multimodal":
        return maps.Multimodal()
    if name == "table":
        return maps.TablePiecewiseLinear.from_file(table)
    raise ValueError(f"unknown map {name!r}")


def _tokenize(text):
    """Yield (key, value, line, value_column) for each assignment."""
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.strip()
        if not stripped:
            continue
        col = len(line) - len(line.lstrip()) + 1
        if stripped.startswith("["):
            if not stripped.endswith("]") or len(stripped) < 3:
                raise ParseError("malformed section header", lineno, col)
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno, col)
        key_part, value_part = line.split("=", 1)
        key = key_part.strip()
        if not key or not key.replace("_", "").replace("-", "").isalnum():
            raise ParseError(f"invalid key {key!r}", lineno, col)
        value = value_part.strip()
        vcol = len(key_part) + 2 + (len(value_part) - len(value_part.lstrip()))
        if not value:
            raise ParseError(f"missing value for {key!r}", lineno, vcol)
        if key in seen:
            raise ParseError(f"duplicate key {key!r} (first set on line {seen[key]})",
                             lineno, col)
        seen[key] = lineno
        yield key, value, lineno, vcol


def _convert(key, value, typ):
    try:
        if typ == "int":
            return int(value, 0)
        if typ == "float":
            return float(value)
        if typ == "bool":
            low = value.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(value)
        if typ == "floats":
            return tuple(float(v) for v in value.split(",") if v.strip())
        return value
    except ValueError:
        raise ValidationError(key, f"cannot read {value!r} as {typ}") from None


_TYPES = {
    "kind": "str", "map": "str", "alpha": "float", "c": "float", "table": "str",
    "n_players": "int", "horizon": "int", "ensemble": "int", "seed": "int",
    "snapshot_stride": "int", "fit_lo": "int", "fit_hi": "int",
    "epsilon_player": "bool", "rational_wealth": "floats",
    "opponent_strategy": "float", "out": "str",
}
assert set(_TYPES) == {f.name for f in fields(ExperimentSpec)}


def parse_spec(text: str, kind: str | None = None, base_dir=None) -> ExperimentSpec:
    """Parse and validate a spec; ``kind`` (from the subcommand) fills or checks ``kind``."""
    values = {}
    for key, value, _, _ in _tokenize(text):
        if key not in _TYPES:
            raise ValidationError(key, "unknown key")
        values[key] = _convert(key, value, _TYPES[key])

    if kind is not None:
        if values.get("kind", kind) != kind:
            raise ValidationError("kind", f"spec says {values['kind']!r} but "
                                          f"subcommand is {kind!r}")
        values["kind"] = kind
    if "kind" not in values:
        raise ValidationError("kind", "required")
    if values.get("table") and base_dir is not None:
        path = Path(values["table"])
        if not path.is_absolute():
            values["table"] = str(Path(base_dir) / path)
    spec = ExperimentSpec(**values)
    validate(spec)
    return spec


def load_spec(path, kind: str | None = None) -> ExperimentSpec:
    path = Path(path)
    return parse_spec(path.read_text(), kind=kind, base_dir=path.parent)


def validate(spec: ExperimentSpec) -> None:
    if spec.kind not in KINDS:
        raise ValidationError("kind", f"must be one of {', '.join(KINDS)}")
    if spec.map is not None and spec.map not in MAP_NAMES:
        raise ValidationError("map", f"must be one of {', '.join(MAP_NAMES)}")
    if spec.kind in NEEDS_MAP and spec.map is None:
        raise ValidationError("map", f"required for {spec.kind}")
    if spec.map == "arctan":
        if spec.alpha is None:
            raise ValidationError("alpha", "required for the arctan map")
    if spec.alpha is not None and not spec.alpha > 0:
        raise ValidationError("alpha", "must be > 0")
    if not 0.0 <= spec.c <= 1.0:
        raise ValidationError("c", "must lie in [0, 1]")
    if spec.map == "table" and not spec.table:
        raise ValidationError("table", "required for the table map")
    for key in ("n_players", "horizon", "ensemble", "snapshot_stride"):
        if getattr(spec, key) < 1:
            raise ValidationError(key, "must be >= 1")
    if not 0 <= spec.seed < 2**64:
        raise ValidationError("seed", "must be an unsigned 64-bit integer")
    lo, hi = spec.fit_window()
    if spec.kind in ("inefficiency", "table1") and not 0 < lo < hi <= spec.horizon:
        raise ValidationError("fit_lo", f"fit window [{lo}, {hi}] must satisfy "
                                        f"0 < fit_lo < fit_hi <= horizon")
    for w in spec.rational_wealth:
        if not 0.0 <= w < 1.0:
            raise ValidationError("rational_wealth", "each value must lie in [0, 1)")
    if not 0.0 < spec.opponent_strategy < 1.0:
        raise ValidationError("opponent_strategy", "must lie in (0, 1)")
    if spec.map == "table":
        try:
            spec.reality_map()
        except (OSError, ValueError) as exc:
            raise ValidationError("table", str(exc)) from None
