"""Reality maps q(p): the probability of heads given the fraction bet on heads.

Built-in kinds are :class:`Constant`, :class:`SelfDefeating`,
:class:`ArctanFamily`, :class:`Identity`, :class:`Multimodal` and
:class:`TablePiecewiseLinear`. Each one is an immutable value that evaluates
on scalars or arrays and knows its own fixed points and slopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NotDifferentiable

FIXED_POINT_TOL = 1e-10
FD_STEP = 1e-6

# Integer codes shared with the compiled simulation kernel.
KIND_CONSTANT = 0
KIND_SELF_DEFEATING = 1
KIND_ARCTAN = 2
KIND_IDENTITY = 3
KIND_MULTIMODAL = 4
KIND_TABLE = 5


@dataclass(frozen=True)
class FixedPointInfo:
    location: float
    slope: float

    @property
    def stable(self) -> bool:
        return self.slope < 1.0

    @property
    def boundary(self) -> bool:
        return self.location in (0.0, 1.0)


@dataclass(frozen=True)
class DiscontinuityAttractor:
    """A jump in q(p) that crosses the diagonal and attracts the dynamics.

    For ``3p mod 1`` these sit at 1/3 and 2/3: just below the jump q is near
    1 and pushes p up, just above it q is near 0 and pushes p down.
    """

    location: float


class _Continuum:
    """Marker returned when every p is a fixed point (the identity map)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "CONTINUUM"

    def __reduce__(self):
        return (_Continuum, ())


CONTINUUM = _Continuum()


def _check_domain(p):
    arr = np.asarray(p, dtype=float)
    if np.any(~(arr >= 0.0) | ~(arr <= 1.0)):
        raise DomainError(f"p must lie in [0, 1], got {p!r}")
    return arr


def _out(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


class RealityMap:
    """Base class. Subclasses implement ``_q`` and ``_dq`` on arrays in [0, 1]."""

    kind_code: int = -1
    name: str = ""

    def evaluate(self, p):
        arr = _check_domain(p)
        return _out(np.clip(self._q(arr), 0.0, 1.0), p)

    __call__ = evaluate

    def slope(self, p):
        """Derivative q'(p), one-sided at the ends of [0, 1]."""
        arr = _check_domain(p)
        return _out(self._dq(arr), p)

    def fixed_points(self):
        raise NotImplementedError

    def kernel_params(self):
        """(code, scalar parameter, breakpoints, values) for the compiled kernel."""
        empty = np.zeros(0)
        return self.kind_code, 0.0, empty, empty

    def describe(self) -> dict:
        return {"map": self.name}

    def _q(self, p):
        raise NotImplementedError

    def _dq(self, p):
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(RealityMap):
    """Purely objective coin: q(p) = c regardless of the bets."""

    c: float = 0.5
    kind_code = KIND_CONSTANT
    name = "constant"

    def __post_init__(self):
        if not 0.0 <= self.c <= 1.0:
            raise ValueError("constant bias must lie in [0, 1]")

    def _q(self, p):
        return np.full_like(p, self.c)

    def _dq(self, p):
        return np.zeros_like(p)

    def fixed_points(self):
        return [FixedPointInfo(float(self.c), 0.0)]

    def kernel_params(self):
        empty = np.zeros(0)
        return self.kind_code, float(self.c), empty, empty

    def describe(self):
        return {"map": self.name, "c": self.c}


@dataclass(frozen=True)
class SelfDefeating(RealityMap):
    """q(p) = 1 - p: the coin leans against the crowd."""

    kind_code = KIND_SELF_DEFEATING
    name = "self-defeating"

    def _q(self, p):
        return 1.0 - p

    def _dq(self, p):
        return np.full_like(p, -1.0)

    def fixed_points(self):
        return [FixedPointInfo(0.5, -1.0)]


@dataclass(frozen=True)
class ArctanFamily(RealityMap):
    """Self-reinforcing family with slope ``alpha`` at p = 1/2.

    q(p) = 1/2 + atan(pi alpha (p - 1/2) / (1 - (2p - 1)^2)) / pi. It is
    written with atan2 so the endpoints come out as q(0) = 0 and q(1) = 1
    without special cases.
    """

    alpha: float
    kind_code = KIND_ARCTAN
    name = "arctan"

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError("alpha must be a positive finite number")

    def _q(self, p):
        num = 0.25 * math.pi * self.alpha * (p - 0.5)
        return 0.5 + np.arctan2(num, p * (1.0 - p)) / math.pi

    def _dq(self, p):
        # q' = (a/4)(p^2 - p + 1/2) / ((p(1-p))^2 + (pi a/4)^2 (p - 1/2)^2)
        a = self.alpha
        v = p * (1.0 - p)
        k = 0.25 * math.pi * a * (p - 0.5)
        return 0.25 * a * (p * p - p + 0.5) / (v * v + k * k)

    @property
    def boundary_slope(self) -> float:
        return 8.0 / (math.pi**2 * self.alpha)

    def fixed_points(self):
        points = {0.0, 0.5, 1.0}
        # Extra interior crossings exist when both the centre and the
        # boundaries are attracting (8/pi^2 < alpha < 1).
        grid = np.linspace(1e-9, 0.5 - 1e-9, 4001)
        f = self._q(grid) - grid
        for i in np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)[0]:
            root = brentq(lambda x: float(self._q(np.array(x)) - x),
                          grid[i], grid[i + 1], xtol=1e-14)
            points.update((root, 1.0 - root))
        return [FixedPointInfo(x, float(self._dq(np.array(x))))
                for x in sorted(points)]

    def kernel_params(self):
        empty = np.zeros(0)
        return self.kind_code, float(self.alpha), empty, empty

    def describe(self):
        return {"map": self.name, "alpha": self.alpha}


@dataclass(frozen=True)
class Identity(RealityMap):
    """Purely subjective coin, q(p) = p."""

    kind_code = KIND_IDENTITY
    name = "identity"

    def _q(self, p):
        return p.copy()

    def _dq(self, p):
        return np.ones_like(p)

    def fixed_points(self):
        return CONTINUUM


_THIRDS = (1.0 / 3.0, 2.0 / 3.0)


@dataclass(frozen=True)
class Multimodal(RealityMap):
    """q(p) = 3p mod 1, closed at the right end with q(1) = 1.

    At the jumps 1/3 and 2/3 the mod convention applies (q = 0 there).
    """

    kind_code = KIND_MULTIMODAL
    name = "multimodal"

    def _q(self, p):
        return np.where(p >= 1.0, 1.0, np.mod(3.0 * p, 1.0))

    def _dq(self, p):
        at_jump = np.zeros(np.shape(p), dtype=bool)
        for x in _THIRDS:
            at_jump |= np.abs(p - x) < 1e-12
        if np.any(at_jump):
            raise NotDifferentiable("3p mod 1 jumps at p = 1/3 and p = 2/3")
        return np.full_like(p, 3.0)

    def fixed_points(self):
        pts = [FixedPointInfo(0.0, 3.0), FixedPointInfo(0.5, 3.0),
               FixedPointInfo(1.0, 3.0)]
        return sorted(pts + [DiscontinuityAttractor(x) for x in _THIRDS],
                      key=lambda f: f.location)


@dataclass(frozen=True, eq=False)
class TablePiecewiseLinear(RealityMap):
    """Linear interpolation through user breakpoints covering [0, 1]."""

    breakpoints: np.ndarray
    values: np.ndarray
    kind_code = KIND_TABLE
    name = "table"

    def __post_init__(self):
        x = np.array(self.breakpoints, dtype=float)
        y = np.clip(np.array(self.values, dtype=float), 0.0, 1.0)
        if x.ndim != 1 or x.shape != y.shape or x.size < 2:
            raise ValueError("need at least two (p, q) breakpoints")
        if np.any(np.diff(x) <= 0):
            raise ValueError("breakpoints must be strictly increasing in p")
        if x[0] != 0.0 or x[-1] != 1.0:
            raise ValueError("breakpoints must start at p = 0 and end at p = 1")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "breakpoints", x)
        object.__setattr__(self, "values", y)

    @classmethod
    def from_file(cls, path) -> "TablePiecewiseLinear":
        """Load a two-column whitespace-separated ``p q`` file."""
        rows = []
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'p q', got {line!r}")
            rows.append((float(parts[0]), float(parts[1])))
        if not rows:
            raise ValueError(f"{path}: no breakpoints")
        x, y = zip(*rows)
        return cls(np.array(x), np.array(y))

    def _q(self, p):
        return np.interp(p, self.breakpoints, self.values)

    def _dq(self, p):
        p = np.asarray(p, dtype=float)
        h = FD_STEP
        lo = np.clip(p - h, 0.0, 1.0)
        hi = np.clip(p + h, 0.0, 1.0)
        return (self._q(hi) - self._q(lo)) / (hi - lo)

    def fixed_points(self):
        x, y = self.breakpoints, self.values
        f = y - x
        if np.all(f == 0.0):
            return CONTINUUM
        found = []
        for i in range(x.size - 1):
            a, b = x[i], x[i + 1]
            fa, fb = f[i], f[i + 1]
            slope = (y[i + 1] - y[i]) / (b - a)
            if fa == 0.0:
                # at a kink report the steeper side, so stability is conservative
                left = (y[i] - y[i - 1]) / (a - x[i - 1]) if i > 0 else slope
                found.append((a, max(slope, left)))
            if fa * fb < 0:
                root = _bisect(lambda t: float(np.interp(t, x, y) - t), a, b)
                found.append((root, slope))
        if f[-1] == 0.0:
            found.append((1.0, (y[-1] - y[-2]) / (x[-1] - x[-2])))
        return [FixedPointInfo(float(r), float(m)) for r, m in found]

    def kernel_params(self):
        return self.kind_code, 0.0, np.asarray(self.breakpoints), np.asarray(self.values)

    def describe(self):
        return {"map": self.name, "breakpoints": self.breakpoints.tolist(),
                "values": self.values.tolist()}


def _bisect(fn, a, b, tol=FIXED_POINT_TOL):
    fa = fn(a)
    while b - a > tol:
        mid = 0.5 * (a + b)
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (fa < 0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def evaluate(reality_map: RealityMap, p):
    return reality_map.evaluate(p)


def fixed_points(reality_map: RealityMap):
    """All p with q(p) = p, tagged with slope and stability.

    Returns :data:`CONTINUUM` for maps that are the identity everywhere.
    """
    return reality_map.fixed_points()


def slope_at(reality_map: RealityMap, p):
    return reality_map.slope(p)


def classify(reality_map: RealityMap, p=0.5) -> str:
    """'objective', 'self-defeating' or 'self-reinforcing' from the local slope."""
    d = slope_at(reality_map, p)
    if d == 0:
        return "objective"
    return "self-defeating" if d < 0 else "self-reinforcing"
