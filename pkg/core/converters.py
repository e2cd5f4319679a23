"""
Graphical converters - clamped piecewise-linear lookup tables.

Four converters drive the model:
    - eta:    K-L ratio (relative)        -> underutilisation onset multiplier
    - mfp:    K-L ratio (relative)        -> MFP growth multiplier (delta / gamma)
    - prices: MFP level                   -> price level (rho)
    - theta:  underutilisation (relative) -> disposable income multiplier
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Tuple

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class TableFunction:
    """
    Piecewise-linear lookup with constant extrapolation.

    Exact at breakpoints, linear in between, clamped to the end values
    outside [x_min, x_max].
    """
    name: str
    xs: Tuple[float, ...]
    ys: Tuple[float, ...]
    _xp: np.ndarray = field(init=False, repr=False, compare=False)
    _fp: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        ys = tuple(float(y) for y in self.ys)
        if len(xs) != len(ys):
            raise InputError(f"converter {self.name}: {len(xs)} x values but {len(ys)} y values")
        if len(xs) < 2:
            raise InputError(f"converter {self.name}: at least 2 breakpoints required")
        for j in range(1, len(xs)):
            if not xs[j] > xs[j - 1]:
                raise InputError(
                    f"converter {self.name}: x must be strictly increasing "
                    f"(breakpoint {j + 1}: {xs[j]!r} after {xs[j - 1]!r})"
                )
        if not all(np.isfinite(xs)) or not all(np.isfinite(ys)):
            raise InputError(f"converter {self.name}: breakpoints must be finite")

        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "_xp", np.asarray(xs))
        object.__setattr__(self, "_fp", np.asarray(ys))

    @classmethod
    def from_points(cls, name: str, points: Iterable[Tuple[float, float]]) -> "TableFunction":
        pts = list(points)
        return cls(name=name, xs=tuple(p[0] for p in pts), ys=tuple(p[1] for p in pts))

    def __call__(self, x: float) -> float:
        # np.interp clamps to fp[0] / fp[-1] outside the range
        return float(np.interp(x, self._xp, self._fp))

    @property
    def points(self) -> List[Tuple[float, float]]:
        return list(zip(self.xs, self.ys))

    def scaled(self, factor: float) -> "TableFunction":
        """Same breakpoints with every y multiplied by factor."""
        return TableFunction(name=self.name, xs=self.xs, ys=tuple(y * factor for y in self.ys))

    def is_non_increasing(self) -> bool:
        return all(b <= a for a, b in zip(self.ys, self.ys[1:]))


def eval_table(tf: TableFunction, x: float) -> float:
    """Evaluate a converter at x."""
    return tf(x)


# ==================== Built-in Tables ====================

ETA_POINTS = [
    (0.000, 0.000), (0.500, 0.291), (1.000, 1.000), (1.500, 1.990), (2.000, 3.083),
    (2.500, 4.029), (3.000, 4.636), (3.500, 4.976), (4.000, 5.000), (4.500, 5.000),
    (5.000, 5.000),
]

MFP_POINTS = [
    (0.000, 0.000), (0.500, 0.415), (1.000, 1.000), (1.500, 1.524), (2.000, 2.214),
    (2.500, 3.135), (3.000, 4.093), (3.500, 4.667), (4.000, 4.929), (4.500, 5.000),
    (5.000, 5.000),
]

PRICE_POINTS = [
    (0.000, 1.3890), (0.500, 1.1500), (1.000, 1.0000), (1.500, 0.9223), (2.000, 0.8870),
    (2.500, 0.8560), (3.000, 0.8332), (3.500, 0.8083), (4.000, 0.8000), (4.500, 0.8000),
    (5.000, 0.8000),
]

# Approximates a Phillips curve: double today's underutilisation rate -> 79.6% income
THETA_POINTS = [
    (0.000, 1.359), (0.500, 1.152), (1.000, 1.000), (1.500, 0.876), (2.000, 0.796),
    (2.500, 0.748), (3.000, 0.705), (3.500, 0.676), (4.000, 0.648), (4.500, 0.631),
    (5.000, 0.612),
]


@dataclass(frozen=True)
class ConverterSet:
    """The four converters used by one simulation."""
    eta: TableFunction
    mfp: TableFunction
    prices: TableFunction
    theta: TableFunction

    # config section suffix -> attribute
    SECTIONS = ("eta", "mfp", "prices", "theta")

    def replace(self, **tables: TableFunction) -> "ConverterSet":
        current = self.to_dict()
        for key, table in tables.items():
            if key not in current:
                raise InputError(f"unknown converter '{key}'")
            current[key] = table
        return ConverterSet(**current)

    def with_eta_scale(self, factor: float) -> "ConverterSet":
        return self.replace(eta=self.eta.scaled(factor))

    def to_dict(self) -> Dict[str, TableFunction]:
        return {name: getattr(self, name) for name in self.SECTIONS}


DEFAULT_CONVERTERS = ConverterSet(
    eta=TableFunction.from_points("eta", ETA_POINTS),
    mfp=TableFunction.from_points("mfp", MFP_POINTS),
    prices=TableFunction.from_points("prices", PRICE_POINTS),
    theta=TableFunction.from_points("theta", THETA_POINTS),
)
