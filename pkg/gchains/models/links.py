"""Response functions: psi for BKF mixtures and phi for autoregressive kernels.

Both are antisymmetric around 1/2 (f(r) + f(-r) = 1) and nondecreasing.
Tabulated variants are specified on r >= 0 and extended by antisymmetry.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from gchains.config import Config
from gchains.errors import ModelError

_GRID = np.linspace(-1.0, 1.0, 2001)


def _check_table(points, values, what: str) -> tuple:
    points = tuple(float(p) for p in points)
    values = tuple(float(v) for v in values)
    if len(points) != len(values) or len(points) < 2:
        raise ModelError(f"{what}: points and values need equal length >= 2")
    if points[0] != 0.0 or values[0] != 0.5:
        raise ModelError(f"{what}: table must start at (0, 0.5)")
    if any(b <= a for a, b in zip(points, points[1:])):
        raise ModelError(f"{what}: points must be strictly increasing")
    return points, values


def _antisymmetric_interp(r, points, values) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    upper = np.interp(np.abs(r), points, values)
    return np.where(r >= 0, upper, 1.0 - upper)


# BKF responses on [-1, 1]

class Psi(ABC):
    """Nondecreasing response with psi(r) + psi(-r) = 1 and range [eps, 1 - eps]."""

    kind = 'abstract'

    @property
    @abstractmethod
    def eps(self) -> float:
        ...

    @abstractmethod
    def __call__(self, r) -> np.ndarray:
        ...

    @abstractmethod
    def to_spec(self) -> dict:
        ...

    def check(self):
        """Validate antisymmetry, monotonicity and range on a grid of [-1, 1]."""
        eps = self.eps
        if not 0.0 < eps < 0.5:
            raise ModelError(f"psi: eps must lie in (0, 1/2), got {eps}")
        values = self(_GRID)
        mirrored = self(-_GRID)
        if np.max(np.abs(values + mirrored - 1.0)) > Config.PROB_TOL:
            raise ModelError("psi: psi(r) + psi(-r) != 1")
        if np.any(np.diff(values) < -Config.PROB_TOL):
            raise ModelError("psi: not nondecreasing")
        if values.min() < eps - Config.PROB_TOL or values.max() > 1.0 - eps + Config.PROB_TOL:
            raise ModelError(f"psi: range leaves [{eps}, {1 - eps}]")


@dataclass(frozen=True)
class StepPsi(Psi):
    epsilon: float
    kind = 'step'

    @property
    def eps(self) -> float:
        return self.epsilon

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return np.where(r > 0, 1.0 - self.epsilon, np.where(r < 0, self.epsilon, 0.5))

    def to_spec(self) -> dict:
        return {'kind': 'step', 'eps': self.epsilon}


@dataclass(frozen=True)
class LinearPsi(Psi):
    epsilon: float
    kind = 'linear'

    @property
    def eps(self) -> float:
        return self.epsilon

    def __call__(self, r) -> np.ndarray:
        return 0.5 + (0.5 - self.epsilon) * np.asarray(r, dtype=float)

    def to_spec(self) -> dict:
        return {'kind': 'linear', 'eps': self.epsilon}


@dataclass(frozen=True)
class TabulatedPsi(Psi):
    points: tuple
    values: tuple
    kind = 'tabulated'

    def __post_init__(self):
        points, values = _check_table(self.points, self.values, 'psi')
        if points[-1] != 1.0:
            raise ModelError("psi: table must end at r = 1")
        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'values', values)

    @property
    def eps(self) -> float:
        return 1.0 - self.values[-1]

    def __call__(self, r) -> np.ndarray:
        return _antisymmetric_interp(r, self.points, self.values)

    def max_slope(self) -> float:
        return max((v1 - v0) / (p1 - p0) for p0, p1, v0, v1 in
                   zip(self.points, self.points[1:], self.values, self.values[1:]))

    def to_spec(self) -> dict:
        return {'kind': 'tabulated', 'points': list(self.points), 'values': list(self.values)}


def psi_from_spec(doc: dict) -> Psi:
    kind = doc.get('kind')
    if kind == 'step':
        psi = StepPsi(float(doc['eps']))
    elif kind == 'linear':
        psi = LinearPsi(float(doc['eps']))
    elif kind == 'tabulated':
        psi = TabulatedPsi(tuple(doc['points']), tuple(doc['values']))
    else:
        raise ModelError(f"psi: unknown kind {kind!r} (step, linear, tabulated)")
    psi.check()
    return psi


# Autoregressive links on the real line

class Link(ABC):
    """Strictly increasing phi with phi(r) + phi(-r) = 1."""

    kind = 'abstract'

    @abstractmethod
    def __call__(self, r) -> np.ndarray:
        ...

    @abstractmethod
    def slope_bounds(self, radius: float) -> tuple:
        """(L_lo, L_hi) bounds on phi' over [-radius, radius]."""

    @abstractmethod
    def max_increment(self, b: float) -> float:
        """Upper bound on sup_h phi(h + b) - phi(h - b) for b >= 0."""

    @abstractmethod
    def to_spec(self):
        ...

    def bilipschitz_constant(self, radius: float) -> float:
        """gamma_phi with 2 L_lo >= 1/gamma_phi and 2 L_hi <= gamma_phi."""
        lo, hi = self.slope_bounds(radius)
        return max(2.0 * hi, 1.0 / (2.0 * lo))

    def check(self, radius: float = 1.0):
        grid = _GRID * radius
        values = self(grid)
        if np.max(np.abs(values + self(-grid) - 1.0)) > Config.PROB_TOL:
            raise ModelError("link: phi(r) + phi(-r) != 1")
        if np.any(np.diff(values) <= 0):
            raise ModelError("link: not strictly increasing")


@dataclass(frozen=True)
class Logit(Link):
    """phi(r) = 1 / (1 + exp(-2r))."""
    kind = 'logit'

    def __call__(self, r) -> np.ndarray:
        return expit(2.0 * np.asarray(r, dtype=float))

    def slope_bounds(self, radius: float) -> tuple:
        edge = float(self(radius))
        return 2.0 * edge * (1.0 - edge), 0.5

    def max_increment(self, b: float) -> float:
        # attained at h = 0
        return float(np.tanh(abs(b)))

    def to_spec(self):
        return 'logit'


@dataclass(frozen=True)
class TabulatedLink(Link):
    """Piecewise linear phi from nodes on r >= 0; must cover the field range."""
    points: tuple
    values: tuple
    kind = 'tabulated'

    def __post_init__(self):
        points, values = _check_table(self.points, self.values, 'link')
        if values[-1] >= 1.0:
            raise ModelError("link: values must stay below 1")
        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'values', values)

    def __call__(self, r) -> np.ndarray:
        return _antisymmetric_interp(r, self.points, self.values)

    def _slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.points)

    def slope_bounds(self, radius: float) -> tuple:
        if radius > self.points[-1]:
            raise ModelError(f"link: table ends at {self.points[-1]} but the field reaches {radius}")
        slopes = self._slopes()
        used = np.asarray(self.points[:-1]) < max(radius, self.points[1])
        return float(slopes[used].min()), float(slopes[used].max())

    def max_increment(self, b: float) -> float:
        return float(min(2.0 * abs(b) * self._slopes().max(), 1.0))

    def to_spec(self):
        return {'kind': 'tabulated', 'points': list(self.points), 'values': list(self.values)}


def link_from_spec(doc) -> Link:
    if doc in (None, 'logit') or (isinstance(doc, dict) and doc.get('kind') == 'logit'):
        return Logit()
    if isinstance(doc, dict) and doc.get('kind') == 'tabulated':
        link = TabulatedLink(tuple(doc['points']), tuple(doc['values']))
        link.check(radius=link.points[-1])
        return link
    raise ModelError(f"link: unknown link {doc!r} (logit, tabulated)")
