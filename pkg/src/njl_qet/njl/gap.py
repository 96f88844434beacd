"""Continuum mean-field gap equation in 1+1 dimensions.

After Wick rotation and integrating the Euclidean frequency over the real
line, a symmetric cutoff on the spatial momentum gives

    <psibar psi>(m) = -(m / pi) * asinh(Lambda / m)

(two spinor components, |p| < Lambda).  The dynamical mass solves
m = m0 - G <psibar psi>(m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ..errors import ConvergenceError


@dataclass(frozen=True)
class ContinuumParams:
    m0: float = 0.0
    G: float = 0.0
    Lambda: float = 10.0
    tol: float = 1e-12
    max_iter: int = 500
    damping: float = 0.5

    def __post_init__(self):
        if not self.Lambda > 0:
            raise ValueError("Lambda must be positive")
        if self.G < 0:
            raise ValueError("G must be non-negative")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")


def condensate(m: float, Lambda: float) -> float:
    if m == 0.0:
        return 0.0
    return -(m / math.pi) * math.asinh(Lambda / abs(m))


def condensate_quadrature(m: float, Lambda: float) -> float:
    """Same quantity by direct 2D quadrature of the Euclidean loop integral.

    -2 m * int d^2p_E / (2 pi)^2  1 / (p_E^2 + m^2), with |p_1| < Lambda and
    p_0 over the real line.  Independent of the closed form above.
    """
    if m == 0.0:
        return 0.0
    m2 = m * m

    # p0 = a * s with a = sqrt(p1^2 + m^2) turns the p0 integral into a pure number
    ring, _ = integrate.quad(lambda s: 1.0 / (s * s + 1.0), 0.0, np.inf,
                             epsabs=0.0, epsrel=1e-13)

    def inner(p1):
        return 2.0 * ring / math.sqrt(p1 * p1 + m2)

    brk = [min(abs(m), Lambda / 2)]
    total, _ = integrate.quad(inner, 0.0, Lambda, points=brk, epsabs=0.0, epsrel=1e-13,
                              limit=200)
    return -2.0 * m * 2.0 * total / (2.0 * math.pi) ** 2


def gap_function(m: float, p: ContinuumParams) -> float:
    """Zero at a solution: m - m0 + G <psibar psi>(m)."""
    return m - p.m0 + p.G * condensate(m, p.Lambda)


def vacuum_energy(m: float, p: ContinuumParams) -> float:
    """Mean-field vacuum energy density whose stationary points solve the gap equation."""
    L = p.Lambda
    sea = 0.5 * (L * math.hypot(L, m) + (m * m * math.asinh(L / abs(m)) if m else 0.0))
    aux = (m - p.m0) ** 2 / (2.0 * p.G) if p.G > 0 else 0.0
    return aux - sea / math.pi


def _iterate(m: float, p: ContinuumParams) -> tuple[float, list[float]]:
    history = []
    for _ in range(p.max_iter):
        target = p.m0 - p.G * condensate(m, p.Lambda)
        m_new = (1.0 - p.damping) * m + p.damping * target
        step = abs(m_new - m)
        history.append(step)
        m = m_new
        if step < p.tol:
            return m, history
    raise ConvergenceError(f"gap iteration did not converge in {p.max_iter} steps",
                           residual=history[-1], history=history)


def solve_gap_equation(p: ContinuumParams) -> float:
    """Dynamical mass from damped fixed-point iteration.

    With G = 0 the answer is m0.  Otherwise iteration starts from both
    +Lambda and (when m0 = 0) the trivial point m = 0; among the fixed points
    found, the one with the lowest mean-field vacuum energy is returned.
    """
    if p.G == 0.0:
        return float(p.m0)
    candidates = []
    if p.m0 == 0.0:
        candidates.append(0.0)
    start = p.Lambda if p.m0 >= 0 else -p.Lambda
    m, _ = _iterate(start, p)
    candidates.append(m)
    return float(min(candidates, key=lambda c: vacuum_energy(c, p)))
