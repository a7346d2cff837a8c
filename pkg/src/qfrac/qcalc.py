"""Jackson q-integration, the q-derivative, q-lattices, and the sup norm.

A ScalarFunction is any deterministic callable real -> real, evaluable on the
q-lattice of its domain. Callers supplying functions used concurrently must
make them re-entrant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .errors import ConvergenceError, DomainError
from .qcore import DEFAULT_INTEGRATION_CTRL, SeriesControl

__all__ = [
    "ScalarFunction",
    "QLattice",
    "q_derivative",
    "jackson_integral_zero",
    "jackson_integral",
    "sup_norm",
]

ScalarFunction = Callable[[float], float]


@dataclass(frozen=True)
class QLattice:
    """Geometric lattice {b q**k : k < depth} intersected with (floor_a, b]."""

    b: float
    q: float
    depth: int
    floor_a: float = 0.0

    def __post_init__(self):
        if not self.b > 0.0:
            raise DomainError(f"b must be positive, got {self.b}")
        if not 0.0 < self.q < 1.0:
            raise DomainError(f"q must lie in (0, 1), got {self.q}")
        if self.depth < 1:
            raise DomainError(f"depth must be >= 1, got {self.depth}")
        if not 0.0 <= self.floor_a < self.b:
            raise DomainError(
                f"floor_a must satisfy 0 <= floor_a < b, got {self.floor_a}"
            )

    @property
    def nodes(self) -> list[float]:
        """Nodes b q**k, strictly decreasing, restricted to (floor_a, b]."""
        out = []
        for k in range(self.depth):
            x = self.b * self.q**k
            if x <= self.floor_a:
                break
            out.append(x)
        return out


def q_derivative(f: ScalarFunction, x: float, q: float) -> float:
    """D_q f(x) = (f(x) - f(qx)) / ((1 - q) x), for x > 0."""
    if not 0.0 < q < 1.0:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    if not x > 0.0:
        raise DomainError(f"q-derivative needs x > 0, got {x}")
    return (f(x) - f(q * x)) / ((1.0 - q) * x)


def jackson_integral_zero(f: ScalarFunction, b: float, q: float,
                          ctrl: SeriesControl = DEFAULT_INTEGRATION_CTRL) -> float:
    """Jackson integral (1-q) b sum_i q**i f(q**i b) over [0, b].

    Stops once |term| < max(abs_tol, rel_tol |partial|) for consecutive_small
    successive terms; raises ConvergenceError at max_terms.
    """
    if not 0.0 < q < 1.0:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    if not b > 0.0:
        raise DomainError(f"b must be positive, got {b}")
    scale = (1.0 - q) * b
    total = 0.0
    small = 0
    qi = 1.0
    for i in range(ctrl.max_terms):
        term = scale * qi * f(qi * b)
        total += term
        qi *= q
        if abs(term) < max(ctrl.abs_tol, ctrl.rel_tol * abs(total)):
            small += 1
            if small >= ctrl.consecutive_small:
                return total
        else:
            small = 0
    raise ConvergenceError(
        f"Jackson integral on [0, {b}] did not meet its stopping rule within "
        f"{ctrl.max_terms} terms"
    )


def jackson_integral(f: ScalarFunction, a: float, b: float, q: float,
                     ctrl: SeriesControl = DEFAULT_INTEGRATION_CTRL) -> float:
    """Jackson integral over [a, b], as the difference of zero-based integrals."""
    if a < 0.0:
        raise DomainError(f"a must be nonnegative, got {a}")
    if a == b:
        return 0.0
    if a > b:
        raise DomainError(f"need a <= b, got a={a}, b={b}")
    total = jackson_integral_zero(f, b, q, ctrl)
    if a > 0.0:
        total -= jackson_integral_zero(f, a, q, ctrl)
    return total


def sup_norm(f: ScalarFunction, lattice: QLattice) -> float:
    """max |f| over the lattice nodes (base node b included)."""
    return max(abs(f(x)) for x in lattice.nodes)
