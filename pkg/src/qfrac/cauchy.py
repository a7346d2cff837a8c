"""Picard successive-approximation solver for the Caputo q-fractional Cauchy
problem

    cD^alpha u(t) = f(t, u(t)),  a < t < b,   u(a) = zeta,

together with the a-priori convergence bound and the q-Mittag-Leffler series
oracle for the f(t, u) = u example.

Iterates live on a geometric node table {b q**k} deep enough that every
Jackson sum the iteration needs is closed under multiplication by q; below
the lower limit a the iterates extend by the constant zeta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ConvergenceError,
    DomainError,
    MissingLipschitzError,
    TrustRegionError,
)
from .operators import FracOrder, _kernel_weights, _sum_length
from .qcalc import QLattice
from .qcore import (
    DEFAULT_INTEGRATION_CTRL,
    QParams,
    SeriesControl,
    q_gamma,
    q_number,
    q_power_general,
)

__all__ = [
    "CauchyProblem",
    "SolverReport",
    "solver_nodes",
    "picard_iterate",
    "solve",
    "apriori_bound",
    "q_mittag_leffler",
    "estimate_lipschitz",
]

Rhs = Callable[[float, float], float]


@dataclass(frozen=True)
class CauchyProblem:
    """Problem specification: rhs f(t, u), interval [a, b], initial value
    zeta, fractional order, deformation pair, optional Lipschitz constant,
    and trust-region radius r (|u - zeta| <= r)."""

    rhs: Rhs
    a: float
    b: float
    zeta: float
    order: FracOrder
    params: QParams
    lipschitz_A: float | None = None
    radius_r: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.a < self.b:
            raise DomainError(f"need 0 <= a < b, got a={self.a}, b={self.b}")
        if not self.radius_r > 0.0:
            raise DomainError(f"radius_r must be positive, got {self.radius_r}")
        if self.lipschitz_A is not None and not self.lipschitz_A > 0.0:
            raise DomainError(
                f"lipschitz_A must be positive, got {self.lipschitz_A}")


@dataclass
class SolverReport:
    """Full diagnostic output of one solve."""

    lattice: QLattice
    iterates: list[list[float]]
    residuals: list[float]
    apriori_bounds: list[float]
    converged: bool
    iterations_used: int
    k_estimate: float
    bound_slack: float = 0.0

    @property
    def solution(self) -> list[float]:
        """Final iterate on the report lattice nodes."""
        return self.iterates[-1]


def solver_nodes(problem: CauchyProblem,
                 ctrl: SeriesControl = DEFAULT_INTEGRATION_CTRL) -> np.ndarray:
    """Deep node table {b q**k} closed (to truncation depth) under
    multiplication by q, so every Jackson sum the iteration needs stays on
    the table."""
    q, p = problem.params.q, problem.params.p
    depth = _sum_length(q, p, ctrl)
    return problem.b * np.power(q, np.arange(depth))


class _PicardEngine:
    """Precomputed kernel weights and below-floor contributions for one
    problem; applies one Picard step to a node-value table."""

    def __init__(self, problem: CauchyProblem, ctrl: SeriesControl):
        self.problem = problem
        self.ctrl = ctrl
        self.nodes = solver_nodes(problem, ctrl)
        q, p = problem.params.q, problem.params.p
        alpha = problem.order.alpha
        Q = problem.params.qp
        n = len(self.nodes)
        self.active = self.nodes > problem.a
        self.coef = q_number(p, q) ** (1.0 - alpha) / q_gamma(alpha, Q)
        # Jackson weights q**i k_i for the upper, on-lattice sum (c = q**p).
        k = np.asarray(_kernel_weights(Q, alpha - 1.0, Q, n,
                                       ctrl.abs_tol, ctrl.max_terms))
        self.weights = np.power(q, np.arange(n)) * k
        self.node_head = ((1.0 - q)
                          * np.power(self.nodes, 1.0 + p * (alpha - 1.0)))
        # The subtracted int_0^a sum only sees the constant-zeta extension,
        # so it is fixed across iterations.
        self.lower = np.zeros(n)
        if problem.a > 0.0:
            a = problem.a
            g = np.empty(n)
            qi = 1.0
            for i in range(n):
                w = a * qi
                g[i] = qi * w ** (p - 1.0) * problem.rhs(w, problem.zeta)
                qi *= q
            for idx in np.nonzero(self.active)[0]:
                t = self.nodes[idx]
                c = (a * q / t) ** p
                k_low = np.asarray(_kernel_weights(Q, alpha - 1.0, c, n,
                                                   ctrl.abs_tol,
                                                   ctrl.max_terms))
                self.lower[idx] = ((1.0 - q) * a * t ** (p * (alpha - 1.0))
                                   * float(np.dot(g, k_low)))

    def step(self, prev: np.ndarray) -> np.ndarray:
        problem = self.problem
        p = problem.params.p
        n = len(self.nodes)
        over = np.abs(prev - problem.zeta) > problem.radius_r
        if np.any(over):
            idx = int(np.nonzero(over)[0][0])
            raise TrustRegionError(float(self.nodes[idx]), float(prev[idx]))
        g = np.empty(n)
        for j in range(n):
            w = float(self.nodes[j])
            u = problem.zeta if not self.active[j] else float(prev[j])
            g[j] = w ** (p - 1.0) * problem.rhs(w, u)
        out = np.full(n, problem.zeta)
        for idx in np.nonzero(self.active)[0]:
            upper = self.node_head[idx] * float(
                np.dot(self.weights[: n - idx], g[idx:]))
            out[idx] = problem.zeta + self.coef * (upper - self.lower[idx])
        return out


def picard_iterate(prev: Sequence[float], problem: CauchyProblem,
                   ctrl: SeriesControl = DEFAULT_INTEGRATION_CTRL) -> np.ndarray:
    """One Picard step: phi_next(t) = zeta + J^alpha f(., phi_prev)(t) on the
    solver_nodes table. prev must be given on that same table."""
    engine = _PicardEngine(problem, ctrl)
    prev = np.asarray(prev, dtype=float)
    if prev.shape != engine.nodes.shape:
        raise DomainError(
            f"prev has {prev.shape[0] if prev.ndim == 1 else '?'} values, "
            f"expected one per solver node ({len(engine.nodes)})"
        )
    return engine.step(prev)


def solve(problem: CauchyProblem, lattice: QLattice, tol: float = 1e-10,
          max_iter: int = 50,
          ctrl: SeriesControl = DEFAULT_INTEGRATION_CTRL) -> SolverReport:
    """Iterate phi_1 = zeta, phi_{n+1} = zeta + J^alpha f(., phi_n) until the
    sup-norm residual over the report lattice drops below tol.

    Never returns a silent partial answer: the report's converged flag is
    False when max_iter is exhausted.
    """
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise DomainError(f"max_iter must be >= 1, got {max_iter}")
    if not math.isclose(lattice.b, problem.b, rel_tol=1e-12):
        raise DomainError("lattice base must equal the problem horizon b")
    if not math.isclose(lattice.floor_a, problem.a, rel_tol=1e-12,
                        abs_tol=1e-300):
        raise DomainError("lattice floor must equal the problem lower limit a")

    engine = _PicardEngine(problem, ctrl)
    report_idx = [i for i, w in enumerate(engine.nodes)
                  if w > problem.a][: len(lattice.nodes)]

    k_est = _estimate_sup_rhs(problem, lattice)
    a_const = problem.lipschitz_A
    if a_const is None:
        a_const = max(estimate_lipschitz(problem.rhs, problem), 1e-300)
    bound_problem = replace(problem, lipschitz_A=a_const)

    phi = np.full(len(engine.nodes), problem.zeta)
    iterates = [[float(phi[i]) for i in report_idx]]
    residuals: list[float] = []
    bounds: list[float] = []
    converged = False
    iterations = 0
    for n in range(1, max_iter + 1):
        phi_next = engine.step(phi)
        residual = float(np.max(np.abs(phi_next[report_idx]
                                       - phi[report_idx])))
        residuals.append(residual)
        bounds.append(apriori_bound(n, problem.b, bound_problem, k_est, ctrl))
        iterates.append([float(phi_next[i]) for i in report_idx])
        phi = phi_next
        iterations = n
        if residual < tol:
            converged = True
            break

    slack = 0.0
    for r, bd in zip(residuals, bounds):
        if bd > 0.0:
            slack = max(slack, r / bd - 1.0)
        elif r > 0.0:
            slack = math.inf
    return SolverReport(
        lattice=lattice,
        iterates=iterates,
        residuals=residuals,
        apriori_bounds=bounds,
        converged=converged,
        iterations_used=iterations,
        k_estimate=k_est,
        bound_slack=max(slack, 0.0),
    )


def _estimate_sup_rhs(problem: CauchyProblem, lattice: QLattice,
                      u_samples: int = 17) -> float:
    """Sampled sup of |f| over lattice nodes x a trust-region grid; a lower
    estimate of the theorem's constant K, reported as a diagnostic."""
    us = np.linspace(problem.zeta - problem.radius_r,
                     problem.zeta + problem.radius_r, u_samples)
    best = 0.0
    for w in [problem.a] + lattice.nodes if problem.a > 0.0 else lattice.nodes:
        for u in us:
            best = max(best, abs(problem.rhs(float(w), float(u))))
    return best


def apriori_bound(n: int, t: float, problem: CauchyProblem, K: float,
                  ctrl: SeriesControl = DEFAULT_INTEGRATION_CTRL) -> float:
    """Induction bound on |phi_{n+1} - phi_n|:  C(t)**n A**(n-1) K with

    C(t) = ([p]_q)**(1-alpha) / ([p alpha]_q Gamma_Q(alpha))
           * (t**p - a**p)^(alpha).
    """
    if n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    if K < 0.0:
        raise DomainError(f"K must be nonnegative, got {K}")
    if problem.lipschitz_A is None:
        raise MissingLipschitzError(
            "apriori_bound needs problem.lipschitz_A; supply one or use "
            "estimate_lipschitz"
        )
    q, p = problem.params.q, problem.params.p
    alpha = problem.order.alpha
    c = (q_number(p, q) ** (1.0 - alpha)
         / (q_number(p * alpha, q) * q_gamma(alpha, problem.params.qp))
         * q_power_general(t, problem.a, alpha, problem.params))
    return c**n * problem.lipschitz_A ** (n - 1) * K


def q_mittag_leffler(x: float, m: int, order: FracOrder, params: QParams,
                     ctrl: SeriesControl = DEFAULT_INTEGRATION_CTRL) -> float:
    """Partial sum sum_{n=0}^{m} ([p]_q)**(-n alpha) / Gamma_Q(n alpha + 1)
    * x**(p n alpha); the series solution of cD^alpha u = u, u(0) = 1."""
    if m < 0:
        raise DomainError(f"m must be nonnegative, got {m}")
    if x < 0.0:
        raise DomainError(f"x must be nonnegative, got {x}")
    alpha = order.alpha
    q, p = params.q, params.p
    Q = params.qp
    pq = q_number(p, q)
    total = 0.0
    for n in range(m + 1):
        if n == 0:
            total += 1.0
        else:
            total += (pq ** (-n * alpha) / q_gamma(n * alpha + 1.0, Q)
                      * x ** (p * n * alpha))
    return total


def estimate_lipschitz(rhs: Rhs, problem: CauchyProblem,
                       samples: int = 64) -> float:
    """Sampled difference-quotient estimate of the Lipschitz constant of
    u -> rhs(w, u) over [a, b] x [zeta - r, zeta + r].

    A lower estimate of the true constant, never a certificate.
    """
    if samples < 2:
        raise DomainError(f"samples must be >= 2, got {samples}")
    q = problem.params.q
    ws = [problem.b * q**k for k in range(samples)]
    ws = [w for w in ws if w > problem.a] + (
        [problem.a] if problem.a > 0.0 else [])
    rng = np.random.default_rng(0)
    lo = problem.zeta - problem.radius_r
    hi = problem.zeta + problem.radius_r
    best = 0.0
    for w in ws:
        ys = rng.uniform(lo, hi, size=2 * samples)
        for y1, y2 in zip(ys[::2], ys[1::2]):
            if y1 == y2:
                continue
            best = max(best, abs(rhs(w, float(y1)) - rhs(w, float(y2)))
                       / abs(y1 - y2))
    return best
