"""Classical maximum-entropy solver under ordinary expectation constraints.

Maximizes the measure entropy -sum p_k ln(p_k) mu_k subject to
sum u_m(x_k) p_k mu_k = t_m.  The maximizer is the Gibbs density
p_k = exp(-sum_m beta_m u_m(x_k)) / Z(beta); the normalization multiplier is
absorbed into log Z analytically, so the solver works in the M-dimensional
dual: minimize the smooth convex function log Z(beta) + beta . t by damped
Newton (gradient t - E[u], curvature the moment covariance).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .entropy import shannon_entropy
from .measure import (
    DensityVector,
    ProbabilityVector,
    WeightedPartition,
    induced_pmf,
)
from .qcalc import DeformationIndex, as_index

__all__ = [
    "InfeasibleError",
    "ConvergenceError",
    "ConstraintSet",
    "GibbsSolution",
    "partition_function",
    "solve_maxent",
    "thermo_residuals",
]


class InfeasibleError(ValueError):
    """Targets outside the strict interior of the moment polytope."""


class ConvergenceError(RuntimeError):
    """Iteration cap reached; carries the last residual for diagnostics."""

    def __init__(self, message: str, residual_norm: float, iterations: int):
        super().__init__(message)
        self.residual_norm = residual_norm
        self.iterations = iterations


@dataclass(frozen=True, eq=False)
class ConstraintSet:
    """Observables u_m with prescribed expectations t_m.

    kind selects the expectation: "ordinary" (plain mean) or "escort"
    (normalized q-expectation, used by the Tsallis solver; requires q).
    """

    functions: tuple
    targets: np.ndarray
    kind: str = "ordinary"
    q: DeformationIndex | None = None

    def __post_init__(self) -> None:
        funcs = tuple(np.asarray(u, dtype=float) for u in self.functions)
        object.__setattr__(self, "functions", funcs)
        targets = np.atleast_1d(np.asarray(self.targets, dtype=float))
        object.__setattr__(self, "targets", targets)
        if targets.ndim != 1 or targets.size != len(funcs):
            raise ValueError(
                f"targets: need one target per function, got {targets.size} "
                f"targets for {len(funcs)} functions"
            )
        if np.any(~np.isfinite(targets)):
            raise ValueError("targets: must be finite")
        for m, u in enumerate(funcs):
            if u.ndim != 1 or u.size == 0:
                raise ValueError(f"functions[{m}]: need a nonempty 1-d value list")
            if np.any(~np.isfinite(u)):
                raise ValueError(f"functions[{m}]: values must be finite")
            if u.size != funcs[0].size:
                raise ValueError(
                    f"functions[{m}]: length {u.size} differs from functions[0] "
                    f"length {funcs[0].size}"
                )
            if not (float(np.min(u)) <= targets[m] <= float(np.max(u))):
                raise ValueError(
                    f"targets[{m}]: {targets[m]!r} lies outside the attainable "
                    f"range [{float(np.min(u))!r}, {float(np.max(u))!r}]"
                )
        if self.kind not in ("ordinary", "escort"):
            raise ValueError(f"kind: expected 'ordinary' or 'escort', got {self.kind!r}")
        if self.kind == "escort":
            if self.q is None:
                raise ValueError("q: escort constraints require a deformation index")
            object.__setattr__(self, "q", as_index(self.q))
        elif self.q is not None:
            raise ValueError("q: ordinary constraints take no deformation index")

    @property
    def size(self) -> int:
        return len(self.functions)

    @property
    def cell_count(self) -> int | None:
        return self.functions[0].size if self.functions else None

    def feature_matrix(self, cells: int) -> np.ndarray:
        if self.functions and self.functions[0].size != cells:
            raise ValueError(
                f"functions: value lists have {self.functions[0].size} entries "
                f"but the partition has {cells} cells"
            )
        if not self.functions:
            return np.empty((0, cells), dtype=float)
        return np.vstack(self.functions)

    def with_targets(self, targets) -> "ConstraintSet":
        return ConstraintSet(self.functions, targets, self.kind, self.q)


@dataclass(frozen=True, eq=False)
class GibbsSolution:
    """Converged classical MaxEnt output.

    entropy always equals log_z + beta . achieved_moments up to rounding;
    that identity is re-checked downstream rather than assumed.
    """

    constraints: ConstraintSet
    partition: WeightedPartition
    beta: np.ndarray
    log_z: float
    density: DensityVector
    achieved_moments: np.ndarray
    entropy: float
    residual_norm: float
    iterations: int

    @property
    def pmf(self) -> ProbabilityVector:
        return induced_pmf(self.density)


def _gibbs_masses(beta: np.ndarray, U: np.ndarray, weights: np.ndarray):
    """log Z and normalized masses over the support cells only."""
    support = weights > 0.0
    exponent = -(beta @ U[:, support]) if U.size else np.zeros(int(support.sum()))
    log_z = float(logsumexp(exponent, b=weights[support]))
    masses = np.exp(exponent - log_z) * weights[support]
    return log_z, masses, support


def partition_function(
    beta, constraints: ConstraintSet, partition: WeightedPartition
) -> float:
    """log of sum_k exp(-sum_m beta_m u_m(x_k)) mu_k, max-shifted for safety."""
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    if beta.size != constraints.size or np.any(~np.isfinite(beta)):
        raise ValueError(
            f"beta: need {constraints.size} finite multipliers, got {beta!r}"
        )
    U = constraints.feature_matrix(len(partition))
    log_z, _, _ = _gibbs_masses(beta, U, partition.weights)
    return log_z


def _check_interior(U: np.ndarray, targets: np.ndarray, support: np.ndarray) -> None:
    for m in range(U.shape[0]):
        u = U[m, support]
        lo, hi = float(np.min(u)), float(np.max(u))
        if not (lo < targets[m] < hi):
            raise InfeasibleError(
                f"targets[{m}]: {targets[m]!r} is not strictly inside the "
                f"attainable range ({lo!r}, {hi!r}) on the support; the "
                f"maximizer would be a degenerate limit"
            )


def solve_maxent(
    constraints: ConstraintSet,
    partition: WeightedPartition,
    tolerance: float = 1e-10,
    max_iterations: int = 200,
) -> GibbsSolution:
    """Damped Newton on the convex dual, beta = 0 start, moment-residual stop."""
    if constraints.kind != "ordinary":
        raise ValueError(
            f"constraints: kind must be 'ordinary' for the classical solver, "
            f"got {constraints.kind!r}"
        )
    if not (0.0 < tolerance < 1.0):
        raise ValueError(f"tolerance: need a value in (0, 1), got {tolerance!r}")
    if max_iterations < 1:
        raise ValueError(f"max_iterations: need at least 1, got {max_iterations!r}")
    weights = partition.weights
    U = constraints.feature_matrix(len(partition))
    targets = constraints.targets
    M = constraints.size
    support = weights > 0.0
    if M:
        _check_interior(U, targets, support)

    def dual(b: np.ndarray) -> float:
        exponent = -(b @ U[:, support]) if M else np.zeros(int(support.sum()))
        return float(logsumexp(exponent, b=weights[support]) + b @ targets)

    beta = np.zeros(M)
    residual_norm = math.inf
    iterations = 0
    for iterations in range(max_iterations + 1):
        log_z, masses, _ = _gibbs_masses(beta, U, weights)
        moments = U[:, support] @ masses if M else np.zeros(0)
        residual = moments - targets
        residual_norm = float(np.max(np.abs(residual))) if M else 0.0
        if residual_norm <= tolerance:
            break
        if iterations == max_iterations:
            raise ConvergenceError(
                f"solve_maxent: moment residual {residual_norm!r} above tolerance "
                f"{tolerance!r} after {max_iterations} iterations",
                residual_norm,
                iterations,
            )
        centered = U[:, support] - moments[:, None]
        hessian = centered @ (centered * masses).T
        try:
            step = np.linalg.solve(hessian, residual)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hessian, residual, rcond=None)[0]
        # non-strict comparison: near the flat minimum the full Newton step
        # is correct even when the dual no longer visibly decreases
        base = dual(beta)
        scale = 1.0
        for _ in range(60):
            trial = beta + scale * step
            if dual(trial) <= base:
                break
            scale *= 0.5
        beta = beta + scale * step

    values = np.zeros(len(partition))
    exponent = -(beta @ U[:, support]) if M else np.zeros(int(support.sum()))
    values[support] = np.exp(exponent - log_z)
    density = DensityVector(values, partition)
    entropy = shannon_entropy(density)
    return GibbsSolution(
        constraints=constraints,
        partition=partition,
        beta=beta,
        log_z=log_z,
        density=density,
        achieved_moments=moments,
        entropy=entropy,
        residual_norm=residual_norm,
        iterations=iterations,
    )


def thermo_residuals(
    solution: GibbsSolution,
    constraints: ConstraintSet | None = None,
    partition: WeightedPartition | None = None,
    fd_step: float = 1e-4,
):
    """Finite-difference checks of the two thermodynamic identities.

    grad_residual[m]:        |d(log Z)/d(beta_m) + <u_m>|   (central difference)
    sensitivity_residual[m]: |dS/d(t_m) - beta_m|           (re-solve at t +- h)

    The sensitivity sign follows from S(t) = log Z(beta(t)) + beta(t) . t and
    the envelope theorem: dS/dt_m = beta_m for the Gibbs form used here.
    """
    constraints = solution.constraints if constraints is None else constraints
    partition = solution.partition if partition is None else partition
    if not (0.0 < fd_step < 1.0):
        raise ValueError(f"fd_step: need a value in (0, 1), got {fd_step!r}")
    M = constraints.size
    grad_residual = np.zeros(M)
    sensitivity_residual = np.zeros(M)
    targets = constraints.targets

    def entropy_at(m: int, value: float) -> float:
        shifted = targets.copy()
        shifted[m] = value
        return solve_maxent(
            constraints.with_targets(shifted), partition, tolerance=1e-12
        ).entropy

    for m in range(M):
        unit = np.zeros(M)
        unit[m] = 1.0
        log_plus = partition_function(solution.beta + fd_step * unit, constraints, partition)
        log_minus = partition_function(solution.beta - fd_step * unit, constraints, partition)
        grad_fd = (log_plus - log_minus) / (2.0 * fd_step)
        grad_residual[m] = abs(grad_fd + solution.achieved_moments[m])

        step = fd_step
        try:
            s_plus = entropy_at(m, targets[m] + step)
            s_minus = entropy_at(m, targets[m] - step)
        except ValueError:
            # shifted target left the attainable range or its interior;
            # retry once with a tenth of the step
            step = fd_step / 10.0
            s_plus = entropy_at(m, targets[m] + step)
            s_minus = entropy_at(m, targets[m] - step)
        sens_fd = (s_plus - s_minus) / (2.0 * step)
        sensitivity_residual[m] = abs(sens_fd - solution.beta[m])
    return grad_residual, sensitivity_residual
