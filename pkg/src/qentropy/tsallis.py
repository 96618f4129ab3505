"""Tsallis maximum entropy under normalized q-expectation (escort) constraints.

The maximizer has the deformed-exponential form

    p_k = e_q(-(1/w) sum_m beta_m (u_m(x_k) - t_m)) / zbar,   w = sum_k p_k^q mu_k,

which is self-referential through the escort normalizer w.  The solver runs a
double loop: an inner damped fixed-point iteration on w at fixed beta, and an
outer quasi-Newton iteration on beta driving the escort-moment residuals to
tolerance.  Inside the classical band the whole problem degenerates to the
Gibbs case and is delegated to the better-conditioned classical solver.

Identity checks are returned as a named residual map rather than asserted, so
a caller can log them; solutions additionally satisfy w = zbar^(1-q) and
S_q = ln_q zbar, which the test suite pins at 1e-8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import tsallis_entropy
from .maxent import (
    ConstraintSet,
    ConvergenceError,
    InfeasibleError,
    _check_interior,
    partition_function,
    solve_maxent,
)
from .measure import (
    DensityVector,
    ProbabilityVector,
    WeightedPartition,
    induced_pmf,
)
from .qcalc import DeformationIndex, as_index, q_exp, q_log

__all__ = [
    "EmptySupportError",
    "EscortView",
    "TsallisSolution",
    "ConsistencyReport",
    "escort_view",
    "escort_expectation",
    "q_maxent_density",
    "solve_tsallis_maxent",
    "identity_residuals",
    "tsallis_thermo",
    "discrete_consistency_report",
]


class EmptySupportError(ValueError):
    """Every cell fell below the q-exponential cutoff (beta too extreme)."""


@dataclass(frozen=True, eq=False)
class EscortView:
    """Normalized q-power reweighting of a density: weights p_k^q mu_k / w."""

    q: DeformationIndex
    weights: np.ndarray
    q_mass: float

    def expectation(self, u) -> float:
        u = np.asarray(u, dtype=float)
        if u.shape != self.weights.shape:
            raise ValueError(
                f"u: need {self.weights.size} per-cell values, got shape {u.shape}"
            )
        return float(self.weights @ u)


def escort_view(p: DensityVector, q: DeformationIndex | float) -> EscortView:
    idx = as_index(q)
    powers = np.zeros_like(p.values)
    live = p.values > 0.0
    powers[live] = np.exp(idx.q * np.log(p.values[live]))
    masses = powers * p.partition.weights
    q_mass = float(np.sum(masses))
    return EscortView(q=idx, weights=masses / q_mass, q_mass=q_mass)


def escort_expectation(p: DensityVector, u, q: DeformationIndex | float) -> float:
    """Normalized q-expectation of u: integral of u p^q dmu over integral p^q dmu."""
    return escort_view(p, q).expectation(u)


@dataclass(frozen=True, eq=False)
class TsallisSolution:
    """Converged escort-constrained Tsallis MaxEnt output.

    beta are the true multipliers; beta_q = beta / q_mass the renormalized
    ones appearing inside the q-exponential.  iterations = (outer, inner
    total).  identity_residuals is the map from identity_residuals().
    """

    constraints: ConstraintSet
    partition: WeightedPartition
    q: DeformationIndex
    beta: np.ndarray
    beta_q: np.ndarray
    q_mass: float
    zbar: float
    density: DensityVector
    escort_moments: np.ndarray
    entropy_q: float
    residual_norm: float
    iterations: tuple[int, int]
    identity_residuals: dict

    @property
    def pmf(self) -> ProbabilityVector:
        return induced_pmf(self.density)


def _require_escort(constraints: ConstraintSet) -> DeformationIndex:
    if constraints.kind != "escort" or constraints.q is None:
        raise ValueError(
            f"constraints: kind must be 'escort' with a deformation index, "
            f"got kind {constraints.kind!r}"
        )
    return constraints.q


def _qexp_values(
    beta: np.ndarray,
    q_mass: float,
    centers: np.ndarray,
    U: np.ndarray,
    weights: np.ndarray,
    idx: DeformationIndex,
):
    """Evaluate the deformed-exponential family; returns (values, zbar)."""
    if beta.size:
        argument = -((beta / q_mass) @ (U - centers[:, None]))
    else:
        argument = np.zeros(weights.size)
    raw = q_exp(argument, idx)
    raw = np.where(weights > 0.0, raw, 0.0)
    zbar = float(raw @ weights)
    if zbar <= 0.0:
        raise EmptySupportError(
            "beta: every support cell is cut off by the q-exponential; "
            "the multipliers are too extreme for this index"
        )
    return raw / zbar, zbar


def q_maxent_density(
    beta,
    q_mass_guess: float,
    constraints: ConstraintSet,
    partition: WeightedPartition,
) -> tuple[DensityVector, float]:
    """One evaluation of the self-referential form at a supplied q_mass guess.

    Centering uses the constraint targets (the solution ansatz); cells cut
    off by the q-exponential get density zero.
    """
    idx = _require_escort(constraints)
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    if beta.size != constraints.size or np.any(~np.isfinite(beta)):
        raise ValueError(f"beta: need {constraints.size} finite multipliers, got {beta!r}")
    if not (np.isfinite(q_mass_guess) and q_mass_guess > 0.0):
        raise ValueError(f"q_mass_guess: need a positive real, got {q_mass_guess!r}")
    U = constraints.feature_matrix(len(partition))
    values, zbar = _qexp_values(
        beta, float(q_mass_guess), constraints.targets, U, partition.weights, idx
    )
    return DensityVector(values, partition), zbar


def _power_mass(values: np.ndarray, weights: np.ndarray, idx: DeformationIndex) -> float:
    powers = np.zeros_like(values)
    live = values > 0.0
    powers[live] = np.exp(idx.q * np.log(values[live]))
    return float(powers @ weights)


def _fixed_point(
    beta: np.ndarray,
    centers: np.ndarray,
    q_mass0: float,
    U: np.ndarray,
    weights: np.ndarray,
    idx: DeformationIndex,
    tol: float,
    max_inner: int,
    damping: float,
):
    """Damped fixed point on q_mass at fixed beta and fixed centering values."""
    q_mass = q_mass0
    for inner in range(1, max_inner + 1):
        values, zbar = _qexp_values(beta, q_mass, centers, U, weights, idx)
        new_mass = _power_mass(values, weights, idx)
        if abs(new_mass - q_mass) <= tol * max(1.0, abs(q_mass)):
            return values, zbar, new_mass, inner
        q_mass = (1.0 - damping) * q_mass + damping * new_mass
    raise ConvergenceError(
        f"solve_tsallis_maxent: inner fixed point on the escort normalizer did "
        f"not settle in {max_inner} iterations (last change "
        f"{abs(new_mass - q_mass)!r}); try a smaller damping",
        abs(new_mass - q_mass),
        max_inner,
    )


def identity_residuals(
    density: DensityVector,
    q: DeformationIndex | float,
    zbar: float,
    beta,
    beta_q,
    escort_moments,
    targets,
) -> dict:
    """Named self-consistency checks of a (purported) Tsallis MaxEnt solution."""
    idx = as_index(q)
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    beta_q = np.atleast_1d(np.asarray(beta_q, dtype=float))
    escort_moments = np.atleast_1d(np.asarray(escort_moments, dtype=float))
    targets = np.atleast_1d(np.asarray(targets, dtype=float))
    q_mass = _power_mass(density.values, density.partition.weights, idx)
    zbar_power = math.exp((1.0 - idx.q) * math.log(zbar))
    entropy = tsallis_entropy(density, idx)
    return {
        "escort_moment": float(np.max(np.abs(escort_moments - targets), initial=0.0)),
        "power_mass_vs_zbar": abs(q_mass - zbar_power),
        "entropy_vs_lnq_zbar": abs(entropy - float(q_log(zbar, idx))),
        "multiplier_scaling": float(np.max(np.abs(beta_q * q_mass - beta), initial=0.0)),
    }


def _delegate_classical(
    constraints: ConstraintSet,
    partition: WeightedPartition,
    idx: DeformationIndex,
    tolerance: float,
) -> TsallisSolution:
    ordinary = ConstraintSet(constraints.functions, constraints.targets, "ordinary")
    g = solve_maxent(ordinary, partition, tolerance=tolerance)
    # Gibbs normalizer of the centered family: zbar = exp(log Z + beta . t)
    zbar = math.exp(g.log_z + float(g.beta @ constraints.targets))
    residuals = identity_residuals(
        g.density, idx, zbar, g.beta, g.beta, g.achieved_moments, constraints.targets
    )
    return TsallisSolution(
        constraints=constraints,
        partition=partition,
        q=idx,
        beta=g.beta,
        beta_q=g.beta.copy(),
        q_mass=1.0,
        zbar=zbar,
        density=g.density,
        escort_moments=g.achieved_moments,
        entropy_q=g.entropy,
        residual_norm=g.residual_norm,
        iterations=(g.iterations, 0),
        identity_residuals=residuals,
    )


def solve_tsallis_maxent(
    constraints: ConstraintSet,
    partition: WeightedPartition,
    tolerance: float = 1e-10,
    max_outer: int = 100,
    max_inner: int = 500,
    damping: float = 0.5,
) -> TsallisSolution:
    """Double-loop solver: inner fixed point on q_mass, outer quasi-Newton on beta."""
    idx = _require_escort(constraints)
    if not (0.0 < tolerance < 1.0):
        raise ValueError(f"tolerance: need a value in (0, 1), got {tolerance!r}")
    if not (0.0 < damping <= 1.0):
        raise ValueError(f"damping: need a value in (0, 1], got {damping!r}")
    if max_outer < 1 or max_inner < 1:
        raise ValueError(
            f"max_outer, max_inner: need positive counts, got {max_outer!r}, {max_inner!r}"
        )
    if idx.is_classical:
        return _delegate_classical(constraints, partition, idx, tolerance)

    weights = partition.weights
    U = constraints.feature_matrix(len(partition))
    targets = constraints.targets
    M = constraints.size
    support = weights > 0.0
    if M:
        _check_interior(U, targets, support)

    inner_tol = min(1e-12, tolerance)
    total_mass = float(np.sum(weights))
    # uniform start: density 1/mu(X), whose q_mass is mu(X)^(1-q)
    q_mass = math.exp((1.0 - idx.q) * math.log(total_mass))
    beta = np.zeros(M)
    inner_total = 0

    def evaluate(b: np.ndarray, w0: float):
        values, zbar, w, inner = _fixed_point(
            b, targets, w0, U, weights, idx, inner_tol, max_inner, damping
        )
        view_masses = np.zeros_like(values)
        live = values > 0.0
        view_masses[live] = np.exp(idx.q * np.log(values[live])) * weights[live]
        moments = (U @ view_masses) / w if M else np.zeros(0)
        return values, zbar, w, moments, inner

    values, zbar, q_mass, moments, inner = evaluate(beta, q_mass)
    inner_total += inner
    residual = moments - targets
    residual_norm = float(np.max(np.abs(residual))) if M else 0.0
    outer = 0
    while residual_norm > tolerance:
        if outer >= max_outer:
            raise ConvergenceError(
                f"solve_tsallis_maxent: escort-moment residual {residual_norm!r} "
                f"above tolerance {tolerance!r} after {max_outer} outer iterations",
                residual_norm,
                outer,
            )
        jacobian = np.zeros((M, M))
        for m in range(M):
            h = 1e-6 * max(1.0, abs(beta[m]))
            bumped = beta.copy()
            bumped[m] += h
            _, _, _, moments_h, inner = evaluate(bumped, q_mass)
            inner_total += inner
            jacobian[:, m] = (moments_h - moments) / h
        try:
            step = np.linalg.solve(jacobian, -residual)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(jacobian, -residual, rcond=None)[0]
        scale = 1.0
        accepted = False
        for _ in range(40):
            try:
                trial = beta + scale * step
                values_t, zbar_t, w_t, moments_t, inner = evaluate(trial, q_mass)
                inner_total += inner
            except EmptySupportError:
                scale *= 0.5
                continue
            trial_residual = moments_t - targets
            trial_norm = float(np.max(np.abs(trial_residual)))
            if trial_norm < residual_norm:
                beta, values, zbar, q_mass = trial, values_t, zbar_t, w_t
                moments, residual, residual_norm = moments_t, trial_residual, trial_norm
                accepted = True
                break
            scale *= 0.5
        if not accepted:
            raise ConvergenceError(
                f"solve_tsallis_maxent: line search stalled at residual "
                f"{residual_norm!r}; the targets may be near the feasibility boundary",
                residual_norm,
                outer,
            )
        outer += 1

    density = DensityVector(values, partition)
    beta_q = beta / q_mass
    entropy_q = tsallis_entropy(density, idx)
    residuals = identity_residuals(density, idx, zbar, beta, beta_q, moments, targets)
    return TsallisSolution(
        constraints=constraints,
        partition=partition,
        q=idx,
        beta=beta,
        beta_q=beta_q,
        q_mass=q_mass,
        zbar=zbar,
        density=density,
        escort_moments=moments,
        entropy_q=entropy_q,
        residual_norm=residual_norm,
        iterations=(outer, inner_total),
        identity_residuals=residuals,
    )


def _lnq_legendre(zbar: float, beta: np.ndarray, moments: np.ndarray, idx) -> float:
    return float(q_log(zbar, idx)) - float(beta @ moments)


def _self_consistent_eval(
    beta: np.ndarray,
    solution: TsallisSolution,
    tol: float = 1e-12,
    max_iter: int = 2000,
    damping: float = 0.5,
):
    """Fixed point in (q_mass, centering moments) at fixed beta.

    Used by the multiplier-derivative check, where the centering values are
    treated as solved-for quantities rather than held at the original targets.
    """
    idx = solution.q
    U = solution.constraints.feature_matrix(len(solution.partition))
    weights = solution.partition.weights
    q_mass = solution.q_mass
    centers = solution.escort_moments.copy()
    for _ in range(max_iter):
        values, zbar = _qexp_values(beta, q_mass, centers, U, weights, idx)
        new_mass = _power_mass(values, weights, idx)
        view_masses = np.zeros_like(values)
        live = values > 0.0
        view_masses[live] = np.exp(idx.q * np.log(values[live])) * weights[live]
        new_centers = (U @ view_masses) / new_mass
        drift = max(
            abs(new_mass - q_mass),
            float(np.max(np.abs(new_centers - centers), initial=0.0)),
        )
        if drift <= tol:
            return zbar, new_mass, new_centers
        q_mass = (1.0 - damping) * q_mass + damping * new_mass
        centers = (1.0 - damping) * centers + damping * new_centers
    raise ConvergenceError(
        f"tsallis_thermo: self-consistent evaluation at shifted multipliers did "
        f"not settle (drift {drift!r})",
        drift,
        max_iter,
    )


def tsallis_thermo(
    solution: TsallisSolution,
    constraints: ConstraintSet | None = None,
    fd_step: float = 1e-4,
) -> dict:
    """Finite-difference checks of the deformed thermodynamic identities.

    legendre_gap:        |beta . (achieved - targets)|, the exact defect in
                         ln_q Z_q = ln_q zbar - beta . moments when moments
                         are read at the targets instead of the achieved values
    log_z_gradient[m]:   |d(ln_q Z_q)/d(beta_m) + <<u_m>>|, differencing the
                         self-consistent evaluation at beta +- h
    entropy_sensitivity[m]: |dS_q/d(t_m) - beta_m|, re-solving at t_m +- h

    The sensitivity sign matches the classical solver: for this family
    dS_q/dt_m = beta_m (the two-point closed form fixes the sign).
    """
    constraints = solution.constraints if constraints is None else constraints
    if not (0.0 < fd_step < 1.0):
        raise ValueError(f"fd_step: need a value in (0, 1), got {fd_step!r}")
    M = constraints.size
    idx = solution.q
    partition = solution.partition
    out = {
        "legendre_gap": float(
            abs(solution.beta @ (solution.escort_moments - constraints.targets))
        )
        if M
        else 0.0,
        "log_z_gradient": np.zeros(M),
        "entropy_sensitivity": np.zeros(M),
    }

    def lnq_z_at(b: np.ndarray) -> float:
        if idx.is_classical:
            ordinary = ConstraintSet(constraints.functions, constraints.targets, "ordinary")
            return partition_function(b, ordinary, partition)
        zbar, _, centers = _self_consistent_eval(b, solution)
        return _lnq_legendre(zbar, b, centers, idx)

    def entropy_at(m: int, value: float) -> float:
        shifted = constraints.targets.copy()
        shifted[m] = value
        return solve_tsallis_maxent(
            constraints.with_targets(shifted), partition, tolerance=1e-12
        ).entropy_q

    for m in range(M):
        unit = np.zeros(M)
        unit[m] = 1.0
        plus = lnq_z_at(solution.beta + fd_step * unit)
        minus = lnq_z_at(solution.beta - fd_step * unit)
        grad_fd = (plus - minus) / (2.0 * fd_step)
        out["log_z_gradient"][m] = abs(grad_fd + solution.escort_moments[m])

        step = fd_step
        try:
            s_plus = entropy_at(m, constraints.targets[m] + step)
            s_minus = entropy_at(m, constraints.targets[m] - step)
        except (InfeasibleError, ValueError):
            step = fd_step / 10.0
            s_plus = entropy_at(m, constraints.targets[m] + step)
            s_minus = entropy_at(m, constraints.targets[m] - step)
        sens_fd = (s_plus - s_minus) / (2.0 * step)
        out["entropy_sensitivity"][m] = abs(sens_fd - solution.beta[m])
    return out


@dataclass(frozen=True)
class ConsistencyReport:
    """Measure-theoretic vs discrete Tsallis entropy on the uniform reference.

    measure_entropy uses mu_k = 1/n; discrete_entropy is the plain pmf form;
    identity_residual is the defect in
    measure = discrete - n^(q-1) ln_q(n) sum P^q, which vanishes analytically.
    constant_residual (when zbar is supplied) checks
    sum P^q = n^(1-q) zbar^(1-q), constant across the constraint set.
    """

    q: float
    n: int
    measure_entropy: float
    discrete_entropy: float
    power_sum: float
    identity_residual: float
    constant_residual: float | None


def discrete_consistency_report(
    P: ProbabilityVector,
    q: DeformationIndex | float,
    n: int | None = None,
    zbar: float | None = None,
) -> ConsistencyReport:
    idx = as_index(q)
    masses = P.masses
    if n is None:
        n = masses.size
    if n != masses.size:
        raise ValueError(f"n: pmf has {masses.size} cells, got n = {n}")
    live = masses > 0.0
    power_sum = float(np.sum(np.exp(idx.q * np.log(masses[live]))))
    if idx.is_classical:
        n_pow = 1.0
        discrete = -float(masses[live] @ np.log(masses[live]))
    else:
        n_pow = math.exp((idx.q - 1.0) * math.log(n))
        discrete = (1.0 - power_sum) / (idx.q - 1.0)
    # measure side: density n P_k against mu_k = 1/n, evaluated directly
    if idx.is_classical:
        measure = -float(masses[live] @ np.log(n * masses[live]))
    else:
        measure = (1.0 - n_pow * power_sum) / (idx.q - 1.0)
    lnq_n = float(q_log(float(n), idx))
    rhs = discrete - n_pow * lnq_n * power_sum
    constant_residual = None
    if zbar is not None:
        zbar_power = math.exp((1.0 - idx.q) * math.log(zbar))
        n_inv_pow = math.exp((1.0 - idx.q) * math.log(n))
        constant_residual = abs(power_sum - n_inv_pow * zbar_power)
    return ConsistencyReport(
        q=idx.q,
        n=int(n),
        measure_entropy=measure,
        discrete_entropy=discrete,
        power_sum=power_sum,
        identity_residual=abs(measure - rhs),
        constant_residual=constant_residual,
    )
