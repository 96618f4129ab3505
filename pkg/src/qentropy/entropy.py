"""Entropy and relative-entropy functionals against an explicit reference measure.

Conventions, applied literally throughout: 0 ln 0 = 0, a/0 = +inf for a > 0,
0 * (+-inf) = 0.  Every sum skips cells with zero probability mass, and the
absolute-continuity check runs before any power is taken, so 0^negative is
never evaluated.  Divergences return math.inf on the divergent branch.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.special import logsumexp

from .measure import DensityVector, ProbabilityVector, WeightedPartition
from .qcalc import DeformationIndex, as_index

__all__ = [
    "shannon_entropy",
    "kl_divergence",
    "measure_entropy",
    "renyi_entropy",
    "renyi_divergence",
    "tsallis_entropy",
    "tsallis_divergence",
]


def _paired_masses(
    P: ProbabilityVector,
    R: ProbabilityVector,
    partition: WeightedPartition | None,
) -> tuple[np.ndarray, np.ndarray]:
    p, r = P.masses, R.masses
    if p.shape != r.shape:
        raise ValueError(
            f"R: length {r.size} does not match P length {p.size}"
        )
    if partition is not None and p.shape != (len(partition),):
        raise ValueError(
            f"partition: size {len(partition)} does not match vectors of length {p.size}"
        )
    return p, r


def shannon_entropy(p: DensityVector) -> float:
    """S(p) = -sum_k p_k ln(p_k) mu_k with 0 ln 0 = 0."""
    v = p.values
    w = p.partition.weights
    live = (v > 0.0) & (w > 0.0)
    # + 0.0 keeps a unit density from reporting -0.0
    return float(-np.dot(v[live] * np.log(v[live]), w[live])) + 0.0


def kl_divergence(
    P: ProbabilityVector,
    R: ProbabilityVector,
    partition: WeightedPartition | None = None,
) -> float:
    """I(P||R) = sum_k P_k ln(P_k/R_k) when P << R, +inf otherwise.

    The partition argument is only consulted to validate cell counts; the
    discrete divergence itself does not involve the reference weights.
    """
    p, r = _paired_masses(P, R, partition)
    live = p > 0.0
    if np.any(r[live] == 0.0):
        return math.inf
    return float(np.dot(p[live], np.log(p[live] / r[live])))


def measure_entropy(P: ProbabilityVector, partition: WeightedPartition) -> float:
    """S(P) = -sum_k P_k ln(P_k/mu_k), the entropy of P relative to mu.

    Equals -kl_divergence(P, mu) and may be negative when mu is not a
    probability measure of matching shape.  Mass on a mu-null cell makes
    the value -inf; a warning names the offending cell.
    """
    p = P.masses
    if p.shape != (len(partition),):
        raise ValueError(
            f"partition: size {len(partition)} does not match vector of length {p.size}"
        )
    w = partition.weights
    live = p > 0.0
    if np.any(w[live] == 0.0):
        k = int(np.argmax(live & (w == 0.0)))
        warnings.warn(
            f"mass {p[k]} on mu-null cell {k}: measure entropy is -inf",
            RuntimeWarning,
            stacklevel=2,
        )
        return -math.inf
    return float(-np.dot(p[live], np.log(p[live] / w[live])))


def renyi_entropy(p: DensityVector, alpha: DeformationIndex | float) -> float:
    """S_alpha(p) = (1/(1-alpha)) ln sum_k p_k^alpha mu_k; Shannon in the band."""
    idx = as_index(alpha)
    if idx.is_classical:
        return shannon_entropy(p)
    v = p.values
    w = p.partition.weights
    live = (v > 0.0) & (w > 0.0)
    log_sum = logsumexp(idx.q * np.log(v[live]), b=w[live])
    return float(log_sum / (1.0 - idx.q))


def renyi_divergence(
    P: ProbabilityVector,
    R: ProbabilityVector,
    partition: WeightedPartition | None = None,
    alpha: DeformationIndex | float = 2.0,
) -> float:
    """I_alpha(P||R) = (1/(alpha-1)) ln sum_k P_k^alpha / R_k^(alpha-1).

    +inf whenever P puts mass where R does not, for every alpha; KL in the
    classical band.
    """
    idx = as_index(alpha)
    p, r = _paired_masses(P, R, partition)
    if idx.is_classical:
        return kl_divergence(P, R, partition)
    live = p > 0.0
    if np.any(r[live] == 0.0):
        return math.inf
    log_sum = logsumexp(idx.q * np.log(p[live]) + (1.0 - idx.q) * np.log(r[live]))
    return float(log_sum / (idx.q - 1.0))


def tsallis_entropy(p: DensityVector, q: DeformationIndex | float) -> float:
    """S_q(p) = (1 - sum_k p_k^q mu_k)/(q - 1); Shannon in the band."""
    idx = as_index(q)
    if idx.is_classical:
        return shannon_entropy(p)
    v = p.values
    w = p.partition.weights
    live = (v > 0.0) & (w > 0.0)
    power_integral = float(np.dot(v[live] ** idx.q, w[live]))
    return (1.0 - power_integral) / (idx.q - 1.0)


def tsallis_divergence(
    P: ProbabilityVector,
    R: ProbabilityVector,
    partition: WeightedPartition | None = None,
    q: DeformationIndex | float = 2.0,
) -> float:
    """I_q(P||R) = (sum_k P_k^q / R_k^(q-1) - 1)/(q - 1), +inf when not P << R."""
    idx = as_index(q)
    p, r = _paired_masses(P, R, partition)
    if idx.is_classical:
        return kl_divergence(P, R, partition)
    live = p > 0.0
    if np.any(r[live] == 0.0):
        return math.inf
    power_sum = float(np.sum(p[live] ** idx.q * r[live] ** (1.0 - idx.q)))
    return (power_sum - 1.0) / (idx.q - 1.0)
