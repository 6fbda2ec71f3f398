"""Mean-field attack primitives.

When many agents learn from the mean of everyone's observations, or
read the empirical action distribution as a population signal, an
adversary who controls a small subset can steer those aggregates: per
agent the footprint stays tiny, but the shifts add up linearly in the
number of compromised agents.  This module provides the aggregate
statistics, the two attack transformations (biasing the mean
observation, flattening the mean action distribution), and the drift
metrics used to quantify them.  No trainer is included; the primitives
are pure array transformations.
"""

from dataclasses import dataclass

import numpy as np

from . import attacks

SIMPLEX_ATOL = 1e-9


@dataclass(frozen=True)
class ObservationBatch:
    """Stacked per-agent observation vectors, one row per agent."""

    obs: np.ndarray

    def __post_init__(self):
        o = np.asarray(self.obs, dtype=np.float64)
        if o.ndim != 2:
            raise ValueError("obs must be an (N, d) matrix")
        if o.shape[0] < 1:
            raise ValueError("need at least one agent")
        o = np.ascontiguousarray(o)
        o.setflags(write=False)
        object.__setattr__(self, "obs", o)

    @property
    def num_agents(self):
        return self.obs.shape[0]

    @property
    def dim(self):
        return self.obs.shape[1]


@dataclass(frozen=True)
class ActionDistribution:
    probabilities: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=np.float64)
        if p.ndim != 1 or p.size < 1:
            raise ValueError("probabilities must be a nonempty vector")
        if np.any(p < -SIMPLEX_ATOL) or abs(p.sum() - 1.0) > SIMPLEX_ATOL:
            raise ValueError("probabilities must lie on the simplex")
        p = np.ascontiguousarray(p)
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    @property
    def num_actions(self):
        return self.probabilities.size


def mean_observation(batch: ObservationBatch) -> np.ndarray:
    """Coordinate-wise mean over agents, the quantity every agent reads."""
    return batch.obs.mean(axis=0)


def coordinated_bias_attack(
    batch: ObservationBatch, n: int, epsilon: float, direction
) -> ObservationBatch:
    """Shift the first ``n`` agents' observations by epsilon * direction.

    Each compromised agent moves by at most epsilon, yet the batch mean
    moves by exactly (n/N) * epsilon * direction: many small nudges in a
    common direction aggregate into a bias the mean cannot hide.
    """
    if not 1 <= n <= batch.num_agents:
        raise ValueError(f"n must lie in [1, {batch.num_agents}], got {n}")
    d = np.asarray(direction, dtype=np.float64)
    if d.shape != (batch.dim,):
        raise ValueError("direction dimension does not match the batch")
    if abs(np.linalg.norm(d) - 1.0) > SIMPLEX_ATOL:
        raise ValueError("direction must be a unit vector")
    out = batch.obs.copy()
    out[:n] += epsilon * d
    return ObservationBatch(out)


def fgsm_subset_attack(
    batch: ObservationBatch, n: int, epsilon: float, net, bounds=None
) -> ObservationBatch:
    """Sign-step perturbation of the first ``n`` agents against ``net``.

    Each compromised observation takes one value-decreasing FGSM step.
    Observations are unconstrained by default; pass ``bounds=(lo, hi)``
    to clip the perturbed rows.
    """
    if not 0 <= n <= batch.num_agents:
        raise ValueError(f"n must lie in [0, {batch.num_agents}], got {n}")
    if n == 0 or epsilon == 0.0:
        return ObservationBatch(batch.obs.copy())
    from . import valuenet as vn

    out = batch.obs.copy()
    g = vn.input_grad_batch(net, out[:n])
    out[:n] -= epsilon * np.sign(g)
    if bounds is not None:
        lo, hi = bounds
        out[:n] = np.clip(out[:n], lo, hi)
    return ObservationBatch(out)


def uniformize(dist: ActionDistribution, lam: float) -> ActionDistribution:
    """Mix the distribution toward uniform: (1 - lam) * p + lam * u."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lam must lie in [0, 1]")
    a = dist.num_actions
    mixed = (1.0 - lam) * dist.probabilities + lam / a
    return ActionDistribution(mixed)


# ---------------------------------------------------------------------------
# drift metrics


def mean_shift(before: ObservationBatch, after: ObservationBatch) -> np.ndarray:
    return mean_observation(after) - mean_observation(before)


def mean_shift_norm(before: ObservationBatch, after: ObservationBatch) -> float:
    return float(np.linalg.norm(mean_shift(before, after)))


def entropy(dist: ActionDistribution) -> float:
    """Shannon entropy in nats; 0 log 0 reads as 0."""
    p = dist.probabilities
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum())


def kl_to_uniform(dist: ActionDistribution) -> float:
    # KL(p || u) = log A - H(p), always >= 0
    return float(np.log(dist.num_actions) - entropy(dist))
