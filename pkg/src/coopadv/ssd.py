"""Sequential social dilemma toolkit.

A matrix game is a social dilemma when mutual cooperation beats mutual
defection, beats being exploited, beats splitting the difference, and
at least one of greed (unilateral defection tempts) or fear (being the
lone cooperator stings) applies.  The same four-way structure lifts to
temporally extended games by reading R, P, S, T as state values of
joint policies rather than stage payoffs; this module estimates those
values by Monte-Carlo rollouts of an iterated matrix game and runs the
inequality classifier on the result.

Policy selection via a scalar social-behavior metric with cooperate /
defect thresholds is modeled too, since a thresholded metric is an
attack surface: a small parameter perturbation that drags the metric
across the defection threshold flips the induced behavior label.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

COOPERATE = 0
DEFECT = 1

CONDITION_IDS = ("R>P", "R>S", "2R>T+S", "T>R or P>S")


class AsymmetricGameError(ValueError):
    """Role-swap symmetry required by the payoff induction is violated."""


@dataclass(frozen=True)
class MgsdPayoffs:
    """Reward / punishment / sucker / temptation values, possibly per state."""

    R: float
    P: float
    S: float
    T: float
    state_label: Optional[str] = None

    def __post_init__(self):
        vals = (self.R, self.P, self.S, self.T)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("payoffs must be finite")


@dataclass(frozen=True)
class DilemmaVerdict:
    is_dilemma: bool
    greed: bool
    fear: bool
    failed_conditions: Tuple[str, ...]


def classify(p: MgsdPayoffs) -> DilemmaVerdict:
    """Strict-inequality social dilemma test.

    Checks R>P, R>S, 2R>T+S, and greed-or-fear (T>R or P>S); boundary
    equality fails a condition.
    """
    greed = p.T > p.R
    fear = p.P > p.S
    held = (p.R > p.P, p.R > p.S, 2 * p.R > p.T + p.S, greed or fear)
    failed = tuple(cid for cid, ok in zip(CONDITION_IDS, held) if not ok)
    return DilemmaVerdict(
        is_dilemma=not failed, greed=greed, fear=fear, failed_conditions=failed
    )


# ---------------------------------------------------------------------------
# the built-in environment


@dataclass(frozen=True)
class IteratedMatrixGame:
    """Repeated matrix game; the stage repeats without any state dynamics.

    ``payoffs1[a1, a2]`` is player 1's stage payoff.  Player 2 defaults
    to the role-swapped view ``payoffs1[a2, a1]``; passing ``payoffs2``
    explicitly builds an asymmetric game (which `induce_mgsd` will
    reject).
    """

    payoffs1: np.ndarray
    payoffs2: Optional[np.ndarray] = None

    def __post_init__(self):
        p1 = np.ascontiguousarray(np.asarray(self.payoffs1, dtype=np.float64))
        if p1.ndim != 2 or p1.shape[0] != p1.shape[1] or p1.shape[0] < 1:
            raise ValueError("payoffs1 must be a square matrix")
        if not np.all(np.isfinite(p1)):
            raise ValueError("payoffs must be finite")
        p2 = self.payoffs2
        p2 = p1.T.copy() if p2 is None else np.ascontiguousarray(np.asarray(p2, float))
        if p2.shape != p1.shape or not np.all(np.isfinite(p2)):
            raise ValueError("payoffs2 must match payoffs1 in shape and be finite")
        p1.setflags(write=False)
        p2.setflags(write=False)
        object.__setattr__(self, "payoffs1", p1)
        object.__setattr__(self, "payoffs2", p2)

    @property
    def num_actions(self):
        return self.payoffs1.shape[0]

    def stage_payoffs(self, a1: int, a2: int) -> Tuple[float, float]:
        return float(self.payoffs1[a1, a2]), float(self.payoffs2[a1, a2])


def prisoners_dilemma(r=3.0, p=1.0, s=0.0, t=5.0) -> IteratedMatrixGame:
    """Canonical two-action stage game with the usual T > R > P > S order."""
    return IteratedMatrixGame([[r, s], [t, p]])


@dataclass(frozen=True)
class MixedPolicy:
    """Stationary mixture over stage actions."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        if p.ndim != 1 or p.size < 1:
            raise ValueError("probs must be a nonempty vector")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
            raise ValueError("probs must lie on the simplex")
        p = np.ascontiguousarray(p / p.sum())
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def sample_batch(self, rng, size):
        cum = np.cumsum(self.probs)
        idx = np.searchsorted(cum, rng.random(size), side="right")
        return np.minimum(idx, self.probs.size - 1)


ALWAYS_COOPERATE = MixedPolicy([1.0, 0.0])
ALWAYS_DEFECT = MixedPolicy([0.0, 1.0])


# ---------------------------------------------------------------------------
# Monte-Carlo value estimation


def _episode_lengths_and_weights(episodes, gamma, rng, horizon):
    if horizon == "geometric":
        # undiscounted sum to a Geometric(1 - gamma) horizon; P(len > t)
        # = gamma^t, so the expectation equals the discounted value
        lens = rng.geometric(1.0 - gamma, size=episodes)
        return lens, None
    if horizon == "discounted":
        if gamma == 0.0:
            t = 1
        else:
            t = max(1, int(math.ceil(-16.0 * math.log(10.0) / math.log(gamma))))
        lens = np.full(episodes, t)
        return lens, gamma ** np.arange(t)
    raise ValueError(f"unknown horizon mode {horizon!r}")


def _mc_returns(env, p1, p2, episodes, gamma, rng, horizon):
    """Per-episode return samples for both players, shape (episodes,) each."""
    lens, weights = _episode_lengths_and_weights(episodes, gamma, rng, horizon)
    r1 = np.empty(episodes)
    r2 = np.empty(episodes)
    for e in range(episodes):
        a1 = p1.sample_batch(rng, int(lens[e]))
        a2 = p2.sample_batch(rng, int(lens[e]))
        s1 = env.payoffs1[a1, a2]
        s2 = env.payoffs2[a1, a2]
        if weights is None:
            r1[e] = s1.sum()
            r2[e] = s2.sum()
        else:
            r1[e] = s1 @ weights
            r2[e] = s2 @ weights
    return r1, r2


def estimate_value(
    env, joint, start=0, episodes=1000, gamma=0.9, rng=None, horizon="geometric"
) -> Tuple[float, float]:
    """Monte-Carlo state values of a joint policy, one scalar per player.

    The default horizon draws a geometric episode length and sums
    undiscounted stage payoffs, an unbiased estimate of the discounted
    value; ``horizon="discounted"`` instead rolls a fixed truncation
    with explicit discount weights (zero-variance for deterministic
    policies).  The iterated matrix game has a single state, so
    ``start`` only sanity-checks the caller.
    """
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    if not 0.0 <= gamma < 1.0:
        raise ValueError("gamma must lie in [0, 1); the game never terminates on its own")
    if start != 0:
        raise ValueError("the iterated matrix game has a single state, 0")
    if rng is None:
        rng = np.random.default_rng()
    p1, p2 = joint
    r1, r2 = _mc_returns(env, p1, p2, episodes, gamma, rng, horizon)
    return float(r1.mean()), float(r2.mean())


def _sem(x):
    if x.size < 2:
        return 0.0
    return float(x.std(ddof=1) / math.sqrt(x.size))


def induce_mgsd(
    env, pi_c, pi_d, s=0, episodes=4000, gamma=0.9, rng=None, horizon="geometric"
) -> MgsdPayoffs:
    """Estimate the four dilemma values from rollouts of a policy pair.

    R and P come from the matched pairs (C,C) and (D,D); S and T from
    the mixed pairs, read from player 1's side.  Each of the four value
    definitions also names a player-2 value that must agree under role
    swap; every such identity is checked to 3 pooled standard errors
    and a violation raises AsymmetricGameError, which is how explicitly
    asymmetric payoff matrices surface here.
    """
    if rng is None:
        rng = np.random.default_rng()
    cc1, cc2 = _mc_returns(env, pi_c, pi_c, episodes, gamma, rng, horizon)
    dd1, dd2 = _mc_returns(env, pi_d, pi_d, episodes, gamma, rng, horizon)
    cd1, cd2 = _mc_returns(env, pi_c, pi_d, episodes, gamma, rng, horizon)
    dc1, dc2 = _mc_returns(env, pi_d, pi_c, episodes, gamma, rng, horizon)

    checks = [
        ("R", cc1 - cc2, None),
        ("P", dd1 - dd2, None),
        ("S", cd1, dc2),
        ("T", dc1, cd2),
    ]
    for name, a, b in checks:
        if b is None:
            gap, tol = abs(float(a.mean())), 3.0 * _sem(a)
        else:
            gap = abs(float(a.mean() - b.mean()))
            tol = 3.0 * math.hypot(_sem(a), _sem(b))
        if gap > tol:
            raise AsymmetricGameError(
                f"{name}: player values differ by {gap:.6g} (> 3 SE = {tol:.6g})"
            )
    return MgsdPayoffs(
        R=float(cc1.mean()), P=float(dd1.mean()), S=float(cd1.mean()), T=float(dc1.mean())
    )


# ---------------------------------------------------------------------------
# social behavior metric thresholds


@dataclass(frozen=True)
class SocialMetricConfig:
    """Scalar behavior metric with cooperate / defect thresholds."""

    alpha: Callable
    alpha_c: float
    alpha_d: float

    def __post_init__(self):
        if not callable(self.alpha):
            raise ValueError("alpha must be callable on policy parameters")
        if not self.alpha_c <= self.alpha_d:
            raise ValueError("need alpha_c <= alpha_d")


def classify_policy(cfg: SocialMetricConfig, params) -> str:
    """Threshold the metric: below alpha_c cooperative, above alpha_d defecting."""
    a = float(cfg.alpha(params))
    if a < cfg.alpha_c:
        return "cooperative"
    if a > cfg.alpha_d:
        return "defecting"
    return "unclassified"


def empirical_defection_rate(policy: MixedPolicy, samples: int, rng) -> float:
    """Fraction of sampled stage actions that defect; a concrete metric."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    return float((policy.sample_batch(rng, samples) == DEFECT).mean())
