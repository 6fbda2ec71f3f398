"""White-box attack primitives against the coordinator.

Two attack surfaces:

* the belief representation fed to the value net, hit with a single
  signed-gradient step (bounded in max-norm, clamped back to [0, 1]);
* the victim policy's parameter vector, nudged inside a small box to
  flip a scalar behavior metric past its defection threshold.

The gradient attack defaults to the value-*decreasing* direction: for a
policy that acts greedily on assessed values, dragging every assessment
downhill is the most directly disruptive choice.  The classic
loss-ascending direction is available via ``direction="increase"``.
Only the representation is corrupted; the environment's actual belief
state is never touched.
"""

from dataclasses import dataclass

import numpy as np

from . import valuenet as vn

KINDS = ("none", "fgsm")


@dataclass(frozen=True)
class AttackSpec:
    kind: str = "none"
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown attack kind {self.kind!r}")
        if not self.epsilon >= 0.0:
            raise ValueError("epsilon must be non-negative")


NO_ATTACK = AttackSpec()


def is_active(attack) -> bool:
    """kind="none" behaves as no attack at all, whatever its epsilon."""
    return attack is not None and attack.kind != "none"


@dataclass(frozen=True)
class PolicyPerturbation:
    delta_bound: float
    perturbation: np.ndarray

    def __post_init__(self):
        p = np.ascontiguousarray(self.perturbation, dtype=np.float64)
        if self.delta_bound <= 0.0:
            raise ValueError("delta_bound must be positive")
        if p.size and np.abs(p).max() >= self.delta_bound:
            raise ValueError("perturbation must stay strictly inside the box")
        p.flags.writeable = False
        object.__setattr__(self, "perturbation", p)


def fgsm_belief_batch(net, X, epsilon, direction="decrease", mask=None):
    """Signed-gradient step on a batch of belief inputs, clamped to [0,1].

    Returns clamp(x - eps * sign(grad V(x)), 0, 1) per row for the
    default direction; "increase" flips the sign.  ``mask`` (boolean,
    one entry per coordinate) restricts which coordinates may move,
    e.g. to spare the one-hot utterance blocks.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    if direction not in ("decrease", "increase"):
        raise ValueError(f"unknown direction {direction!r}")
    X = np.ascontiguousarray(X, dtype=np.float64)
    if epsilon == 0:
        return X.copy()
    g = vn.input_grad_batch(net, X)
    step = epsilon * np.sign(g)
    out = X - step if direction == "decrease" else X + step
    if mask is not None:
        out = np.where(np.asarray(mask, bool)[None, :], out, X)
    return np.clip(out, 0.0, 1.0)


def fgsm_belief(net, x, epsilon, direction="decrease", mask=None):
    """Single-input form of fgsm_belief_batch."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    return fgsm_belief_batch(net, x[None, :], epsilon, direction, mask)[0]


def posterior_mask(game) -> np.ndarray:
    """Mask selecting only the two posterior blocks of a belief input."""
    n, u = game.num_items, game.num_utterances
    m = np.zeros(2 * n + 2 * u, dtype=bool)
    m[: 2 * n] = True
    return m


def attack_policy_params(
    victim_eval, base_params, delta: float, trials: int, rng
) -> PolicyPerturbation:
    """Random-search attack on a parameter vector inside (-delta, delta)^d.

    ``victim_eval`` maps a parameter vector to the attacker's reward
    (defection frequency in [0, 1]).  Samples ``trials`` uniform
    perturbations and keeps the first strict improvement over the
    unperturbed baseline; returns the zero perturbation when nothing
    beats it.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if delta <= 0:
        raise ValueError("delta must be positive")
    base_params = np.ascontiguousarray(base_params, dtype=np.float64)
    d = base_params.size
    best = np.zeros(d)
    best_score = victim_eval(base_params)
    # shrink keeps samples strictly inside the open box
    shrink = 1.0 - 1e-12
    for _ in range(trials):
        p = rng.uniform(-delta, delta, size=d) * shrink
        score = victim_eval(base_params + p)
        if score > best_score:
            best, best_score = p, score
    return PolicyPerturbation(delta_bound=delta, perturbation=best)
