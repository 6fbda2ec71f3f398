"""Public posterior over the private deal, updated by Bayes' rule.

The coordinator never sees the dealt items, only the utterances.  Because
the two items are dealt independently and each announced prescription
maps only the actor's own item to an action, the joint posterior over
(item1, item2) stays a product of two marginals forever:

    P(i, j | history) ∝ P(i) P(j) · Π_k 1[presc_k maps the actor's item
                                         to the observed action]

Every indicator in the product touches i or j but never both, so the
posterior factorizes and we track the two marginals separately.

A prescription here is just its lookup table: entry ``mapping[i]`` is
the action taken when the private item is ``i``.  Utterance-phase tables
are integer vectors, trade-phase tables are (give, want) rows.
Observing an action then rules out every item the table does not map to
it; the update is a mask-and-renormalize.
"""

from dataclasses import dataclass

import numpy as np

SIMPLEX_ATOL = 1e-9


class ZeroProbabilityEventError(ValueError):
    """Observed an action no item in the prior's support would produce."""


@dataclass(frozen=True, eq=False)
class Belief:
    """Marginal posteriors over each player's private item."""

    p1: np.ndarray
    p2: np.ndarray

    def __post_init__(self):
        for name in ("p1", "p2"):
            p = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            if p.ndim != 1 or p.size < 1:
                raise ValueError(f"{name} must be a nonempty vector")
            if p.min() < 0.0 or p.max() > 1.0:
                raise ValueError(f"{name} has entries outside [0, 1]")
            if abs(p.sum() - 1.0) > SIMPLEX_ATOL:
                raise ValueError(f"{name} sums to {p.sum()!r}, not 1")
            p.flags.writeable = False
            object.__setattr__(self, name, p)
        if self.p1.size != self.p2.size:
            raise ValueError("marginals must share the item count")

    @property
    def num_items(self) -> int:
        return self.p1.size


@dataclass(frozen=True, eq=False)
class Prescription:
    """Deterministic item -> action table, published by the coordinator."""

    mapping: np.ndarray

    def __post_init__(self):
        m = np.ascontiguousarray(self.mapping, dtype=np.int64)
        if m.ndim not in (1, 2) or (m.ndim == 2 and m.shape[1] != 2):
            raise ValueError("mapping must be (n,) actions or (n, 2) trade pairs")
        m.flags.writeable = False
        object.__setattr__(self, "mapping", m)

    @property
    def num_items(self) -> int:
        return self.mapping.shape[0]


def initial_belief(cfg) -> Belief:
    p = np.full(cfg.num_items, 1.0 / cfg.num_items)
    return Belief(p1=p, p2=p.copy())


def _consistency_mask(presc: Prescription, observed_action) -> np.ndarray:
    if presc.mapping.ndim == 1:
        return presc.mapping == int(observed_action)
    pair = np.asarray(observed_action, dtype=np.int64)
    return (presc.mapping == pair).all(axis=1)


def update_belief(
    b: Belief, presc: Prescription, observed_action, which_player: int
) -> Belief:
    """Condition one marginal on an observed prescribed action.

    The likelihood of ``observed_action`` given item i is the indicator
    1[mapping[i] == observed_action], so the posterior is the prior
    masked to the consistent items and renormalized.  The other player's
    marginal is untouched.
    """
    if which_player not in (1, 2):
        raise ValueError("which_player must be 1 or 2")
    if presc.num_items != b.num_items:
        raise ValueError("prescription and belief disagree on item count")
    prior = b.p1 if which_player == 1 else b.p2
    masked = np.where(_consistency_mask(presc, observed_action), prior, 0.0)
    z = masked.sum()
    if z <= 0.0:
        raise ZeroProbabilityEventError(
            f"action {observed_action!r} has zero prior probability"
        )
    post = masked / z
    if which_player == 1:
        return Belief(p1=post, p2=b.p2)
    return Belief(p1=b.p1, p2=post)


def encode(b: Belief, utt1, utt2, num_utterances: int) -> np.ndarray:
    """Flatten the public state for the value net.

    Layout: [p1 | p2 | onehot(utt1) | onehot(utt2)], with an utterance
    block left all-zero while that utterance has not happened yet.
    """
    out = np.zeros(2 * b.num_items + 2 * num_utterances)
    n = b.num_items
    out[:n] = b.p1
    out[n : 2 * n] = b.p2
    for slot, utt in enumerate((utt1, utt2)):
        if utt is not None:
            if not 0 <= utt < num_utterances:
                raise ValueError(f"utterance {utt} out of range")
            out[2 * n + slot * num_utterances + utt] = 1.0
    return out


def input_dim(cfg) -> int:
    return 2 * cfg.num_items + 2 * cfg.num_utterances
