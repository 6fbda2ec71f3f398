"""Coordinator-side approximate policy iteration on the public belief.

The trading game is recast as a belief MDP.  A fictitious coordinator
sees only public information, tracks the posterior over the private
deal, and at each decision point publishes a prescription mapping the
acting player's item to an action.  Everyone can replay the Bayes
update, so the belief stays common knowledge.  Decision points:

  1. player 1's utterance     (table: item -> utterance)
  2. player 2's utterance     (table: item -> utterance)
  3. the simultaneous trade   (one item -> (give, want) table per player)

A candidate is assessed by expected immediate reward plus the estimated
value of the successor belief.  Utterance phases have no immediate
reward, so assessment sums V-hat over the successor encodings weighted
by the predicted chance of each utterance.  The trade ends the game, so
its assessment is the exact success probability under the current
belief and no net is consulted.

Training rolls out episodes with eps-greedy selection and regresses the
net toward the realized 0/1 return at every visited decision point
(Monte-Carlo targets; at a three-decision horizon bootstrapping buys
nothing).  Evaluation enumerates the public branches of the greedy
policy and is exact.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import attacks, tradecomm, valuenet as vn
from .pubbelief import Belief, Prescription, encode, initial_belief
from .tradecomm import GameConfig, Phase

# fixed default so evaluation curves are comparable across runs
EVAL_SEED = 20_240_817


@dataclass(frozen=True)
class CapiConfig:
    episodes: int = 2000
    candidates: int = 64
    explore_start: float = 0.5
    explore_end: float = 0.05
    lr: float = 0.3
    eval_every: int = 20
    seed: int = 0
    hidden: Tuple[int, ...] = (64, 64)
    eval_seed: int = EVAL_SEED
    replay_size: int = 1024
    batch_size: int = 64
    updates_per_episode: int = 24
    lr_end: float = 0.0  # > 0 decays the step size linearly to this value

    def __post_init__(self):
        if self.episodes < 0:
            raise ValueError("episodes must be >= 0")
        if self.candidates < 1:
            raise ValueError("candidates must be >= 1")
        for name in ("explore_start", "explore_end"):
            e = getattr(self, name)
            if not 0.0 <= e <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.eval_every < 1:
            raise ValueError("eval_every must be >= 1")
        if min(self.replay_size, self.batch_size, self.updates_per_episode) < 1:
            raise ValueError("replay knobs must be >= 1")
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))


@dataclass(frozen=True)
class TrainRecord:
    episode: int
    eval_return: float
    attack_kind: str
    epsilon: float


@dataclass(frozen=True)
class TrainResult:
    records: tuple
    net: vn.ValueNet


def explore_epsilon(cfg: CapiConfig, episode: int) -> float:
    """Linear decay over the first half of training, flat afterwards."""
    half = max(1, cfg.episodes // 2)
    t = min(1.0, episode / half)
    return cfg.explore_start + t * (cfg.explore_end - cfg.explore_start)


def init_value_net(cfg: CapiConfig, game: GameConfig, rng) -> vn.ValueNet:
    d = 2 * game.num_items + 2 * game.num_utterances
    return vn.init_net([d, *cfg.hidden, 1], rng)


# ---------------------------------------------------------------------------
# candidate generation


def _utterance_candidates(game, k, rng, include_canonical=True):
    n, u = game.num_items, game.num_utterances
    cands = rng.integers(0, u, size=(k, n))
    if include_canonical:
        # identity signaling: say your item (mod the alphabet)
        cands = np.concatenate([cands, (np.arange(n) % u)[None]], axis=0)
    return cands


def _trade_candidates(game, b, k, rng, include_canonical=True):
    n = game.num_items
    t1 = rng.integers(0, n, size=(k, n, 2))
    t2 = rng.integers(0, n, size=(k, n, 2))
    if include_canonical:
        # give your own item, want the other's most probable one
        own = np.arange(n)
        c1 = np.stack([own, np.full(n, int(b.p2.argmax()))], axis=1)
        c2 = np.stack([own, np.full(n, int(b.p1.argmax()))], axis=1)
        t1 = np.concatenate([t1, c1[None]], axis=0)
        t2 = np.concatenate([t2, c2[None]], axis=0)
    return t1, t2


# ---------------------------------------------------------------------------
# assessment


def _successor_inputs(b, cands, which_player, utt1, game):
    """Successor belief encodings for a batch of utterance tables.

    Returns (X, mass): X[p, a] is the encoded public state after
    candidate p's table produces utterance a, mass[p, a] its predicted
    probability.  Rows with zero mass carry junk and must be masked.
    """
    n, u = game.num_items, game.num_utterances
    prior = b.p1 if which_player == 1 else b.p2
    match = cands[:, None, :] == np.arange(u)[None, :, None]  # (P, u, n)
    mass = match @ prior
    posts = match * prior
    np.divide(posts, mass[..., None], out=posts, where=mass[..., None] > 0)
    x = np.zeros((cands.shape[0], u, 2 * n + 2 * u))
    if which_player == 1:
        x[:, :, :n] = posts
        x[:, :, n : 2 * n] = b.p2
        x[:, :, 2 * n : 2 * n + u] = np.eye(u)  # the utterance is the branch
    else:
        x[:, :, :n] = b.p1
        x[:, :, n : 2 * n] = posts
        x[:, :, 2 * n + int(utt1)] = 1.0
        x[:, :, 2 * n + u :] = np.eye(u)
    return x, mass


def _assess_utterances(net, b, cands, which_player, utt1, game, attack=None):
    x, mass = _successor_inputs(b, cands, which_player, utt1, game)
    p, u, d = x.shape
    flat = x.reshape(p * u, d)
    if attacks.is_active(attack):
        flat = attacks.fgsm_belief_batch(net, flat, attack.epsilon)
    vals = vn.forward_batch(net, flat).reshape(p, u)
    return (mass * np.where(mass > 0, vals, 0.0)).sum(axis=1)


def _assess_trades(b, t1, t2):
    """Exact success probability of each joint trade-table pair under b."""
    n = b.num_items
    own = np.arange(n)
    g1 = t1[:, :, 0] == own
    w1 = t1[:, :, 1]
    g2 = t2[:, :, 0] == own
    w2 = t2[:, :, 1]
    # success on deal (i, j) needs g1[i], w1[i] = j, g2[j], w2[j] = i
    g2_at = np.take_along_axis(g2, w1, axis=1)
    w2_at = np.take_along_axis(w2, w1, axis=1)
    term = b.p1 * g1 * b.p2[w1] * g2_at * (w2_at == own)
    return term.sum(axis=1)


def assess_prescription(net, b, presc, phase, game, utt1=None, attack=None):
    """Assessed value of one prescription at the given decision point.

    Utterance phases: predicted-probability-weighted value of the
    successor encodings (immediate reward is zero there).  Trade phase:
    ``presc`` is a (presc1, presc2) pair and the result is the exact
    expected reward, terminal value zero.
    """
    if phase is Phase.UTTERANCE1:
        return float(_assess_utterances(net, b, presc.mapping[None], 1, None, game, attack)[0])
    if phase is Phase.UTTERANCE2:
        if utt1 is None:
            raise ValueError("utterance-2 assessment needs the first utterance")
        return float(_assess_utterances(net, b, presc.mapping[None], 2, utt1, game, attack)[0])
    if phase is Phase.TRADE:
        p1, p2 = presc
        return float(_assess_trades(b, p1.mapping[None], p2.mapping[None])[0])
    raise ValueError(f"no decision point in phase {phase}")


def _pick(assessed, mode, eps, rng):
    best = int(np.argmax(assessed))  # ties -> lowest index
    if mode == "train" and rng.random() < eps:
        return int(rng.integers(len(assessed)))
    return best


def select_prescription(
    net,
    b,
    phase,
    game,
    k,
    mode,
    rng,
    explore_eps=0.0,
    utt1=None,
    attack=None,
    include_canonical=True,
):
    """Draw candidates, assess, and pick greedily or eps-greedily.

    Returns a Prescription for utterance phases, a (presc1, presc2)
    pair for the trade.  The candidate set is ``k`` seeded-random tables
    plus one canonical table appended last (identity signaling, or the
    belief-argmax trade).
    """
    if mode not in ("train", "eval"):
        raise ValueError(f"unknown mode {mode!r}")
    if phase in (Phase.UTTERANCE1, Phase.UTTERANCE2):
        which = 1 if phase is Phase.UTTERANCE1 else 2
        cands = _utterance_candidates(game, k, rng, include_canonical)
        assessed = _assess_utterances(net, b, cands, which, utt1, game, attack)
        return Prescription(cands[_pick(assessed, mode, explore_eps, rng)])
    if phase is Phase.TRADE:
        t1, t2 = _trade_candidates(game, b, k, rng, include_canonical)
        assessed = _assess_trades(b, t1, t2)
        j = _pick(assessed, mode, explore_eps, rng)
        return Prescription(t1[j]), Prescription(t2[j])
    raise ValueError(f"no decision point in phase {phase}")


# ---------------------------------------------------------------------------
# training


def _run_episode(net, game, cfg, rng, eps, attack):
    """One eps-greedy rollout.

    Returns the visited encodings and the episode's return-to-go target:
    the exact success probability of the chosen trade pair under the
    final belief.  That value is the conditional expectation of the
    realized 0/1 reward given the public trajectory (the belief is the
    law of the deal given that trajectory), so regressing on it is
    plain Monte-Carlo with the terminal deal-lottery integrated out;
    binary-outcome noise at fixed public state would otherwise drown
    the sharp-versus-diffuse signal at desk scale.
    """
    from .pubbelief import update_belief

    u = game.num_utterances
    s = tradecomm.deal(game, rng)
    b0 = initial_belief(game)
    x0 = encode(b0, None, None, u)

    p1 = select_prescription(
        net, b0, Phase.UTTERANCE1, game, cfg.candidates, "train", rng, eps, attack=attack
    )
    s = tradecomm.apply_utterance(s, int(p1.mapping[s.item1]))
    b1 = update_belief(b0, p1, s.utt1, which_player=1)
    x1 = encode(b1, s.utt1, None, u)

    p2 = select_prescription(
        net, b1, Phase.UTTERANCE2, game, cfg.candidates, "train", rng, eps,
        utt1=s.utt1, attack=attack,
    )
    s = tradecomm.apply_utterance(s, int(p2.mapping[s.item2]))
    b2 = update_belief(b1, p2, s.utt2, which_player=2)
    x2 = encode(b2, s.utt1, s.utt2, u)

    tp1, tp2 = select_prescription(
        net, b2, Phase.TRADE, game, cfg.candidates, "train", rng, eps, attack=attack
    )
    target = float(_assess_trades(b2, tp1.mapping[None], tp2.mapping[None])[0])
    s = tradecomm.resolve_trade(s, tuple(tp1.mapping[s.item1]), tuple(tp2.mapping[s.item2]))
    xs = np.stack([x0, x1, x2])
    if attacks.is_active(attack):
        # the stored representation is corrupted once, against the net that
        # saw it; the later regression queries read the corrupted copy
        xs = attacks.fgsm_belief_batch(net, xs, attack.epsilon)
    return list(xs), target


class _Replay:
    """Fixed-capacity ring of (encoding, target) pairs."""

    def __init__(self, capacity, dim):
        self.x = np.empty((capacity, dim))
        self.y = np.empty(capacity)
        self.n = 0
        self.head = 0

    def push(self, x, y):
        self.x[self.head] = x
        self.y[self.head] = y
        self.head = (self.head + 1) % self.x.shape[0]
        self.n = min(self.n + 1, self.x.shape[0])

    def sample(self, batch_size, rng):
        idx = rng.integers(0, self.n, size=min(batch_size, self.n))
        return self.x[idx], self.y[idx]


def learning_rate(cfg: CapiConfig, episode: int) -> float:
    """Constant by default; linear decay to lr_end when that is set."""
    if cfg.lr_end <= 0.0:
        return cfg.lr
    t = episode / max(1, cfg.episodes - 1) if cfg.episodes > 1 else 1.0
    return cfg.lr + t * (cfg.lr_end - cfg.lr)


def _regress(net, replay, cfg, rng, lr):
    # minibatch quadratic regression toward the stored targets; attacked
    # runs already hold corrupted encodings in the buffer
    for _ in range(cfg.updates_per_episode):
        xb, yb = replay.sample(cfg.batch_size, rng)
        v = vn.forward_batch(net, xb)
        rep = vn.backward_batch(net, xb, (v - yb) / len(yb))
        net = vn.sgd_step(net, rep, lr)
    return net


def run_training(
    cfg: CapiConfig,
    game: GameConfig,
    attack: Optional[attacks.AttackSpec] = None,
    perturb_eval: bool = False,
) -> TrainResult:
    """Full training run; returns the eval curve and the final net.

    ``perturb_eval`` reports the eval curve under the same perturbation
    the training saw; the default reports clean evaluations.
    """
    spec = attack if attack is not None else attacks.NO_ATTACK
    rng = np.random.default_rng(cfg.seed)
    net = init_value_net(cfg, game, rng)
    replay = _Replay(cfg.replay_size, net.input_dim)
    records = []
    for ep in range(cfg.episodes):
        eps = explore_epsilon(cfg, ep)
        xs, target = _run_episode(net, game, cfg, rng, eps, spec)
        for x in xs:
            replay.push(x, target)
        net = _regress(net, replay, cfg, rng, learning_rate(cfg, ep))
        if (ep + 1) % cfg.eval_every == 0:
            r = evaluate(
                net, game, cfg.candidates, eval_seed=cfg.eval_seed,
                attack=spec if perturb_eval else None,
            )
            records.append(
                TrainRecord(
                    episode=ep + 1,
                    eval_return=r,
                    attack_kind=spec.kind,
                    epsilon=spec.epsilon,
                )
            )
    return TrainResult(records=tuple(records), net=net)


def train(cfg, game, attack=None):
    """Eval-curve records only; see run_training for the net as well."""
    return list(run_training(cfg, game, attack).records)


# ---------------------------------------------------------------------------
# exact evaluation


def evaluate(net, game, k=64, eval_seed=EVAL_SEED, attack=None) -> float:
    """Exact expected return of the greedy policy.

    Greedy selection depends only on the public state, so the episode
    tree has at most 1 + u + u^2 decision nodes.  Each node draws its
    candidates from an rng keyed by (eval_seed, depth, utterances so
    far): identical public states always see identical candidates, and
    the whole computation is deterministic given the net.  The return
    is the branch-mass-weighted exact trade success, summed over
    branches.

    ``attack`` perturbs the value queries during selection (the trade
    assessment consults no net); the environment itself is never
    perturbed.
    """
    from .pubbelief import update_belief

    u = game.num_utterances
    b0 = initial_belief(game)
    cands1 = _utterance_candidates(game, k, np.random.default_rng([eval_seed, 0]))
    p1 = cands1[int(np.argmax(_assess_utterances(net, b0, cands1, 1, None, game, attack)))]
    mass1 = np.bincount(p1, weights=b0.p1, minlength=u)

    total = 0.0
    for a in np.flatnonzero(mass1 > 0):
        a = int(a)
        b1 = update_belief(b0, Prescription(p1), a, which_player=1)
        rng_a = np.random.default_rng([eval_seed, 1, a])
        cands2 = _utterance_candidates(game, k, rng_a)
        p2 = cands2[
            int(np.argmax(_assess_utterances(net, b1, cands2, 2, a, game, attack)))
        ]
        mass2 = np.bincount(p2, weights=b1.p2, minlength=u)
        for c in np.flatnonzero(mass2 > 0):
            c = int(c)
            b2 = update_belief(b1, Prescription(p2), c, which_player=2)
            rng_ac = np.random.default_rng([eval_seed, 2, a, c])
            t1, t2 = _trade_candidates(game, b2, k, rng_ac)
            ers = _assess_trades(b2, t1, t2)
            total += mass1[a] * mass2[c] * float(ers[int(np.argmax(ers))])
    return float(total)
