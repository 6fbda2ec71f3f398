"""Two-player common-payoff trading game with cheap-talk signaling.

Each player is privately dealt one of ``num_items`` items, uniformly and
independently.  Player 1 makes a public utterance, then player 2 does.
Both players then privately request a trade, an ordered (give, want)
pair of item indices.  The team scores 1 iff the requests mirror the
actual deal: player 1 asks to give its own item for player 2's item and
player 2 asks the reverse.  Everything except the dealt items is public.

The only channel for coordinating on a correct trade is the two
utterances, so returns above chance require a signaling convention.
"""

import enum
import itertools
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np


class IllegalMoveError(ValueError):
    """Move applied in the wrong phase or with out-of-range arguments."""


class Phase(enum.Enum):
    DEAL = "deal"
    UTTERANCE1 = "utterance1"
    UTTERANCE2 = "utterance2"
    TRADE = "trade"
    TERMINAL = "terminal"


@dataclass(frozen=True)
class GameConfig:
    num_items: int = 4
    num_utterances: int = 4

    def __post_init__(self):
        if self.num_items < 1 or self.num_utterances < 1:
            raise ValueError("num_items and num_utterances must be >= 1")


TradePair = Tuple[int, int]


@dataclass(frozen=True)
class GameState:
    """Immutable snapshot; transitions return fresh states.

    item1/item2 are private to their owners, everything else is public.
    reward is None until the trade resolves.
    """

    cfg: GameConfig
    phase: Phase
    item1: int
    item2: int
    utt1: Optional[int] = None
    utt2: Optional[int] = None
    request1: Optional[TradePair] = None
    request2: Optional[TradePair] = None
    reward: Optional[int] = None


def deal(cfg: GameConfig, rng: np.random.Generator) -> GameState:
    """Deal both items i.i.d. uniform and advance to the first utterance."""
    items = rng.integers(0, cfg.num_items, size=2)
    return GameState(
        cfg=cfg, phase=Phase.UTTERANCE1, item1=int(items[0]), item2=int(items[1])
    )


def apply_utterance(s: GameState, u: int) -> GameState:
    if s.phase not in (Phase.UTTERANCE1, Phase.UTTERANCE2):
        raise IllegalMoveError(f"cannot utter in phase {s.phase.value}")
    if not 0 <= u < s.cfg.num_utterances:
        raise IllegalMoveError(f"utterance {u} out of range")
    if s.phase is Phase.UTTERANCE1:
        return replace(s, utt1=int(u), phase=Phase.UTTERANCE2)
    return replace(s, utt2=int(u), phase=Phase.TRADE)


def _check_pair(req, n):
    give, want = req
    if not (0 <= give < n and 0 <= want < n):
        raise IllegalMoveError(f"trade request {req!r} out of range")
    return int(give), int(want)


def resolve_trade(s: GameState, req1: TradePair, req2: TradePair) -> GameState:
    """Resolve both private requests; success iff they mirror the deal."""
    if s.phase is not Phase.TRADE:
        raise IllegalMoveError(f"cannot trade in phase {s.phase.value}")
    req1 = _check_pair(req1, s.cfg.num_items)
    req2 = _check_pair(req2, s.cfg.num_items)
    ok = req1 == (s.item1, s.item2) and req2 == (s.item2, s.item1)
    return replace(
        s, request1=req1, request2=req2, reward=int(ok), phase=Phase.TERMINAL
    )


# ---------------------------------------------------------------------------
# deterministic joint policies, evaluated exactly
#
# A joint deterministic policy is four lookup tables:
#   m1[i]        utterance by player 1 holding item i
#   m2[j, u1]    utterance by player 2 holding item j after hearing u1
#   t1[i, u2]    player 1's trade pair given its item and player 2's utterance
#   t2[j, u1]    player 2's trade pair given its item and player 1's utterance
# Each player conditions on its own item plus the opponent's utterance; its
# own utterance adds nothing since it is a function of the same item.


def policy_return(cfg, m1, m2, t1, t2) -> float:
    """Exact expected return of a joint policy, replaying every deal."""
    m1 = np.asarray(m1)
    m2 = np.asarray(m2)
    wins = 0
    for i, j in itertools.product(range(cfg.num_items), repeat=2):
        s = GameState(cfg=cfg, phase=Phase.UTTERANCE1, item1=i, item2=j)
        s = apply_utterance(s, int(m1[i]))
        s = apply_utterance(s, int(m2[j, s.utt1]))
        s = resolve_trade(s, tuple(t1[i, s.utt2]), tuple(t2[j, s.utt1]))
        wins += s.reward
    return wins / cfg.num_items**2


def perfect_signaling_policy(cfg: GameConfig):
    """The identity convention: announce your item, trade on what you heard.

    Requires num_utterances >= num_items; scores 1.0 on every deal.
    """
    n, u = cfg.num_items, cfg.num_utterances
    if u < n:
        raise ValueError("needs at least as many utterances as items")
    m1 = np.arange(n)
    m2 = np.tile(np.arange(n)[:, None], (1, u))
    t1 = np.stack(
        np.broadcast_arrays(np.arange(n)[:, None], np.arange(u)[None, :]), axis=-1
    )
    # player 2 gives j, wants the item named by utt1
    t2 = np.stack(
        np.broadcast_arrays(np.arange(n)[:, None], np.arange(u)[None, :]), axis=-1
    )
    return m1, m2, t1, t2


def _unpack_tables(flat, shape_rows, base, pair):
    # decode one mixed-radix integer per row into a lookup table
    digits = []
    f = flat
    for _ in range(shape_rows):
        digits.append(f % base)
        f = f // base
    tab = np.stack(digits, axis=1)  # (P, rows)
    if pair:
        return np.stack([tab // int(np.sqrt(base)), tab % int(np.sqrt(base))], axis=-1)
    return tab


def brute_force_optimum(cfg: GameConfig, max_tables: int = 20000) -> float:
    """Maximum expected return over every deterministic joint policy.

    Enumerates all four lookup tables exhaustively.  The trade-table
    count is (num_items^2) ** (num_items * num_utterances) per player,
    so this is only viable for toy sizes; raises once either trade-table
    family exceeds ``max_tables`` or the signaling combinations exceed
    10^4.
    """
    n, u = cfg.num_items, cfg.num_utterances
    n_m1 = u**n
    n_m2 = u ** (n * u)
    n_trade = (n * n) ** (n * u)
    if n_trade > max_tables or n_m1 * n_m2 > 10_000:
        raise ValueError(
            f"policy space too large: {n_m1}*{n_m2} signaling x {n_trade}^2 trade tables"
        )

    ii = np.arange(n)[:, None] + np.zeros((1, n), dtype=int)
    jj = ii.T
    # every trade table, decoded as (P, n*u, 2) then reshaped to (P, n, u, 2)
    tables = _unpack_tables(np.arange(n_trade), n * u, n * n, pair=True)
    tables = tables.reshape(n_trade, n, u, 2)

    best = 0.0
    for m1_flat in range(n_m1):
        m1 = _unpack_tables(np.array([m1_flat]), n, u, pair=False)[0]
        for m2_flat in range(n_m2):
            m2 = _unpack_tables(np.array([m2_flat]), n * u, u, pair=False)[0]
            m2 = m2.reshape(n, u)
            utt1 = m1[ii]  # (n, n) — constant along j
            utt2 = m2[jj, utt1]
            # a1[p, i, j]: table p requests exactly (i, j) on that deal
            g1 = tables[:, ii, utt2, 0]
            w1 = tables[:, ii, utt2, 1]
            a1 = ((g1 == ii) & (w1 == jj)).reshape(n_trade, n * n)
            g2 = tables[:, jj, utt1, 0]
            w2 = tables[:, jj, utt1, 1]
            a2 = ((g2 == jj) & (w2 == ii)).reshape(n_trade, n * n)
            counts = a1.astype(np.float64) @ a2.astype(np.float64).T
            best = max(best, float(counts.max()) / (n * n))
            if best == 1.0:
                return best
    return best
