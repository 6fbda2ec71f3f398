import itertools

import numpy as np
import pytest

from coopadv import pubbelief as pb
from coopadv.pubbelief import Belief, Prescription, ZeroProbabilityEventError
from coopadv.tradecomm import GameConfig


def bayes_oracle(prior, mapping, observed):
    """Independent reference: loop over items, apply Bayes' rule directly."""
    post = []
    for i, p in enumerate(prior):
        if np.ndim(mapping[i]) == 0:
            like = 1.0 if mapping[i] == observed else 0.0
        else:
            like = 1.0 if tuple(mapping[i]) == tuple(observed) else 0.0
        post.append(p * like)
    z = sum(post)
    if z == 0:
        return None
    return [x / z for x in post]


class TestBelief:
    def test_simplex_enforced(self):
        with pytest.raises(ValueError):
            Belief(p1=np.array([0.5, 0.6]), p2=np.array([0.5, 0.5]))
        with pytest.raises(ValueError):
            Belief(p1=np.array([-0.1, 1.1]), p2=np.array([0.5, 0.5]))
        with pytest.raises(ValueError):
            Belief(p1=np.array([1.0]), p2=np.array([0.5, 0.5]))

    def test_immutable(self):
        b = pb.initial_belief(GameConfig(3, 1))
        with pytest.raises(ValueError):
            b.p1[0] = 0.9


class TestInitialBelief:
    def test_four_items(self):
        b = pb.initial_belief(GameConfig(4, 4))
        assert np.array_equal(b.p1, [0.25, 0.25, 0.25, 0.25])
        assert np.array_equal(b.p2, [0.25, 0.25, 0.25, 0.25])

    def test_one_item(self):
        assert np.array_equal(pb.initial_belief(GameConfig(1, 1)).p1, [1.0])

    def test_twelve_items(self):
        b = pb.initial_belief(GameConfig(12, 12))
        assert b.p1.size == 12
        assert np.allclose(b.p1, 1 / 12)


class TestUpdate:
    def test_half_support(self):
        b = pb.initial_belief(GameConfig(4, 2))
        presc = Prescription(np.array([0, 0, 1, 1]))
        out = pb.update_belief(b, presc, 0, which_player=1)
        assert np.allclose(out.p1, [0.5, 0.5, 0.0, 0.0])
        assert np.array_equal(out.p2, b.p2)

    def test_uninformative_is_identity(self):
        b = pb.initial_belief(GameConfig(4, 2))
        presc = Prescription(np.array([1, 1, 1, 1]))
        out = pb.update_belief(b, presc, 1, which_player=2)
        assert np.allclose(out.p2, b.p2)
        # and stays fixed under repetition
        again = pb.update_belief(out, presc, 1, which_player=2)
        assert np.allclose(again.p2, out.p2)

    def test_injective_pins_item(self):
        b = pb.initial_belief(GameConfig(3, 3))
        presc = Prescription(np.array([2, 0, 1]))
        out = pb.update_belief(b, presc, 0, which_player=1)
        assert np.allclose(out.p1, [0.0, 1.0, 0.0])

    def test_zero_probability_event(self):
        b = pb.initial_belief(GameConfig(3, 2))
        presc = Prescription(np.array([0, 0, 0]))
        with pytest.raises(ZeroProbabilityEventError):
            pb.update_belief(b, presc, 1, which_player=1)

    def test_zero_prior_support_event(self):
        b = Belief(p1=np.array([1.0, 0.0]), p2=np.array([0.5, 0.5]))
        presc = Prescription(np.array([0, 1]))
        with pytest.raises(ZeroProbabilityEventError):
            pb.update_belief(b, presc, 1, which_player=1)

    def test_trade_pair_observation(self):
        b = pb.initial_belief(GameConfig(2, 1))
        presc = Prescription(np.array([[0, 1], [1, 0]]))
        out = pb.update_belief(b, presc, (1, 0), which_player=2)
        assert np.allclose(out.p2, [0.0, 1.0])

    def test_output_is_simplex(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            n = int(rng.integers(2, 6))
            u = int(rng.integers(1, 4))
            prior = rng.dirichlet(np.ones(n))
            b = Belief(p1=prior, p2=np.full(n, 1.0 / n))
            presc = Prescription(rng.integers(0, u, size=n))
            obs = int(rng.integers(0, u))
            try:
                out = pb.update_belief(b, presc, obs, which_player=1)
            except ZeroProbabilityEventError:
                continue
            assert out.p1.min() >= 0.0
            assert abs(out.p1.sum() - 1.0) <= 1e-9

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_matches_bayes_enumeration(self, n):
        # every prescription x observation at several priors, against the
        # hand-rolled oracle above
        rng = np.random.default_rng(100 + n)
        u = 3
        priors = [np.full(n, 1.0 / n)] + [rng.dirichlet(np.ones(n)) for _ in range(5)]
        for e in range(n):
            point = np.zeros(n)
            point[e] = 1.0
            priors.append(point)
        for mapping in itertools.product(range(u), repeat=n):
            presc = Prescription(np.array(mapping))
            for prior in priors:
                b = Belief(p1=prior.copy(), p2=np.full(n, 1.0 / n))
                for obs in range(u):
                    expected = bayes_oracle(prior, mapping, obs)
                    if expected is None:
                        with pytest.raises(ZeroProbabilityEventError):
                            pb.update_belief(b, presc, obs, which_player=1)
                    else:
                        out = pb.update_belief(b, presc, obs, which_player=1)
                        assert np.allclose(out.p1, expected, atol=1e-9)


class TestEncode:
    def test_layout_no_utterances(self):
        b = pb.initial_belief(GameConfig(2, 2))
        x = pb.encode(b, None, None, num_utterances=2)
        assert np.array_equal(x, [0.5, 0.5, 0.5, 0.5, 0, 0, 0, 0])

    def test_layout_first_utterance(self):
        b = pb.initial_belief(GameConfig(2, 2))
        x = pb.encode(b, 1, None, num_utterances=2)
        assert np.array_equal(x, [0.5, 0.5, 0.5, 0.5, 0, 1, 0, 0])

    def test_point_mass_block_sums(self):
        b = Belief(p1=np.array([0.0, 1.0]), p2=np.array([1.0, 0.0]))
        x = pb.encode(b, 0, 1, num_utterances=3)
        assert x.sum() == 4.0
        assert x.size == 2 * 2 + 2 * 3

    def test_round_trip(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            n, u = int(rng.integers(1, 6)), int(rng.integers(1, 5))
            b = Belief(p1=rng.dirichlet(np.ones(n)), p2=rng.dirichlet(np.ones(n)))
            x = pb.encode(b, None, None, num_utterances=u)
            assert np.array_equal(x[:n], b.p1)
            assert np.array_equal(x[n : 2 * n], b.p2)

    def test_out_of_range_utterance(self):
        b = pb.initial_belief(GameConfig(2, 2))
        with pytest.raises(ValueError):
            pb.encode(b, 2, None, num_utterances=2)

    def test_input_dim(self):
        assert pb.input_dim(GameConfig(4, 4)) == 16
        assert pb.input_dim(GameConfig(12, 12)) == 48
