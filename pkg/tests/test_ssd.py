import numpy as np
import pytest

from coopadv import attacks, ssd
from coopadv.ssd import (
    ALWAYS_COOPERATE,
    ALWAYS_DEFECT,
    AsymmetricGameError,
    DilemmaVerdict,
    IteratedMatrixGame,
    MgsdPayoffs,
    MixedPolicy,
    SocialMetricConfig,
    classify,
    classify_policy,
    empirical_defection_rate,
    estimate_value,
    induce_mgsd,
    prisoners_dilemma,
)


def oracle_verdict(r, p, s, t):
    # independent literal transcription of the four inequalities
    failed = []
    if not (r > p):
        failed.append("R>P")
    if not (r > s):
        failed.append("R>S")
    if not (2 * r > t + s):
        failed.append("2R>T+S")
    greed = t > r
    fear = p > s
    if not (greed or fear):
        failed.append("T>R or P>S")
    return DilemmaVerdict(
        is_dilemma=len(failed) == 0, greed=greed, fear=fear,
        failed_conditions=tuple(failed),
    )


class TestClassify:
    def test_canonical_dilemma(self):
        v = classify(MgsdPayoffs(R=3, P=1, S=0, T=5))
        assert v.is_dilemma and v.greed and v.fear
        assert v.failed_conditions == ()

    def test_neither_greed_nor_fear(self):
        v = classify(MgsdPayoffs(R=3, P=1, S=2, T=2))
        assert not v.is_dilemma
        assert not v.greed and not v.fear
        assert v.failed_conditions == ("T>R or P>S",)

    def test_boundary_equality_fails_strict_condition(self):
        v = classify(MgsdPayoffs(R=1, P=1, S=0, T=2))
        assert "R>P" in v.failed_conditions
        assert not v.is_dilemma

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            MgsdPayoffs(R=np.nan, P=0, S=0, T=0)
        with pytest.raises(ValueError):
            MgsdPayoffs(R=np.inf, P=0, S=0, T=0)

    def test_matches_literal_oracle_on_random_quadruples(self):
        rng = np.random.default_rng(0)
        # mix of continuous values and small integers so exact ties occur
        qs = np.concatenate(
            [rng.normal(0, 3, size=(50_000, 4)), rng.integers(-2, 3, size=(50_000, 4))]
        )
        for r, p, s, t in qs:
            assert classify(MgsdPayoffs(R=r, P=p, S=s, T=t)) == oracle_verdict(r, p, s, t)


class TestGameAndPolicies:
    def test_pd_stage_payoffs(self):
        pd = prisoners_dilemma()
        assert pd.stage_payoffs(ssd.COOPERATE, ssd.COOPERATE) == (3.0, 3.0)
        assert pd.stage_payoffs(ssd.DEFECT, ssd.DEFECT) == (1.0, 1.0)
        assert pd.stage_payoffs(ssd.COOPERATE, ssd.DEFECT) == (0.0, 5.0)
        assert pd.stage_payoffs(ssd.DEFECT, ssd.COOPERATE) == (5.0, 0.0)

    def test_game_validation(self):
        with pytest.raises(ValueError):
            IteratedMatrixGame(np.zeros((2, 3)))
        with pytest.raises(ValueError):
            IteratedMatrixGame([[np.nan, 0], [0, 0]])
        with pytest.raises(ValueError):
            IteratedMatrixGame(np.zeros((2, 2)), payoffs2=np.zeros((3, 3)))

    def test_policy_validation(self):
        with pytest.raises(ValueError):
            MixedPolicy([0.5, 0.6])
        with pytest.raises(ValueError):
            MixedPolicy([1.5, -0.5])

    def test_sample_batch_frequencies(self):
        rng = np.random.default_rng(1)
        pol = MixedPolicy([0.2, 0.8])
        a = pol.sample_batch(rng, 50_000)
        assert set(np.unique(a)) <= {0, 1}
        assert a.mean() == pytest.approx(0.8, abs=0.01)

    def test_defection_rate(self):
        rng = np.random.default_rng(2)
        assert empirical_defection_rate(ALWAYS_DEFECT, 100, rng) == 1.0
        assert empirical_defection_rate(ALWAYS_COOPERATE, 100, rng) == 0.0
        mixed = empirical_defection_rate(MixedPolicy([0.3, 0.7]), 50_000, rng)
        assert mixed == pytest.approx(0.7, abs=0.02)


class TestEstimateValue:
    def test_validation(self):
        pd = prisoners_dilemma()
        joint = (ALWAYS_COOPERATE, ALWAYS_COOPERATE)
        with pytest.raises(ValueError):
            estimate_value(pd, joint, episodes=0, rng=np.random.default_rng(0))
        with pytest.raises(ValueError):
            estimate_value(pd, joint, gamma=1.0, rng=np.random.default_rng(0))
        with pytest.raises(ValueError):
            estimate_value(pd, joint, start=1, rng=np.random.default_rng(0))
        with pytest.raises(ValueError):
            estimate_value(pd, joint, rng=np.random.default_rng(0), horizon="bogus")

    def test_deterministic_discounted_matches_closed_form_exactly(self):
        pd = prisoners_dilemma()
        joint = (ALWAYS_COOPERATE, ALWAYS_DEFECT)
        a = estimate_value(
            pd, joint, episodes=8, gamma=0.9, rng=np.random.default_rng(3),
            horizon="discounted",
        )
        b = estimate_value(
            pd, joint, episodes=3, gamma=0.9, rng=np.random.default_rng(99),
            horizon="discounted",
        )
        assert a == b  # zero variance: seed and episode count are irrelevant
        assert a[0] == pytest.approx(0.0, abs=1e-9)
        assert a[1] == pytest.approx(50.0, abs=1e-9)

    def test_pd_mutual_cooperation_thirty(self):
        pd = prisoners_dilemma()
        v1, v2 = estimate_value(
            pd, (ALWAYS_COOPERATE, ALWAYS_COOPERATE), episodes=4000, gamma=0.9,
            rng=np.random.default_rng(4),
        )
        # sd of one episode return is 3*sqrt(0.9)/0.1, about 28.5
        assert v1 == pytest.approx(30.0, abs=1.5)
        assert v2 == pytest.approx(30.0, abs=1.5)

    def test_pd_mutual_defection_ten(self):
        pd = prisoners_dilemma()
        v1, v2 = estimate_value(
            pd, (ALWAYS_DEFECT, ALWAYS_DEFECT), episodes=4000, gamma=0.9,
            rng=np.random.default_rng(5),
        )
        assert v1 == pytest.approx(10.0, abs=0.5)
        assert v2 == pytest.approx(10.0, abs=0.5)

    def test_gamma_zero_is_single_shot(self):
        pd = prisoners_dilemma()
        v = estimate_value(
            pd, (ALWAYS_DEFECT, ALWAYS_COOPERATE), episodes=10, gamma=0.0,
            rng=np.random.default_rng(6),
        )
        assert v == (5.0, 0.0)

    def test_ci_shrinks_as_root_episodes(self):
        pd = prisoners_dilemma()
        pol = MixedPolicy([0.5, 0.5])
        rng = np.random.default_rng(7)
        counts = [100, 400, 1600, 6400]
        sds = []
        for n in counts:
            vals = [
                estimate_value(pd, (pol, pol), episodes=n, gamma=0.9, rng=rng)[0]
                for _ in range(30)
            ]
            sds.append(np.std(vals, ddof=1))
        slope = np.polyfit(np.log(counts), np.log(sds), 1)[0]
        assert slope == pytest.approx(-0.5, abs=0.1)


class TestInduceMgsd:
    def test_pd_geometric_matches_closed_forms(self):
        pd = prisoners_dilemma()
        m = induce_mgsd(
            pd, ALWAYS_COOPERATE, ALWAYS_DEFECT, episodes=6000, gamma=0.9,
            rng=np.random.default_rng(8),
        )
        assert m.R == pytest.approx(30.0, abs=1.5)
        assert m.P == pytest.approx(10.0, abs=0.5)
        assert m.S == pytest.approx(0.0, abs=1e-12)
        assert m.T == pytest.approx(50.0, abs=2.5)

    def test_gamma_zero_recovers_stage_game_bitwise(self):
        pd = prisoners_dilemma()
        m = induce_mgsd(
            pd, ALWAYS_COOPERATE, ALWAYS_DEFECT, episodes=16, gamma=0.0,
            rng=np.random.default_rng(9),
        )
        assert (m.R, m.P, m.S, m.T) == (3.0, 1.0, 0.0, 5.0)

    def test_composition_with_classifier(self):
        pd = prisoners_dilemma()
        m = induce_mgsd(
            pd, ALWAYS_COOPERATE, ALWAYS_DEFECT, episodes=4000, gamma=0.9,
            rng=np.random.default_rng(10),
        )
        assert classify(m).is_dilemma

    def test_asymmetric_game_rejected(self):
        lopsided = IteratedMatrixGame(
            [[3.0, 0.0], [5.0, 1.0]], payoffs2=np.full((2, 2), 2.0)
        )
        with pytest.raises(AsymmetricGameError):
            induce_mgsd(
                lopsided, ALWAYS_COOPERATE, ALWAYS_DEFECT, episodes=64, gamma=0.0,
                rng=np.random.default_rng(11),
            )

    def test_mixed_policies_pass_symmetry_on_symmetric_game(self):
        pd = prisoners_dilemma()
        m = induce_mgsd(
            pd, MixedPolicy([0.9, 0.1]), MixedPolicy([0.1, 0.9]), episodes=4000,
            gamma=0.9, rng=np.random.default_rng(12),
        )
        assert np.isfinite([m.R, m.P, m.S, m.T]).all()


class TestSocialMetric:
    def cfg(self):
        return SocialMetricConfig(alpha=lambda th: float(th[0]), alpha_c=0.3, alpha_d=0.6)

    def test_threshold_examples(self):
        c = self.cfg()
        assert classify_policy(c, [0.1]) == "cooperative"
        assert classify_policy(c, [0.9]) == "defecting"
        assert classify_policy(c, [0.45]) == "unclassified"

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SocialMetricConfig(alpha=1.0, alpha_c=0.0, alpha_d=1.0)
        with pytest.raises(ValueError):
            SocialMetricConfig(alpha=lambda th: 0.0, alpha_c=0.7, alpha_d=0.3)

    def test_parameter_attack_flips_label(self):
        # victim sits delta/2 below the defection threshold; random search
        # inside the delta-box crosses it almost surely
        c = SocialMetricConfig(alpha=lambda th: float(th[0]), alpha_c=0.2, alpha_d=0.5)
        base = np.array([0.45])
        delta = 0.1

        def victim_eval(params):
            return 1.0 if classify_policy(c, params) == "defecting" else 0.0

        for seed in range(5):
            pert = attacks.attack_policy_params(
                victim_eval, base, delta, trials=64, rng=np.random.default_rng(seed)
            )
            assert classify_policy(c, base + pert.perturbation) == "defecting"
