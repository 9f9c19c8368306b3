from __future__ import annotations

import numpy as np
import pytest

from pdffusion.axioms import (
    Axiom,
    AxiomCheckReport,
    AxiomCounterexample,
    AxiomStatus,
    check_axiom,
    expected_matrix,
)
from pdffusion.errors import UnsupportedAxiomError
from pdffusion.pooling import ChiKind, ChiTransform, PoolingKind, PoolingSpec

TRIALS = 25


def linear(w=(0.4, 0.6)):
    return PoolingSpec(PoolingKind.LINEAR, weights=np.array(w))


def log_linear(w=(0.3, 0.7)):
    return PoolingSpec(PoolingKind.LOG_LINEAR, weights=np.array(w))


class TestExpectedMatrix:
    def test_covers_every_pair(self):
        matrix = expected_matrix()
        assert len(matrix) == 10 * 12
        kinds = {k for k, _ in matrix}
        assert PoolingKind.CHI_TRANSFORM not in kinds
        assert len(kinds) == 10

    def test_known_entries(self):
        matrix = expected_matrix()
        assert matrix[(PoolingKind.DICTATORSHIP, Axiom.A8)] is AxiomStatus.SATISFIED
        assert matrix[(PoolingKind.LOG_LINEAR, Axiom.A2)] is AxiomStatus.NOT_APPLICABLE
        assert matrix[(PoolingKind.HOLDER, Axiom.A1)] is AxiomStatus.EQUAL_WEIGHTS_ONLY
        assert matrix[(PoolingKind.MULTIPLICATIVE, Axiom.A1)] is AxiomStatus.SATISFIED
        assert matrix[(PoolingKind.LINEAR, Axiom.A10)] is AxiomStatus.NOT_ESTABLISHED

    def test_row_and_column_counts(self):
        matrix = expected_matrix()

        def row(kind):
            return [matrix[(kind, a)] for a in Axiom]

        assert row(PoolingKind.LINEAR).count(AxiomStatus.SATISFIED) == 6
        assert row(PoolingKind.DICTATORSHIP).count(AxiomStatus.SATISFIED) == 10
        col7 = [matrix[(k, Axiom.A7)] for k in {k for k, _ in matrix}]
        assert col7.count(AxiomStatus.SATISFIED) == 10
        na = [pair for pair, st in matrix.items() if st is AxiomStatus.NOT_APPLICABLE]
        assert len(na) == 6
        assert all(a is Axiom.A2 for _, a in na)


class TestReportContract:
    def test_pass_has_no_counterexample(self):
        rep = check_axiom(linear(), Axiom.A3, trials=TRIALS, seed=1)
        assert rep.passed
        assert rep.counterexample is None
        assert rep.max_violation <= 1e-6
        assert rep.trials == TRIALS

    def test_failure_carries_counterexample(self):
        rep = check_axiom(linear(), Axiom.A10, trials=TRIALS, seed=1)
        assert not rep.passed
        ce = rep.counterexample
        assert ce is not None
        assert 0 <= ce.trial < TRIALS
        assert ce.seed == 1
        assert ce.detail

    def test_inconsistent_report_rejected(self):
        with pytest.raises(ValueError):
            AxiomCheckReport(
                axiom=Axiom.A1,
                pooling=linear(),
                trials=1,
                max_violation=0.0,
                passed=True,
                counterexample=AxiomCounterexample(0, 0, "x"),
            )

    def test_deterministic_given_seed(self):
        a = check_axiom(linear(), Axiom.A10, trials=10, seed=3)
        b = check_axiom(linear(), Axiom.A10, trials=10, seed=3)
        assert a.max_violation == b.max_violation
        assert a.counterexample == b.counterexample

    def test_trials_validated(self):
        with pytest.raises(ValueError):
            check_axiom(linear(), Axiom.A1, trials=0)

    def test_axiom_accepts_string(self):
        rep = check_axiom(linear((0.5, 0.5)), "A1", trials=5, seed=0)
        assert rep.axiom is Axiom.A1
        assert rep.passed


class TestSymmetry:
    def test_equal_weights_pass(self):
        assert check_axiom(linear((0.5, 0.5)), Axiom.A1, trials=TRIALS, seed=2).passed

    def test_unequal_weights_fail(self):
        assert not check_axiom(linear((0.3, 0.7)), Axiom.A1, trials=TRIALS, seed=2).passed

    def test_unweighted_product_passes(self):
        spec = PoolingSpec(PoolingKind.MULTIPLICATIVE)
        assert check_axiom(spec, Axiom.A1, trials=TRIALS, seed=2).passed

    def test_dictatorship_fails(self):
        spec = PoolingSpec(PoolingKind.DICTATORSHIP, dictator=2)
        assert not check_axiom(spec, Axiom.A1, trials=TRIALS, seed=2).passed


class TestZeroEvents:
    def test_linear_preserves_null_events(self):
        assert check_axiom(linear(), Axiom.A2, trials=TRIALS, seed=4).passed

    def test_extra_member_breaks_preservation(self):
        spec = PoolingSpec(
            PoolingKind.GENERALIZED_LINEAR, weights=np.array([0.2, 0.5]), w0=0.3
        )
        rep = check_axiom(spec, Axiom.A2, trials=TRIALS, seed=4)
        assert not rep.passed
        assert rep.counterexample is not None

    @pytest.mark.parametrize(
        "kind",
        [
            PoolingKind.LOG_LINEAR,
            PoolingKind.GENERALIZED_LOG_LINEAR,
            PoolingKind.HOLDER,
            PoolingKind.INVERSE_LINEAR,
            PoolingKind.MULTIPLICATIVE,
            PoolingKind.GENERALIZED_MULTIPLICATIVE,
        ],
    )
    def test_positive_only_kinds_not_applicable(self, kind):
        spec = PoolingSpec(kind, weights=np.array([0.5, 0.5]), alpha=2.0)
        with pytest.raises(UnsupportedAxiomError):
            check_axiom(spec, Axiom.A2, trials=1)

    def test_transform_pool_follows_its_transform(self):
        positive = PoolingSpec(
            PoolingKind.CHI_TRANSFORM,
            weights=np.array([0.5, 0.5]),
            chi=ChiTransform(ChiKind.RECIPROCAL),
        )
        with pytest.raises(UnsupportedAxiomError):
            check_axiom(positive, Axiom.A2, trials=1)
        identity = PoolingSpec(
            PoolingKind.CHI_TRANSFORM,
            weights=np.array([0.5, 0.5]),
            chi=ChiTransform(ChiKind.IDENTITY),
        )
        assert check_axiom(identity, Axiom.A2, trials=10, seed=4).passed


class TestUnanimityAndSetwise:
    def test_unanimity_holds_for_averages(self):
        assert check_axiom(linear(), Axiom.A3, trials=TRIALS, seed=5).passed
        assert check_axiom(log_linear(), Axiom.A3, trials=TRIALS, seed=5).passed

    def test_fixed_density_ignores_unanimity(self):
        rep = check_axiom(PoolingSpec(PoolingKind.DOGMATIC), Axiom.A3, trials=TRIALS, seed=5)
        assert not rep.passed

    def test_strong_setwise(self):
        assert check_axiom(linear(), Axiom.A4, trials=TRIALS, seed=6).passed
        assert not check_axiom(log_linear(), Axiom.A4, trials=TRIALS, seed=6).passed

    def test_weak_setwise(self):
        spec = PoolingSpec(
            PoolingKind.GENERALIZED_LINEAR, weights=np.array([0.2, 0.5]), w0=0.3
        )
        assert check_axiom(spec, Axiom.A5, trials=TRIALS, seed=6).passed
        assert check_axiom(PoolingSpec(PoolingKind.DOGMATIC), Axiom.A5, trials=TRIALS, seed=6).passed
        assert not check_axiom(log_linear(), Axiom.A5, trials=TRIALS, seed=6).passed


class TestLocality:
    def test_shared_values_fuse_identically(self):
        assert check_axiom(log_linear(), Axiom.A6, trials=TRIALS, seed=7).passed
        assert check_axiom(linear(), Axiom.A6, trials=TRIALS, seed=7).passed

    def test_calibration_function_breaks_locality(self):
        spec = PoolingSpec(PoolingKind.GENERALIZED_LOG_LINEAR, weights=np.array([0.3, 0.7]))
        assert not check_axiom(spec, Axiom.A6, trials=TRIALS, seed=7).passed

    @pytest.mark.parametrize(
        "spec",
        [
            linear(),
            log_linear(),
            PoolingSpec(PoolingKind.HOLDER, weights=np.array([0.35, 0.65]), alpha=2.0),
            PoolingSpec(PoolingKind.DOGMATIC),
            PoolingSpec(PoolingKind.GENERALIZED_MULTIPLICATIVE, weights=np.array([0.9, 0.6])),
        ],
    )
    def test_locality_up_to_normalization_holds_broadly(self, spec):
        assert check_axiom(spec, Axiom.A7, trials=TRIALS, seed=8).passed


class TestTwoDimensional:
    def test_dictatorship_preserves_independence(self):
        spec = PoolingSpec(PoolingKind.DICTATORSHIP, dictator=2)
        assert check_axiom(spec, Axiom.A8, trials=TRIALS, seed=9).passed

    def test_mixture_breaks_independence(self):
        assert not check_axiom(linear(), Axiom.A8, trials=TRIALS, seed=9).passed

    def test_geometric_average_keeps_factorization(self):
        assert check_axiom(log_linear(), Axiom.A9, trials=TRIALS, seed=9).passed

    def test_mixture_breaks_factorization(self):
        assert not check_axiom(linear(), Axiom.A9, trials=TRIALS, seed=9).passed


class TestUpdating:
    def test_update_commutes_for_geometric_family(self):
        assert check_axiom(log_linear(), Axiom.A10, trials=TRIALS, seed=10).passed
        spec = PoolingSpec(PoolingKind.GENERALIZED_LOG_LINEAR, weights=np.array([0.3, 0.7]))
        assert check_axiom(spec, Axiom.A10, trials=TRIALS, seed=10).passed

    def test_update_does_not_commute_for_averages(self):
        rep = check_axiom(linear(), Axiom.A10, trials=TRIALS, seed=10)
        assert not rep.passed

    def test_single_agent_update(self):
        assert check_axiom(PoolingSpec(PoolingKind.MULTIPLICATIVE), Axiom.A11, trials=TRIALS, seed=11).passed
        assert not check_axiom(linear(), Axiom.A11, trials=TRIALS, seed=11).passed

    def test_fused_likelihood_closed_forms(self):
        for spec in [
            log_linear(),
            PoolingSpec(PoolingKind.MULTIPLICATIVE),
            PoolingSpec(PoolingKind.GENERALIZED_MULTIPLICATIVE, weights=np.array([0.9, 0.6])),
            PoolingSpec(PoolingKind.DICTATORSHIP, dictator=2),
            PoolingSpec(PoolingKind.DOGMATIC),
        ]:
            assert check_axiom(spec, Axiom.A12, trials=TRIALS, seed=12).passed

    def test_fused_likelihood_depends_on_profile_for_averages(self):
        assert not check_axiom(linear(), Axiom.A12, trials=TRIALS, seed=12).passed
