from fractions import Fraction
from math import exp, log, sqrt
import re
import numpy as np
import pytest
from toric_embed.embedding import (
    MAX_WITNESSES,
    EmbeddingReport,
    EmbeddingVerifier,
    PhiTerm,
    Sampler,
    Witness,
    counterexample_search,
    cycle_certificate,
    cycle_order,
    evaluate_phi,
    lemma1_certificate,
    pair_delta,
    phi_decomposition,
    phi_positivity,
    replay_witness,
    verify_embedding,
)
from toric_embed.inclusion import EvaluationMode, build_from_differences, build_weakly_reversible
from toric_embed.model import EGraph
from toric_embed.polyhedral import SignVector, fan_from_hyperplanes
from tests.utils import (
    utils_example1_graph,
    utils_four_cycle_graph,
    utils_orthogonal_pair_graph,
    utils_single_edge_graph,
    utils_triangle_graph,
)

TRIANGLE = [(0, 0), (1, 0), (0, 1)]


def utils_witness(sample: int) -> Witness:
    return Witness(sample, (1.0, 0.0), (1.0,), (1.0, 0.0), ((-1.0, 0.0),), 1.0)


def test_verify_embedding_example1():
    report = verify_embedding(utils_example1_graph(), 0.1, sampler=Sampler(samples=2000, seed=3))
    assert report.samples == 2000
    assert report.violations == 0
    assert report.passed
    assert report.witnesses == ()


@pytest.mark.parametrize(
    "graph_builder",
    [utils_triangle_graph, utils_orthogonal_pair_graph, utils_four_cycle_graph],
)
def test_verify_embedding_weakly_reversible(graph_builder):
    report = verify_embedding(graph_builder(), 0.5, sampler=Sampler(samples=1500, seed=1))
    assert report.passed


def test_verify_embedding_strict_mode():
    report = verify_embedding(
        utils_example1_graph(), 0.1, EvaluationMode.STRICT, sampler=Sampler(samples=200, seed=0)
    )
    assert report.passed
    assert report.mode == EvaluationMode.STRICT


def test_verify_embedding_is_deterministic():
    first = verify_embedding(utils_triangle_graph(), 0.5, sampler=Sampler(samples=300, seed=11))
    second = verify_embedding(utils_triangle_graph(), 0.5, sampler=Sampler(samples=300, seed=11))
    assert first.to_dict() == second.to_dict()


def test_verify_embedding_rejects_single_edge():
    with pytest.raises(
        AssertionError,
        match=re.escape("Graph is not weakly reversible: edge `0` (0->1) lies on no directed cycle"),
    ):
        verify_embedding(utils_single_edge_graph(), 0.5)


def test_counterexample_search_single_edge():
    graph = utils_single_edge_graph()
    report = counterexample_search(graph, 0.5, Sampler(samples=1000, seed=0))
    assert report.violations > 0
    assert not report.passed
    assert 0 < len(report.witnesses) <= MAX_WITNESSES
    assert [w.sample for w in report.witnesses] == sorted(w.sample for w in report.witnesses)

    inclusion = build_from_differences(graph, 0.5)
    assert replay_witness(inclusion, report.witnesses[0])

    frame = report.to_frame()
    assert list(frame.columns) == ["sample", "residual", "X_1", "X_2", "k_1", "rhs_1", "rhs_2"]
    assert len(frame) == len(report.witnesses)


def test_counterexample_at_explicit_point():
    graph = utils_single_edge_graph()
    inclusion = build_from_differences(graph, 0.5)
    verifier = EmbeddingVerifier(inclusion, graph, 0.5)
    report = verifier.check_batch(0, np.asarray([[3.0, 0.0], [-3.0, 0.0]]), np.asarray([[1.0], [1.0]]))
    assert report.violations == 1
    assert report.witnesses[0].point == (3.0, 0.0)
    assert report.witnesses[0].residual > 0.5


@pytest.mark.parametrize(
    "state, rates",
    [
        ((Fraction(1, 100), Fraction(50)), (Fraction(1, 10), Fraction(10))),
        ((Fraction(1, 100), Fraction(50)), (Fraction(10), Fraction(1, 10))),
        ((Fraction(7), Fraction(1, 3)), (Fraction(10), Fraction(1, 10))),
        ((Fraction(3, 2), Fraction(9, 4)), (Fraction(1), Fraction(1))),
        ((Fraction(1), Fraction(1)), (Fraction(1), Fraction(1))),
    ],
)
def test_check_exact_example1(state, rates):
    graph = utils_example1_graph()
    verifier = EmbeddingVerifier(build_weakly_reversible(graph, 0.1), graph, 0.1, exact=True)
    report = verifier.check_exact(0, [state], [rates])
    assert report.samples == 1
    assert report.violations == 0


def test_check_exact_finds_violation():
    graph = utils_single_edge_graph()
    verifier = EmbeddingVerifier(build_from_differences(graph, 0.5), graph, 0.5, exact=True)
    report = verifier.check_exact(4, [(20, 1), (Fraction(1, 20), 1)], [(1,), (1,)])
    assert report.violations == 1
    assert report.witnesses[0].sample == 4
    assert report.witnesses[0].point == pytest.approx((log(20), 0.0))
    assert report.witnesses[0].rhs == pytest.approx((1.0, 0.0))


def test_verify_embedding_exact():
    report = verify_embedding(utils_example1_graph(), 0.1, sampler=Sampler(samples=500, seed=0), exact=True)
    assert report.samples == 500
    assert report.violations == 0


@pytest.mark.parametrize(
    "states, rates, expected_error",
    [
        ([(1, 1)], [(0.5, 1)], "Sample `0` is not rational"),
        ([(0, 1)], [(1, 1)], "Sample `0` has a state that is not strictly positive"),
        ([(1, 1)], [(1,)], "Sample `0` has 1 rates, expected 2"),
        ([(1, 1)], [], "Got 1 `states` but 0 rate rows"),
    ],
)
def test_check_exact_invalid(states, rates, expected_error: str):
    graph = utils_example1_graph()
    verifier = EmbeddingVerifier(build_weakly_reversible(graph, 0.1), graph, 0.1, exact=True)
    with pytest.raises(AssertionError, match=re.escape(expected_error)):
        verifier.check_exact(0, states, rates)

        # should never get here
        assert False


def test_exact_membership_needs_integer_labels():
    graph = EGraph(2, ((Fraction(1, 2), 0), (0, 1)), ((0, 1), (1, 0)))
    with pytest.raises(AssertionError, match=re.escape("Exact membership needs integer vertex labels")):
        EmbeddingVerifier(build_weakly_reversible(graph, 0.1), graph, 0.1, exact=True)


def test_counterexample_search_rejects_weakly_reversible():
    with pytest.raises(AssertionError, match=re.escape("Graph is weakly reversible; use `verify_embedding`")):
        counterexample_search(utils_triangle_graph(), 0.5)


def test_verbose_logging(capsys):
    verify_embedding(utils_example1_graph(), 0.1, sampler=Sampler(samples=10), verbose=True)
    out = capsys.readouterr().out
    assert "Checking 10 samples" in out
    assert "Finished: 0 violations in 10 samples" in out


def test_report_violations_bound():
    with pytest.raises(AssertionError, match=re.escape("`violations` (2) can not exceed `samples` (1)")):
        EmbeddingReport(samples=1, violations=2)


def test_report_merge():
    a = EmbeddingReport(samples=10, violations=1, witnesses=(utils_witness(7),), max_residual=0.5)
    b = EmbeddingReport(samples=5, violations=2, witnesses=(utils_witness(2), utils_witness(12)), max_residual=2.0)
    merged = a.merge(b)
    assert merged.samples == 15
    assert merged.violations == 3
    assert merged.max_residual == 2.0
    assert [w.sample for w in merged.witnesses] == [2, 7, 12]
    assert b.merge(a) == merged


def test_report_merge_keeps_smallest_witnesses():
    a = EmbeddingReport(samples=30, violations=30, witnesses=tuple(utils_witness(i) for i in range(0, 30, 2)))
    b = EmbeddingReport(samples=30, violations=30, witnesses=tuple(utils_witness(i) for i in range(1, 30, 2)))
    merged = a.merge(b)
    assert [w.sample for w in merged.witnesses] == list(range(MAX_WITNESSES))


def test_report_merge_mismatch():
    with pytest.raises(AssertionError, match=re.escape("Can not merge reports with different `seed` (0 != 1)")):
        EmbeddingReport(samples=1, violations=0).merge(EmbeddingReport(samples=1, violations=0, seed=1))
    with pytest.raises(
        AssertionError, match=re.escape("Can not merge reports with different `mode` (hyperplane != strict)")
    ):
        EmbeddingReport(samples=1, violations=0).merge(EmbeddingReport(samples=1, violations=0, mode="strict"))


def test_report_from_dict():
    report = EmbeddingReport(samples=4, violations=1, witnesses=(utils_witness(3),), max_residual=1.0, seed=9)
    assert EmbeddingReport.from_dict(report.to_dict()) == report


def test_sampler_corner_rates():
    sampler = Sampler(samples=8)
    rates = sampler.sample_rates(sampler.chunk_rng(0), 0, 8, utils_example1_graph(), 0.1)
    assert rates.shape == (8, 2)
    assert rates[0] == pytest.approx([0.1, 0.1])
    assert rates[2] == pytest.approx([10.0, 0.1])
    assert rates[4] == pytest.approx([0.1, 10.0])
    assert rates[6] == pytest.approx([10.0, 10.0])
    assert np.all(rates[1::2] >= 0.1) and np.all(rates[1::2] <= 10.0)


def test_sampler_ratio_mode():
    sampler = Sampler(samples=200, ratio_epsilon=0.25)
    rates = sampler.sample_rates(sampler.chunk_rng(0), 0, 200, utils_example1_graph(), 0.5)
    ratios = rates.max(axis=1) / rates.min(axis=1)
    assert np.all(ratios <= 4.0 * (1 + 1e-9))
    assert rates.max() > 2.0 or rates.min() < 0.5


def test_sampler_box():
    assert Sampler().box_for(1.0) == 8.0
    assert Sampler(box=2.0).box_for(1.0) == 2.0
    with pytest.raises(AssertionError, match=re.escape("`box` must be positive")):
        Sampler(box=0)


def test_lemma1_certificate_passes():
    report = lemma1_certificate((2, 0), (0, 1), exp(-1), samples=500, seed=4)
    assert report.samples == 2500
    assert report.passed


def test_lemma1_certificate_explicit_point():
    report = lemma1_certificate((2, 0), (0, 1), exp(-1), points=[(2, -2)])
    assert report.samples == 5
    assert report.violations == 0


def test_lemma1_certificate_identical_vertices():
    with pytest.raises(AssertionError, match=re.escape("`s` and `s_prime` must differ")):
        lemma1_certificate((1, 1), (1, 1), 0.5)


def test_pair_delta():
    assert pair_delta((2, 0), (0, 1), exp(-1)) == pytest.approx(2 / sqrt(5))
    assert pair_delta((2, 0), (0, 1), 0.1) == pytest.approx(2 * log(10) / sqrt(5))


def test_cycle_order_triangle():
    certificate = cycle_order(TRIANGLE, (1, 2))
    assert certificate.ordering == (2, 1, 0)
    assert certificate.inverse == (2, 1, 0)
    assert certificate.ties == ()
    assert certificate.sign_vector is None


def test_phi_decomposition_triangle():
    certificate = phi_decomposition(cycle_order(TRIANGLE, (1, 2)))
    assert certificate.phi == ((PhiTerm(-1, 1), PhiTerm(1, 2)), (PhiTerm(-1, 0), PhiTerm(1, 2)))
    assert [[repr(t) for t in terms] for terms in certificate.phi] == [["-k1", "+k2"], ["-k0", "+k2"]]
    assert certificate.telescoping


def test_phi_decomposition_four_cycle():
    vertices = [(0, 0), (1, 0), (1, 1), (0, 1)]
    certificate = phi_decomposition(cycle_order(vertices, (2, 1)))
    assert certificate.ordering == (2, 1, 3, 0)
    assert len(certificate.phi) == 3
    assert certificate.telescoping
    for terms in certificate.phi:
        assert sum(t.sign for t in terms) == 0


def test_cycle_certificate_positivity():
    certificate = cycle_certificate(TRIANGLE, (1, 2), (1, 1, 1))
    assert certificate.positivity == (True, True)
    values = evaluate_phi(certificate, (10, 20), (0.5, 2, 0.5))
    assert np.all(values > 0)


def test_cycle_order_strict_tie():
    with pytest.raises(
        AssertionError, match=re.escape("Cycle vertices at positions `0` and `2` tie along `w`")
    ):
        cycle_order(TRIANGLE, (1, 0))


def test_cycle_order_tie_tolerant():
    certificate = phi_decomposition(cycle_order(TRIANGLE, (1, 0), tie_tolerant=True))
    assert certificate.ties == ((1, 2),)
    assert certificate.telescoping
    certificate = phi_positivity(certificate, (1, 0), (1, 1, 1))
    assert certificate.positivity[1] is None


def test_cycle_order_zero_direction():
    with pytest.raises(AssertionError, match=re.escape("Direction `w` can not be zero")):
        cycle_order(TRIANGLE, (0, 0))


def test_cycle_order_records_sign_vector():
    fan = fan_from_hyperplanes([(1, 0), (0, 1), (1, -1)])
    certificate = cycle_order(TRIANGLE, (1, 2), fan=fan)
    assert certificate.sign_vector == SignVector("++-")
    assert certificate.to_dict()["sign_vector"] == "++-"


def test_cycle_order_exact_labels():
    certificate = cycle_order([("1/2", 0), (0, "1/3"), (0, 0)], (1, 1))
    assert all(isinstance(x, Fraction) for v in certificate.vertices for x in v)
    assert certificate.ordering == (0, 1, 2)
