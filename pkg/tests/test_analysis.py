import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from assisted_qldpc import analysis, gf2
from assisted_qldpc.analysis import (Configuration, count_configurations, degeneracy_audit,
                                     even_freeness, girth, odd_point_bound_check, phi_e,
                                     rank_predictions)
from assisted_qldpc.designs import PairwiseBalancedDesign, bose_sts, incidence, verify_pbd
from assisted_qldpc.galois import ag_lines, pg_lines
from assisted_qldpc.gf2 import BinaryMatrix, BudgetExceeded
from assisted_qldpc.qcode import build_standard_form, extend_addR


def cyclic_sts13() -> PairwiseBalancedDesign:
    """STS(13) developed from the base blocks {0,1,4} and {0,2,7} mod 13."""
    blocks = [tuple((x + s) % 13 for x in base) for base in ((0, 1, 4), (0, 2, 7)) for s in range(13)]
    d = PairwiseBalancedDesign(13, blocks)
    assert verify_pbd(d).valid
    return d


STS_SAMPLE = [("fano", lambda: pg_lines(2, 2).design), ("ag23", lambda: ag_lines(2, 3).design),
              ("sts13", cyclic_sts13), ("pg32", lambda: pg_lines(3, 2).design),
              ("bose15", lambda: bose_sts(15)), ("bose21", lambda: bose_sts(21)),
              ("bose27", lambda: bose_sts(27)), ("ag33", lambda: ag_lines(3, 3).design)]


# ------------------------------------------------------------------- girth

def test_girth_examples(ag23):
    assert girth(BinaryMatrix.ones(2, 2)) == 4
    assert girth(build_standard_form(ag23).H) == 6
    assert girth(BinaryMatrix.identity(5)) is None


@given(st.tuples(st.integers(1, 9), st.integers(1, 9))
       .flatmap(lambda s: arrays(np.uint8, s, elements=st.integers(0, 1))))
def test_girth_matches_cycle_basis_oracle(A):
    assert girth(BinaryMatrix.from_dense(A)) == oracles.girth_nx(A)


@pytest.mark.parametrize("name,make", STS_SAMPLE + [("pg23", lambda: pg_lines(2, 3).design),
                                                   ("ag24", lambda: ag_lines(2, 4).design)])
def test_steiner_matrices_have_girth_six(name, make):
    d = make()
    assert girth(incidence(d)) == 6
    assert girth(build_standard_form(d).H) == 6


# ----------------------------------------------------------- even-freeness

def test_even_freeness_examples(ag23, fano):
    r = even_freeness(ag23)
    assert r.r == 5 and r.exact and r.witness.is_even and len(r.witness) == 6
    assert even_freeness(fano).r == 3
    pg33 = even_freeness(pg_lines(3, 3), r_max=7)
    assert pg33.r == 7 and pg33.method == "search"
    assert pg33.witness.is_even and len(pg33.witness) == 8


def test_ag23_attains_abelian_bound(ag23):
    assert even_freeness(ag23).r == 2 * 3 - 1


@pytest.mark.parametrize("name,make", STS_SAMPLE)
def test_triple_systems_even_freeness(name, make):
    d = make()
    rep = even_freeness(d, r_max=7)
    assert rep.exact and 3 <= rep.r <= 7
    assert rep.witness.is_even and len(rep.witness) == rep.r + 1
    assert gf2.min_distance(incidence(d)) == rep.r + 1
    # the two strategies agree where both are cheap
    assert even_freeness(d, r_max=7, method="search").r == rep.r
    # Pasch is the only even 4-configuration of a triple system
    assert (count_configurations(d, "pasch") == 0) == (rep.r >= 4)


@pytest.mark.parametrize("make", [lambda: pg_lines(2, 2), lambda: ag_lines(2, 3),
                                  lambda: ag_lines(2, 4), lambda: pg_lines(2, 3)])
def test_even_freeness_matches_subset_oracle(make):
    d = make().design
    s = oracles.smallest_even_size(d.blocks, 6)
    rep = even_freeness(d, r_max=6, method="search")
    if s is None:
        assert rep.r == 7 and not rep.exact
    else:
        assert rep.r == s - 1


def test_even_freeness_budget_and_bounds():
    with pytest.raises(BudgetExceeded, match="verified"):
        even_freeness(pg_lines(3, 3), r_max=7, node_budget=50)
    with pytest.raises(ValueError):
        even_freeness(pg_lines(2, 2), r_max=13)


def test_configuration_record(fano):
    c = Configuration(fano.design, (0, 1))
    assert len(c) == 2 and c.odd == 4 and not c.is_even
    assert len(c.points) == 5


# ---------------------------------------------------------- configurations

def test_configuration_counts_oracle(ag23, fano):
    assert count_configurations(ag23, "pasch") == 0
    assert count_configurations(fano, "pasch") == 7
    for d in (ag23.design, fano.design, bose_sts(9)):
        for kind in ("pasch", "grid", "double_triangle"):
            assert count_configurations(d, kind) == oracles.count_named(d.blocks, kind)


def test_ag23_has_grids(ag23):
    # two parallel classes of lines form a 3 x 3 grid: C(4, 2) copies
    assert count_configurations(ag23, "grid") == 6
    assert count_configurations(ag23, "double_triangle") == 0


def test_pg32_configuration_counts():
    # values fixed by the networkx isomorphism oracle over all subsets
    d = pg_lines(3, 2)
    assert count_configurations(d, "pasch") == 105
    assert count_configurations(d, "grid") == 280
    assert count_configurations(d, "double_triangle") == 1680


def test_generalized_pasch():
    ag24 = ag_lines(2, 4)
    assert count_configurations(ag24, "generalized_pasch") == 48
    assert oracles.count_named(ag24.blocks, "generalized_pasch", mu=4) == 48
    pg23 = pg_lines(2, 3)
    assert count_configurations(pg23, "generalized_pasch", mu=4) == 0
    # for mu = 3 the generalized Pasch is the Pasch configuration
    assert count_configurations(pg_lines(2, 2), "generalized_pasch") == 7


def test_configuration_block_size_errors():
    with pytest.raises(ValueError):
        count_configurations(pg_lines(2, 3), "pasch")
    with pytest.raises(ValueError):
        count_configurations(pg_lines(2, 3), "generalized_pasch", mu=3)
    with pytest.raises(ValueError):
        count_configurations(pg_lines(2, 2), "mitre")


# -------------------------------------------------------- odd point bound

def test_odd_point_examples(ag23):
    r = odd_point_bound_check(ag23, 5, 6)
    assert r.holds and r.min_value == 6
    assert r.min_value == oracles.min_size_plus_odd(ag23.blocks, 5)
    assert odd_point_bound_check(pg_lines(2, 3), 7, 8).holds
    v = odd_point_bound_check(ag23, 1, 100)
    assert v.holds and v.min_value is None


def test_odd_point_witness_and_failure(fano):
    r = odd_point_bound_check(fano, 4, 7)
    assert r.min_value == oracles.min_size_plus_odd(fano.blocks, 4)
    assert not r.holds
    c = Configuration(fano.design, r.witness)
    assert len(c) + c.odd == r.min_value


def test_odd_point_budget(ag23):
    with pytest.raises(BudgetExceeded):
        odd_point_bound_check(ag_lines(3, 5), 9, 10, budget=1000)
    with pytest.raises(ValueError):
        odd_point_bound_check(ag23, 10, 6)


# ------------------------------------------------------------------ ranks

def test_phi_e_examples(fano):
    assert phi_e(2, 2) == gf2.rank(incidence(fano)) == 4
    assert phi_e(3, 2) == gf2.rank(incidence(pg_lines(3, 2))) == 11
    assert phi_e(2, 4) - phi_e(1, 4) == gf2.rank(incidence(ag_lines(2, 4))) == 9
    assert phi_e(2, 4) == gf2.rank(incidence(pg_lines(2, 4))) == 10
    with pytest.raises(ValueError):
        phi_e(2, 3)
    with pytest.raises(ValueError):
        phi_e(2, 6)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_phi_e_binary_projective(m):
    # equality case of the 2^(m+1) - m - 2 bound for PG(m, 2)
    assert phi_e(m, 2) == 2 ** (m + 1) - m - 2


def test_phi_e_matches_rank_pg34():
    assert phi_e(3, 4) == gf2.rank(incidence(pg_lines(3, 4)))


def test_hillebrandt_lower_exact():
    for v, mu in ((7, 3), (9, 3), (13, 4), (81, 3), (1000, 3), (125, 5)):
        k = analysis.hillebrandt_lower(v, mu)
        assert k * (k - 1) * mu >= (v - 1) * (v - mu) > (k - 1) * (k - 2) * mu
        x = 0.5 + math.sqrt(0.25 + (v - 1) * (v - mu) / mu)
        if abs(x - round(x)) > 1e-9:
            assert k == math.ceil(x)


def test_rank_prediction_examples():
    rep = rank_predictions(cyclic_sts13())
    assert rep.rank == 13 and "hamada_full_rank" in rep.applicable and rep.all_consistent
    rep = rank_predictions(pg_lines(2, 3))
    assert rep.rank == 12 and "hamada_corank_one" in rep.applicable
    assert "projective_closed_form" in rep.applicable and rep.all_consistent
    rep = rank_predictions(ag_lines(3, 3))
    assert rep.gram_rank == 1 and "odd_replicate_gram" in rep.applicable and rep.all_consistent


@pytest.mark.parametrize("make", [lambda: pg_lines(2, 2), lambda: pg_lines(3, 2), lambda: pg_lines(2, 4),
                                  lambda: ag_lines(2, 4), lambda: ag_lines(2, 5), lambda: bose_sts(15),
                                  lambda: ag_lines(4, 3), lambda: pg_lines(3, 3)])
def test_rank_predictions_consistent(make):
    rep = rank_predictions(make())
    assert rep.all_consistent, [p.describe() for p in rep.predictions if not p.holds]
    assert "hillebrandt_bounds" in rep.applicable


def test_sts15_doyen_bound():
    rep = rank_predictions(bose_sts(15))
    pred = next(p for p in rep.predictions if p.name == "doyen_binary_projective")
    assert pred.low == 11 and pred.holds


def test_rank_report_record(ag23):
    text = rank_predictions(ag23).to_record()
    assert "rank: 9" in text and "gram_rank: 8" in text and "all_consistent: True" in text


# ------------------------------------------------------------- degeneracy

def test_degeneracy_ag23(ag23):
    Hp = extend_addR(ag23)
    rep = degeneracy_audit(Hp, 6)
    assert Hp.shape == (10, 21)
    assert rep.subsets_checked == 512
    assert not rep.has_weight_d_even_combination
    assert rep.non_degenerate_conclusion
    assert (rep.min_even_row_weight, 0) == oracles.even_row_sums(Hp.to_dense(), 6) == (8, 0)


def test_degeneracy_identity():
    rep = degeneracy_audit(BinaryMatrix.identity(6), 2)
    assert rep.min_even_row_weight == 2
    assert rep.has_weight_d_even_combination and not rep.non_degenerate_conclusion


@given(st.tuples(st.integers(1, 10), st.integers(1, 30))
       .flatmap(lambda s: arrays(np.uint8, s, elements=st.integers(0, 1))), st.integers(1, 6))
def test_degeneracy_matches_oracle(A, d):
    rep = degeneracy_audit(BinaryMatrix.from_dense(A), d)
    best, hits = oracles.even_row_sums(A, d)
    assert rep.min_even_row_weight == best
    assert rep.weight_counts[d] == hits


def test_degeneracy_row_limit(ag43):
    with pytest.raises(BudgetExceeded):
        degeneracy_audit(extend_addR(ag43), 6)
