import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from assisted_qldpc import designs
from assisted_qldpc.designs import (AlistError, PairwiseBalancedDesign, bose_sts, export_alist,
                                    import_alist, incidence, replication_profile, verify_pbd)
from assisted_qldpc.gf2 import BinaryMatrix


def test_verify_examples(ag23, fano):
    r = verify_pbd(ag23.design)
    assert r.valid and r.K == {3}
    assert r.profile.equireplicate and r.profile.even_replicate and r.profile.replication == 4
    r = verify_pbd(fano.design)
    assert r.valid and r.profile.odd_replicate and r.profile.replication == 3
    bad = verify_pbd(PairwiseBalancedDesign(4, [(0, 1, 2), (0, 1, 3)]))
    assert not bad.valid
    assert (0, 1) in bad.repeated
    assert (2, 3) in bad.uncovered
    assert any("more than once" in v for v in bad.violations)


def test_out_of_range_points_reported():
    r = verify_pbd(PairwiseBalancedDesign(3, [(0, 1, 5)]))
    assert not r.valid and 5 in r.bad_points


def test_trivial_pbd_valid():
    assert verify_pbd(PairwiseBalancedDesign(3, [(0, 1, 2)])).valid
    assert verify_pbd(PairwiseBalancedDesign(3, [(0, 1), (0, 2), (1, 2)])).valid


def test_bose_examples():
    d9 = bose_sts(9)
    assert d9.b == 12 and verify_pbd(d9).valid
    d81 = bose_sts(81)
    assert d81.b == 1080 and d81.block_sizes == {3}
    with pytest.raises(ValueError):
        bose_sts(8)
    with pytest.raises(ValueError):
        bose_sts(7)


@pytest.mark.parametrize("v", range(3, 100, 6))
def test_bose_valid_all_orders(v):
    d = bose_sts(v)
    assert verify_pbd(d).valid
    assert d.b == designs.block_count(v, 3)
    assert replication_profile(d).replication == (v - 1) // 2


def test_bose_level_major_layout():
    # t = 1 on Z_3 x Z_3: the vertical triples are {x, 3 + x, 6 + x}
    d = bose_sts(9)
    for x in range(3):
        assert (x, 3 + x, 6 + x) in d.blocks


def test_incidence_examples(ag23, ag43):
    M = incidence(PairwiseBalancedDesign(3, [(0, 1, 2)]))
    assert np.array_equal(M.to_dense(), [[1], [1], [1]])
    M = incidence(ag23)
    assert M.shape == (9, 12)
    assert set(M.col_weights()) == {3} and set(M.row_weights()) == {4}
    M = incidence(ag43)
    assert M.shape == (81, 1080) and set(M.row_weights()) == {40}
    assert np.array_equal(M.to_dense(), oracles.incidence_dense(ag43.v, ag43.blocks))


def test_steiner_counts():
    for v, mu in ((7, 3), (9, 3), (13, 4), (16, 4), (25, 5)):
        assert designs.block_count(v, mu) == v * (v - 1) // (mu * (mu - 1))
    with pytest.raises(ValueError):
        designs.block_count(8, 3)


def test_from_incidence_round_trip(ag23):
    assert PairwiseBalancedDesign.from_incidence(incidence(ag23)) == ag23.design


# ----------------------------------------------------------------- alist

def test_alist_identity():
    text = export_alist(BinaryMatrix.identity(2))
    lines = text.splitlines()
    assert lines[:4] == ["2 2", "1 1", "1 1", "1 1"]
    assert import_alist(text) == BinaryMatrix.identity(2)


def test_alist_ag23_round_trip(ag23, tmp_path):
    M = incidence(ag23)
    assert import_alist(export_alist(M)) == M
    path = tmp_path / "ag23.alist"
    designs.write_alist(M, path)
    assert designs.read_alist(path) == M


def test_alist_zero_padding_accepted():
    text = "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n"
    M = import_alist(text)
    assert np.array_equal(M.to_dense(), [[1, 1, 0], [0, 1, 1]])
    assert export_alist(import_alist(export_alist(M))) == export_alist(M)


@pytest.mark.parametrize("text", [
    "",
    "2 2\n1 1\n1 1\n1 1\n1\n3\n1\n2\n",         # index out of range
    "2 2\n1 1\n1 1\n1 1\n1\n2\n2\n1\n",         # row lists disagree
    "2 2\n1 1\n1\n1 1\n1\n2\n1\n2\n",           # wrong degree list length
    "2 2\n1 1\n1 1\n1 1\nx\n2\n1\n2\n",         # not an integer
    "2 2\n1 1\n1 1\n1 1\n1\n",                  # truncated
])
def test_alist_malformed(text):
    with pytest.raises(AlistError):
        import_alist(text)


@given(st.integers(1, 12), st.integers(1, 12), st.data())
def test_alist_round_trip_property(rows, cols, data):
    bits = data.draw(st.lists(st.integers(0, 1), min_size=rows * cols, max_size=rows * cols))
    M = BinaryMatrix.from_dense(np.array(bits, dtype=np.uint8).reshape(rows, cols))
    assert import_alist(export_alist(M)) == M
