import numpy as np
import pytest

from bpgd_erasure import gf2
from bpgd_erasure.codes import (
    CodeFormatError,
    CodeValidationError,
    CssCode,
    LiftedBase,
    Side,
    TannerGraph,
    bundled_code,
    hamming_7_4,
    hgp,
    lifted_product,
    load_code,
    random_regular_seed,
    random_sparse_matrix,
    read_alist,
    read_lifted_base,
    resolve_code,
    save_code,
    steane_code,
    validate,
    write_alist,
    write_lifted_base,
)

from conftest import brute_rank, kernel_vectors, span


def test_hgp_repetition_shapes():
    code = hgp([[1, 1]], [[1, 1]])
    assert code.n == 5
    assert code.h_x.shape == (2, 5)
    assert code.h_z.shape == (2, 5)
    assert code.k == 1


def test_hgp_block_formula():
    rng = np.random.default_rng(3)
    h1 = random_sparse_matrix(3, 5, rng=rng).to_dense()
    h2 = random_sparse_matrix(2, 4, rng=rng).to_dense()
    code = hgp(h1, h2)
    hx = np.hstack([np.kron(h1, np.eye(4, dtype=np.uint8)), np.kron(np.eye(3, dtype=np.uint8), h2.T)])
    hz = np.hstack([np.kron(np.eye(5, dtype=np.uint8), h2), np.kron(h1.T, np.eye(2, dtype=np.uint8))])
    assert np.array_equal(code.h_x.to_dense(), hx)
    assert np.array_equal(code.h_z.to_dense(), hz)


def test_hgp_rejects_empty():
    with pytest.raises(ValueError):
        hgp(np.zeros((0, 3), np.uint8), [[1, 1]])


@pytest.mark.parametrize("trial", range(10))
def test_hgp_k_formula(trial):
    # k of an HGP code is k1*k2 + k1T*k2T
    rng = np.random.default_rng(trial)
    m1, n1, m2, n2 = rng.integers(2, 5, size=4)
    h1 = random_sparse_matrix(m1, n1, rng=rng).to_dense()
    h2 = random_sparse_matrix(m2, n2, rng=rng).to_dense()
    code = hgp(h1, h2)
    r1, r2 = brute_rank(h1), brute_rank(h2)
    expected = (n1 - r1) * (n2 - r2) + (m1 - r1) * (m2 - r2)
    assert code.k == expected
    assert code.n == n1 * n2 + m1 * m2


def test_lifted_product_trivial_lift_is_hgp():
    a = LiftedBase(((frozenset({0}),),), 1)
    code = lifted_product(a, a)
    ref = hgp([[1]], [[1]])
    assert code.h_x == ref.h_x and code.h_z == ref.h_z


def test_lifted_product_with_lift_one_matches_hgp():
    h = hamming_7_4()
    code = lifted_product(LiftedBase.from_binary(h), LiftedBase.from_binary(h))
    ref = hgp(h, h)
    assert code.h_x == ref.h_x and code.h_z == ref.h_z


def test_lifted_transpose_expands_to_transpose():
    base = LiftedBase(((frozenset({1, 2}), frozenset()), (frozenset({0}), frozenset({3}))), 5)
    assert np.array_equal(base.transpose().expand().to_dense(), base.expand().to_dense().T)


def test_lifted_mismatched_lift():
    a = LiftedBase(((frozenset({0}),),), 3)
    b = LiftedBase(((frozenset({0}),),), 5)
    with pytest.raises(ValueError):
        lifted_product(a, b)


def test_circulant_commutes_with_shift():
    c = gf2.circulant([0, 1], 63)
    s = gf2.circulant([1], 63)
    assert set(c.row_weights().tolist()) == {2}
    assert (c @ s) == (s @ c)


def test_b1_parameters():
    code = bundled_code("b1")
    assert (code.n, code.k) == (882, 24)
    assert validate(code) == []
    assert set(code.h_x.row_weights().tolist()) == {6}
    assert set(code.h_x.col_weights().tolist()) == {3}
    assert bundled_code("[[882,24]]").h_x == code.h_x


def test_b1_rebuilds_from_bases():
    from bpgd_erasure.codes import bundled_path

    a = read_lifted_base(bundled_path("b1_a.lift"))
    b = read_lifted_base(bundled_path("b1_b.lift"))
    code = lifted_product(a, b)
    ref = bundled_code("b1")
    assert code.h_x == ref.h_x and code.h_z == ref.h_z


@pytest.mark.parametrize("name, n, k", [("hgp1600", 1600, 64), ("hgp2025", 2025, 81)])
def test_bundled_hgp_parameters(name, n, k):
    code = bundled_code(name)
    assert (code.n, code.k) == (n, k)
    assert validate(code) == []


def test_validate_examples():
    bad = CssCode([[1, 0]], [[1, 0]], check=False)
    assert validate(bad) and "odd overlap" in validate(bad)[0]
    with pytest.raises(CodeValidationError):
        CssCode([[1, 0]], [[1, 0]])
    assert validate(steane_code()) == []


def test_steane_parameters():
    code = steane_code()
    assert (code.n, code.k) == (7, 1)
    assert code.logical_detectors(Side.X).shape == (1, 7)


def test_logical_detectors_classify_kernel(rng):
    # a zero-syndrome residual is a stabilizer iff every detector vanishes on it
    from conftest import random_css

    for _ in range(15):
        code = random_css(rng, int(rng.integers(5, 11)), 2, 3)
        for side in Side:
            h = code.check_matrix(side).to_dense()
            s = code.stabilizer_matrix(side).to_dense()
            det = code.logical_detectors(side)
            stabs = span(s)
            assert det.shape[0] == code.k
            for v in kernel_vectors(h):
                silent = not ((det.astype(np.int64) @ v) & 1).any()
                assert silent == (v.tobytes() in stabs)


def test_tanner_graph_adjacency():
    h = np.array([[1, 1, 0, 1], [0, 1, 1, 0]], np.uint8)
    g = TannerGraph.from_matrix(h)
    assert g.n_edges == 5
    assert g.check_neighbors(0).tolist() == [0, 1, 3]
    assert sorted(g.var_neighbors(1).tolist()) == [0, 1]
    assert np.array_equal(g.edge_var[g.var_edges], np.repeat(np.arange(4), h.sum(axis=0).astype(np.int64)))


def test_save_load_roundtrip(tmp_path):
    code = bundled_code("hgp1600")
    path = tmp_path / "c.css"
    save_code(code, path, comment="round trip")
    back = load_code(path)
    assert back.h_x == code.h_x and back.h_z == code.h_z


def test_css_parse_errors(tmp_path):
    p = tmp_path / "bad.css"
    p.write_text("css 3 1 1\n0 1\n0 7\n")
    with pytest.raises(CodeFormatError) as exc:
        load_code(p)
    assert exc.value.lineno == 3
    p.write_text("css 3 1 1\n0 1\n")
    with pytest.raises(CodeFormatError):
        load_code(p)


def test_alist_hamming(tmp_path):
    p = tmp_path / "h.alist"
    write_alist(hamming_7_4(), p)
    h = read_alist(p)
    assert h.shape == (3, 7)
    assert h.row_weights().tolist() == [4, 4, 4]
    code = load_code(p)
    assert code.n == 7 * 7 + 3 * 3


def test_alist_degree_mismatch(tmp_path):
    p = tmp_path / "bad.alist"
    p.write_text("3 2\n2 2\n1 2 1\n2 2\n1 2\n1 2\n1 0\n1 2\n2 3\n")
    with pytest.raises(CodeFormatError) as exc:
        read_alist(p)
    assert exc.value.lineno == 5


def test_lift_file_roundtrip(tmp_path):
    base = LiftedBase(((frozenset({1, 4}), frozenset()), (frozenset({0}), frozenset({2}))), 7)
    p = tmp_path / "b.lift"
    write_lifted_base(base, p, comment="test")
    assert read_lifted_base(p) == base


def test_random_regular_seed_properties():
    h = random_regular_seed(16, 12, rng=1).to_dense()
    assert set(h.sum(axis=0).tolist()) == {3}
    assert set(h.sum(axis=1).tolist()) == {4}
    overlap = h.astype(int) @ h.T
    np.fill_diagonal(overlap, 0)
    assert overlap.max() <= 1
    assert gf2.rank(h) == 12


def test_resolve_code(tmp_path):
    code = steane_code()
    assert resolve_code(code) is code
    assert resolve_code("steane").n == 7
    path = tmp_path / "s.css"
    save_code(code, path)
    assert resolve_code(str(path)).h_x == code.h_x
    with pytest.raises(KeyError):
        resolve_code("no-such-code")
