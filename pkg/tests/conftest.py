import numpy as np
import pytest

from bpgd_erasure.codes import CssCode

# lines collected by the acceptance module, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# --- brute-force oracles -------------------------------------------------------
# These never call into the library's GF(2) routines.


def all_vectors(n: int) -> np.ndarray:
    """Every length-n binary vector, one per row (2**n x n)."""
    idx = np.arange(2**n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(np.uint8)


def span(rows: np.ndarray) -> set[bytes]:
    """Row space by enumerating every combination of rows."""
    rows = np.asarray(rows, dtype=np.uint8)
    if rows.shape[0] == 0:
        return {bytes(rows.shape[1])}
    coeffs = all_vectors(rows.shape[0])
    vecs = (coeffs.astype(np.int64) @ rows.astype(np.int64)) & 1
    return {v.astype(np.uint8).tobytes() for v in vecs}


def brute_rank(rows: np.ndarray) -> int:
    return int(round(np.log2(len(span(rows)))))


def kernel_vectors(h: np.ndarray) -> np.ndarray:
    n = h.shape[1]
    vs = all_vectors(n)
    ok = ((vs.astype(np.int64) @ h.T.astype(np.int64)) & 1).sum(axis=1) == 0
    return vs[ok]


def random_css(rng, n: int, mx: int, mz: int) -> CssCode:
    """Random CSS code: H_X random, H_Z rows drawn from the kernel of H_X."""
    while True:
        hx = (rng.random((mx, n)) < 0.4).astype(np.uint8)
        ker = kernel_vectors(hx)
        ker = ker[ker.any(axis=1)]
        if ker.shape[0] == 0:
            continue
        hz = ker[rng.integers(0, ker.shape[0], size=mz)]
        return CssCode(hx, hz, name="random")


def tree_check_matrix(rng, n_checks: int, max_deg: int = 3) -> np.ndarray:
    """Check matrix whose Tanner graph is a tree (forest-free, connected)."""
    adj = []  # (check, var)
    n_vars = 0
    frontier_vars = []
    for c in range(n_checks):
        deg = int(rng.integers(2, max_deg + 1))
        if c == 0:
            new = deg
            members = list(range(n_vars, n_vars + new))
        else:
            # attach to exactly one existing variable to stay cycle free
            anchor = int(rng.choice(frontier_vars))
            new = deg - 1
            members = [anchor] + list(range(n_vars, n_vars + new))
        n_vars += new
        frontier_vars.extend(range(n_vars - new, n_vars))
        adj.extend((c, v) for v in members)
    h = np.zeros((n_checks, n_vars), dtype=np.uint8)
    for c, v in adj:
        h[c, v] = 1
    return h


def exact_marginal_llrs(h: np.ndarray, syndrome: np.ndarray, prior: np.ndarray) -> np.ndarray:
    """ln P(x_v = 0 | s) / P(x_v = 1 | s) with P(x) proportional to
    prod exp(-prior_v * x_v) over all x satisfying h x = s."""
    n = h.shape[1]
    xs = all_vectors(n)
    ok = np.all(((xs.astype(np.int64) @ h.T.astype(np.int64)) & 1) == syndrome, axis=1)
    xs = xs[ok]
    logw = -(xs * prior).sum(axis=1)
    logw -= logw.max()
    w = np.exp(logw)
    p1 = (w[:, None] * xs).sum(axis=0)
    p0 = w.sum() - p1
    return np.log(p0) - np.log(p1)


def exhaustive_ml_decodable(code: CssCode, side_check: np.ndarray, same: np.ndarray,
                            mask: np.ndarray, syndrome: np.ndarray):
    """Enumerate every pattern on the erasure matching the syndrome and
    group them into cosets of the same-type stabilizer group.

    Returns ``(n_cosets, coset_of, stabs)``; ``coset_of(v)`` labels a vector by
    the smallest integer in its coset and ``stabs`` is the stabilizer span.
    """
    n = code.n
    erased = np.flatnonzero(mask)
    patterns = np.zeros((2**erased.size, n), np.uint8)
    patterns[:, erased] = all_vectors(erased.size)
    ok = np.all(((patterns.astype(np.int64) @ side_check.T.astype(np.int64)) & 1) == syndrome,
                axis=1)
    stabs = span(same)
    weights = np.int64(1) << np.arange(n, dtype=np.int64)
    stab_ints = np.array([np.frombuffer(v, np.uint8) for v in stabs], np.int64) @ weights

    def coset_of(v):
        return int(np.min(int(np.asarray(v, np.int64) @ weights) ^ stab_ints))

    ints = patterns[ok].astype(np.int64) @ weights
    labels = np.min(ints[:, None] ^ stab_ints[None, :], axis=1)
    return np.unique(labels).size, coset_of, stabs


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
