"""Compiled inner loops for message passing and peeling.

All arrays follow the :class:`~bpgd_erasure.codes.TannerGraph` layout.
"""

import math

import numpy as np
from numba import njit

CONVERGED = 0
NONCONVERGENCE = 1


@njit(cache=True)
def check_pass(chk_ptr, v2c, c2v, syndrome, llr_max):
    """Sum-product check update with leave-one-out tanh products."""
    m = chk_ptr.shape[0] - 1
    maxdeg = 0
    for c in range(m):
        maxdeg = max(maxdeg, chk_ptr[c + 1] - chk_ptr[c])
    t = np.empty(maxdeg)
    pre = np.empty(maxdeg)
    for c in range(m):
        a = chk_ptr[c]
        d = chk_ptr[c + 1] - a
        if d == 0:
            continue
        sign = -1.0 if syndrome[c] else 1.0
        acc = 1.0
        for i in range(d):
            t[i] = math.tanh(0.5 * v2c[a + i])
            pre[i] = acc
            acc *= t[i]
        acc = 1.0
        for i in range(d - 1, -1, -1):
            prod = pre[i] * acc
            acc *= t[i]
            if prod >= 1.0:
                val = llr_max
            elif prod <= -1.0:
                val = -llr_max
            else:
                val = 2.0 * math.atanh(prod)
                if val > llr_max:
                    val = llr_max
                elif val < -llr_max:
                    val = -llr_max
            c2v[a + i] = sign * val


@njit(cache=True)
def var_pass(var_ptr, var_edges, c2v, v2c, prior, beliefs, gamma, llr_max):
    """Variable update with optional damping; returns True if any
    variable-to-check message changed."""
    n = var_ptr.shape[0] - 1
    changed = False
    damp = gamma != 1.0
    for v in range(n):
        a = var_ptr[v]
        b = var_ptr[v + 1]
        total = 0.0
        for k in range(a, b):
            total += c2v[var_edges[k]]
        beliefs[v] = prior[v] + total
        for k in range(a, b):
            e = var_edges[k]
            new = prior[v] + (total - c2v[e])
            if damp:
                new = (1.0 - gamma) * v2c[e] + gamma * new
            if new > llr_max:
                new = llr_max
            elif new < -llr_max:
                new = -llr_max
            if new != v2c[e]:
                changed = True
                v2c[e] = new
    return changed


@njit(cache=True)
def run_iterations(chk_ptr, edge_var, edge_chk, var_ptr, var_edges, syndrome, prior,
                   v2c, c2v, beliefs, chk_dirty, var_dirty, n_iter, gamma, llr_max):
    """Run up to ``n_iter`` flooding iterations, recomputing only nodes whose
    inputs changed.

    ``chk_dirty`` / ``var_dirty`` mark nodes that must be recomputed; set
    them all when starting from scratch or after editing ``prior``. A clean
    node would reproduce its previous outputs bit for bit, so the result is
    identical to full :func:`check_pass` / :func:`var_pass` sweeps.

    Stops early once an iteration leaves every variable-to-check message
    unchanged, since later iterations would reproduce the same state.
    Returns ``(iterations_executed, at_fixed_point)``.
    """
    m = chk_ptr.shape[0] - 1
    n = var_ptr.shape[0] - 1
    maxdeg = 0
    for c in range(m):
        maxdeg = max(maxdeg, chk_ptr[c + 1] - chk_ptr[c])
    t = np.empty(maxdeg)
    pre = np.empty(maxdeg)
    damp = gamma != 1.0
    for it in range(n_iter):
        for c in range(m):
            if not chk_dirty[c]:
                continue
            chk_dirty[c] = False
            a = chk_ptr[c]
            d = chk_ptr[c + 1] - a
            sign = -1.0 if syndrome[c] else 1.0
            acc = 1.0
            for i in range(d):
                t[i] = math.tanh(0.5 * v2c[a + i])
                pre[i] = acc
                acc *= t[i]
            acc = 1.0
            for i in range(d - 1, -1, -1):
                prod = pre[i] * acc
                acc *= t[i]
                if prod >= 1.0:
                    val = llr_max
                elif prod <= -1.0:
                    val = -llr_max
                else:
                    val = 2.0 * math.atanh(prod)
                    if val > llr_max:
                        val = llr_max
                    elif val < -llr_max:
                        val = -llr_max
                val = sign * val
                if val != c2v[a + i]:
                    c2v[a + i] = val
                    var_dirty[edge_var[a + i]] = True
        changed = False
        for v in range(n):
            if not var_dirty[v]:
                continue
            var_dirty[v] = False
            a = var_ptr[v]
            b = var_ptr[v + 1]
            total = 0.0
            for k in range(a, b):
                total += c2v[var_edges[k]]
            beliefs[v] = prior[v] + total
            for k in range(a, b):
                e = var_edges[k]
                new = prior[v] + (total - c2v[e])
                if damp:
                    new = (1.0 - gamma) * v2c[e] + gamma * new
                if new > llr_max:
                    new = llr_max
                elif new < -llr_max:
                    new = -llr_max
                if new != v2c[e]:
                    v2c[e] = new
                    chk_dirty[edge_chk[e]] = True
                    changed = True
                    if damp:
                        var_dirty[v] = True
        if not changed:
            return it + 1, True
    return n_iter, False


@njit(cache=True)
def hard_decision_matches(chk_ptr, edge_var, beliefs, syndrome, xhat):
    n = beliefs.shape[0]
    for v in range(n):
        xhat[v] = 1 if beliefs[v] < 0.0 else 0
    m = chk_ptr.shape[0] - 1
    for c in range(m):
        par = 0
        for k in range(chk_ptr[c], chk_ptr[c + 1]):
            par ^= xhat[edge_var[k]]
        if par != syndrome[c]:
            return False
    return True


@njit(cache=True)
def bpgd(chk_ptr, edge_var, edge_chk, var_ptr, var_edges, syndrome, prior, n_iter, gamma,
         llr_max, tie_key, max_rounds, xhat, decimated, trace):
    """Belief propagation with guided decimation.

    ``prior`` is updated in place as variables are decimated. ``decimated``
    receives the variable picked in each round (-1 past the last round).
    If ``trace`` has rows, row ``r`` receives the beliefs after round ``r``.

    Returns ``(status, rounds_used, nominal_iterations, executed_iterations)``.
    """
    n = prior.shape[0]
    n_edges = edge_var.shape[0]
    v2c = np.empty(n_edges)
    for e in range(n_edges):
        v2c[e] = prior[edge_var[e]]
    c2v = np.zeros(n_edges)
    beliefs = prior.copy()
    chk_dirty = np.ones(chk_ptr.shape[0] - 1, dtype=np.bool_)
    var_dirty = np.ones(n, dtype=np.bool_)
    open_ = np.ones(n, dtype=np.bool_)
    decimated[:] = -1
    stable = False
    executed = 0
    for r in range(max_rounds):
        if not stable:
            ran, stable = run_iterations(chk_ptr, edge_var, edge_chk, var_ptr, var_edges,
                                         syndrome, prior, v2c, c2v, beliefs, chk_dirty,
                                         var_dirty, n_iter, gamma, llr_max)
            executed += ran
        if r < trace.shape[0]:
            trace[r, :] = beliefs
        if hard_decision_matches(chk_ptr, edge_var, beliefs, syndrome, xhat):
            return CONVERGED, r + 1, (r + 1) * n_iter, executed
        best = -1
        best_mag = -1.0
        best_key = 0
        for v in range(n):
            if open_[v]:
                mag = abs(beliefs[v])
                if mag > best_mag or (mag == best_mag and tie_key[v] < best_key):
                    best = v
                    best_mag = mag
                    best_key = tie_key[v]
        if best < 0:
            return NONCONVERGENCE, r + 1, (r + 1) * n_iter, executed
        new = llr_max if beliefs[best] >= 0.0 else -llr_max
        if new != prior[best]:
            prior[best] = new
            var_dirty[best] = True
            stable = False
        open_[best] = False
        decimated[r] = best
    return NONCONVERGENCE, max_rounds, max_rounds * n_iter, executed


@njit(cache=True)
def peel(chk_ptr, edge_var, var_ptr, var_edges, edge_chk, syndrome, value):
    """Peeling decoder on a partial assignment.

    ``value[v]`` is 0/1 for known bits and -1 for unknown ones; it is filled
    in place. Dangling checks are served first-in first-out starting from
    the lowest index. The final assignment does not depend on this order.

    Returns ``(n_unknown_left, residual_ok)`` where ``residual_ok`` tells
    whether every check whose bits are all known is satisfied.
    """
    m = chk_ptr.shape[0] - 1
    count = np.zeros(m, dtype=np.int64)
    parity = np.zeros(m, dtype=np.int64)
    queue = np.empty(m + edge_var.shape[0] + 1, dtype=np.int64)
    head = 0
    tail = 0
    for c in range(m):
        par = syndrome[c]
        cnt = 0
        for k in range(chk_ptr[c], chk_ptr[c + 1]):
            x = value[edge_var[k]]
            if x < 0:
                cnt += 1
            else:
                par ^= x
        count[c] = cnt
        parity[c] = par
        if cnt == 1:
            queue[tail] = c
            tail += 1
    while head < tail:
        c = queue[head]
        head += 1
        if count[c] != 1:
            continue
        v = -1
        for k in range(chk_ptr[c], chk_ptr[c + 1]):
            if value[edge_var[k]] < 0:
                v = edge_var[k]
                break
        bit = parity[c]
        value[v] = bit
        for k in range(var_ptr[v], var_ptr[v + 1]):
            c2 = edge_chk[var_edges[k]]
            count[c2] -= 1
            parity[c2] ^= bit
            if count[c2] == 1:
                queue[tail] = c2
                tail += 1
    left = 0
    for v in range(value.shape[0]):
        if value[v] < 0:
            left += 1
    ok = True
    for c in range(m):
        if count[c] == 0 and parity[c] != 0:
            ok = False
    return left, ok


@njit(cache=True)
def row_outside_hash(chk_ptr, edge_var, unknown, keys, out):
    """XOR of ``keys`` over the known (non-residual) support of each row."""
    m = chk_ptr.shape[0] - 1
    for c in range(m):
        h = np.uint64(0)
        for k in range(chk_ptr[c], chk_ptr[c + 1]):
            v = edge_var[k]
            if not unknown[v]:
                h ^= keys[v]
        out[c] = h
