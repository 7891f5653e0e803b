"""Hot inner loops, each with a numba and a numpy implementation.

Random numbers are always drawn by the caller from a numpy ``Generator``
and passed in, so both backends consume identical inputs and a given seed
means the same thing regardless of backend.
"""

from __future__ import annotations

import numpy as np

from ._accel import dispatch, njit

# -- rank-one Margenau-Hill values -------------------------------------------


@njit
def _mh_rank_one_batch_nb(psi, va, vb):
    n, d = psi.shape
    out = np.empty(n)
    for k in range(n):
        s1 = 0j
        s2 = 0j
        s3 = 0j
        for i in range(d):
            s1 += psi[k, i].conjugate() * va[k, i]
            s2 += va[k, i].conjugate() * vb[k, i]
            s3 += vb[k, i].conjugate() * psi[k, i]
        out[k] = (s1 * s2 * s3).real
    return out


@dispatch(_mh_rank_one_batch_nb)
def mh_rank_one_batch(psi, va, vb):
    """Re(<psi|a><a|b><b|psi>) row by row for unit vectors stacked as (n, d)."""
    s1 = np.einsum("ki,ki->k", psi.conj(), va)
    s2 = np.einsum("ki,ki->k", va.conj(), vb)
    s3 = np.einsum("ki,ki->k", vb.conj(), psi)
    return (s1 * s2 * s3).real


# -- derivative-free refinement ----------------------------------------------


@njit
def _triple_value_nb(vecs):
    d = vecs.shape[1]
    s1 = 0j
    s2 = 0j
    s3 = 0j
    for i in range(d):
        s1 += vecs[0, i].conjugate() * vecs[1, i]
        s2 += vecs[1, i].conjugate() * vecs[2, i]
        s3 += vecs[2, i].conjugate() * vecs[0, i]
    return (s1 * s2 * s3).real


@njit
def _refine_nb(vecs0, best0, noise, choice, step0, patience, min_step):
    vecs = vecs0.copy()
    d = vecs.shape[1]
    budget = noise.shape[0]
    history = np.empty(budget)
    n_acc = 0
    best = best0
    step = step0
    fails = 0
    t = 0
    cand = np.empty(d, dtype=np.complex128)
    while t < budget and step >= min_step:
        c = choice[t]
        proj = 0j
        for i in range(d):
            proj += vecs[c, i].conjugate() * noise[t, i]
        norm2 = 0.0
        for i in range(d):
            w = vecs[c, i] + step * (noise[t, i] - proj * vecs[c, i])
            cand[i] = w
            norm2 += w.real * w.real + w.imag * w.imag
        norm = np.sqrt(norm2)
        old = vecs[c].copy()
        for i in range(d):
            vecs[c, i] = cand[i] / norm
        val = _triple_value_nb(vecs)
        if val < best:
            best = val
            history[n_acc] = val
            n_acc += 1
            fails = 0
        else:
            vecs[c] = old
            fails += 1
            if fails >= patience:
                step *= 0.5
                fails = 0
        t += 1
    return vecs, best, t, history[:n_acc], step


def _triple_value(vecs):
    return (np.vdot(vecs[0], vecs[1]) * np.vdot(vecs[1], vecs[2]) * np.vdot(vecs[2], vecs[0])).real


@dispatch(_refine_nb)
def refine_rank_one(vecs0, best0, noise, choice, step0, patience, min_step):
    """Random tangent-step descent on the unit vectors ``(psi, a, b)``.

    One vector (``choice[t]``) moves per step; a candidate is kept only if it
    strictly lowers the value. The step halves after ``patience`` consecutive
    rejections and the loop stops below ``min_step`` or when the noise runs out.
    Returns ``(vecs, best, steps_used, accepted_values, final_step)``.
    """
    vecs = vecs0.copy()
    history = []
    best = best0
    step = step0
    fails = 0
    t = 0
    budget = noise.shape[0]
    while t < budget and step >= min_step:
        c = choice[t]
        v = vecs[c]
        g = noise[t]
        w = v + step * (g - np.vdot(v, g) * v)
        old = v.copy()
        vecs[c] = w / np.linalg.norm(w)
        val = _triple_value(vecs)
        if val < best:
            best = val
            history.append(val)
            fails = 0
        else:
            vecs[c] = old
            fails += 1
            if fails >= patience:
                step *= 0.5
                fails = 0
        t += 1
    return vecs, best, t, np.array(history, dtype=float), step


# -- sequential projective measurement ---------------------------------------


@njit
def _tally_sequence_nb(u1, u2, p_first, q_yes, q_no):
    counts = np.zeros(4, dtype=np.int64)
    for k in range(u1.shape[0]):
        if u1[k] < p_first:
            if u2[k] < q_yes:
                counts[0] += 1
            else:
                counts[1] += 1
        else:
            if u2[k] < q_no:
                counts[2] += 1
            else:
                counts[3] += 1
    return counts


@dispatch(_tally_sequence_nb)
def tally_sequence(u1, u2, p_first, q_yes, q_no):
    """Counts ``[yy, yn, ny, nn]`` from uniforms for the first and second outcome."""
    first = u1 < p_first
    second = u2 < np.where(first, q_yes, q_no)
    code = 2 * (~first).astype(np.int64) + (~second).astype(np.int64)
    return np.bincount(code, minlength=4).astype(np.int64)


# -- Gaussian pointer --------------------------------------------------------


@njit
def _weak_pointer_outcomes_nb(x, branch_yes, v, coeffs, sigma):
    a_yy, b_nn, c_cross, p1, p0 = coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4]
    inv = 1.0 / (4.0 * sigma * sigma)
    n = x.shape[0]
    out = np.empty(n, dtype=np.bool_)
    for k in range(n):
        log_r = -(2.0 * x[k] - 1.0) * inv
        if log_r <= 0.0:
            r = np.exp(log_r)
            num = a_yy + r * r * b_nn + r * c_cross
            den = p1 + r * r * p0
        else:
            s = np.exp(-log_r)
            num = s * s * a_yy + b_nn + s * c_cross
            den = s * s * p1 + p0
        q = num / den if den > 0.0 else (1.0 if branch_yes[k] else 0.0)
        if q < 0.0:
            q = 0.0
        elif q > 1.0:
            q = 1.0
        out[k] = v[k] < q
    return out


@dispatch(_weak_pointer_outcomes_nb)
def weak_pointer_outcomes(x, branch_yes, v, coeffs, sigma):
    """Second-measurement outcomes after a Gaussian pointer reading ``x``.

    ``coeffs = [Tr b a rho a, Tr b a' rho a', 2 Re Tr b a rho a', Tr rho a, Tr rho a']``
    with ``a' = 1 - a``. The conditional yes probability is a ratio of
    quadratic forms in the pointer amplitudes; it is evaluated through their
    ratio ``r = c0/c1`` (or its inverse), which never overflows.
    """
    a_yy, b_nn, c_cross, p1, p0 = coeffs
    log_r = -(2.0 * x - 1.0) / (4.0 * sigma * sigma)
    small = log_r <= 0.0
    t = np.exp(np.where(small, log_r, -log_r))
    t2 = t * t
    num = np.where(small, a_yy + t2 * b_nn + t * c_cross, t2 * a_yy + b_nn + t * c_cross)
    den = np.where(small, p1 + t2 * p0, t2 * p1 + p0)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(den > 0.0, num / den, branch_yes.astype(float))
    q = np.clip(q, 0.0, 1.0)
    return v < q
