# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the numpy kernels; see _pykernels for reference semantics."""

import numpy as np

cimport numpy as cnp
from libc.math cimport ceil, exp, floor, log

cnp.import_array()

BACKEND_NAME = "cython"


def batch_interval_sums(weights, gvals, double b):
    w = np.ascontiguousarray(weights, dtype=np.float64)
    g = np.ascontiguousarray(gvals, dtype=np.float64)
    if g.ndim != 2 or g.shape[0] != w.shape[0]:
        raise ValueError("gvals must be (n_samples, n_components)")
    cdef double total = float(np.sum(w))
    if total <= 0.0 or b <= 0.0:
        raise ValueError("positive total weight and batch length required")
    cdef Py_ssize_t L = <Py_ssize_t>ceil(total / b)
    right_arr = np.cumsum(w)
    left_arr = right_arr - w
    S_arr = np.zeros((L, g.shape[1]))
    M_arr = np.zeros(L)
    cdef double[::1] wv = w
    cdef double[:, ::1] gv = g
    cdef double[::1] left = left_arr
    cdef double[::1] right = right_arr
    cdef double[:, ::1] S = S_arr
    cdef double[::1] M = M_arr
    cdef Py_ssize_t n = wv.shape[0], G = gv.shape[1]
    cdef Py_ssize_t u, j0, j1, jj, c
    cdef double wu, a, kap, acc
    for u in range(n):
        wu = wv[u]
        if wu <= 0.0:
            continue
        a = left[u]
        j0 = <Py_ssize_t>floor(a / b)
        if j0 < 0:
            j0 = 0
        if j0 > L - 1:
            j0 = L - 1
        j1 = <Py_ssize_t>ceil(right[u] / b) - 1
        if j1 < 0:
            j1 = 0
        if j1 > L - 1:
            j1 = L - 1
        if j1 < j0:
            j1 = j0
        if j0 == j1:
            M[j0] += wu
            for c in range(G):
                S[j0, c] += wu * gv[u, c]
        else:
            acc = 0.0
            for jj in range(j0, j1 + 1):
                if jj == j0:
                    kap = (j0 + 1) * b - a
                elif jj == j1:
                    kap = wu - acc
                else:
                    kap = b
                if kap > 0.0:
                    M[jj] += kap
                    for c in range(G):
                        S[jj, c] += kap * gv[u, c]
                acc += kap
    return S_arr, M_arr, int(L)


def football_loglik(x, double log_lh, double log_la, home, away, hg, ag, norm):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.int64_t[::1] hv = np.ascontiguousarray(home, dtype=np.int64)
    cdef cnp.int64_t[::1] av = np.ascontiguousarray(away, dtype=np.int64)
    cdef double[::1] hgv = np.ascontiguousarray(hg, dtype=np.float64)
    cdef double[::1] agv = np.ascontiguousarray(ag, dtype=np.float64)
    cdef double[::1] nv = np.ascontiguousarray(norm, dtype=np.float64)
    cdef Py_ssize_t m, n = hv.shape[0]
    cdef double s = 0.0, d
    for m in range(n):
        d = xv[hv[m]] - xv[av[m]]
        s += hgv[m] * (log_lh + d) - exp(log_lh + d) + agv[m] * (log_la - d) - exp(log_la - d) + nv[m]
    return s


cdef double _match_term(
    double[::1] x, double lh, double la, double log_lh, double log_la,
    cnp.int64_t[::1] mh, cnp.int64_t[::1] ma, double[::1] hg, double[::1] ag,
    Py_ssize_t lo, Py_ssize_t hi,
) noexcept nogil:
    cdef double s = 0.0, d
    cdef Py_ssize_t m
    for m in range(lo, hi):
        d = x[mh[m]] - x[ma[m]]
        s += hg[m] * d - ag[m] * d - lh * exp(d) - la * exp(-d) + hg[m] * log_lh + ag[m] * log_la
    return s


cdef double _retained_term(
    double[::1] x, double eta, double ss,
    cnp.int64_t[::1] rp, cnp.int64_t[::1] rc, Py_ssize_t lo, Py_ssize_t hi,
) noexcept nogil:
    if hi <= lo:
        return 0.0
    cdef double mean = 0.0, resid, s = 0.0
    cdef Py_ssize_t i
    for i in range(lo, hi):
        mean += x[rp[i]]
    mean /= (hi - lo)
    for i in range(lo, hi):
        resid = x[rc[i]] - eta * (x[rp[i]] - mean)
        s += resid * resid
    return -(hi - lo) * log(ss) - 0.5 * s / (ss * ss)


cdef double _promoted_term(
    double[::1] x, double mp, double sp,
    cnp.int64_t[::1] pc, Py_ssize_t lo, Py_ssize_t hi,
) noexcept nogil:
    if hi <= lo:
        return 0.0
    cdef double resid, s = 0.0
    cdef Py_ssize_t i
    for i in range(lo, hi):
        resid = x[pc[i]] - mp
        s += resid * resid
    return -(hi - lo) * log(sp) - 0.5 * s / (sp * sp)


def football_mh_chain(
    x, theta, offsets,
    m_start, m_home, m_away, m_hg, m_ag,
    r_start, r_prev, r_cur,
    p_start, p_cur,
    prior, scales,
    u_block, u_pick, z_x, z_th, log_u,
):
    cdef double[::1] xv = x
    cdef double[::1] th = theta
    cdef cnp.int64_t[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef cnp.int64_t[::1] ms = np.ascontiguousarray(m_start, dtype=np.int64)
    cdef cnp.int64_t[::1] mh = np.ascontiguousarray(m_home, dtype=np.int64)
    cdef cnp.int64_t[::1] ma = np.ascontiguousarray(m_away, dtype=np.int64)
    cdef double[::1] hg = np.ascontiguousarray(m_hg, dtype=np.float64)
    cdef double[::1] ag = np.ascontiguousarray(m_ag, dtype=np.float64)
    cdef cnp.int64_t[::1] rs = np.ascontiguousarray(r_start, dtype=np.int64)
    cdef cnp.int64_t[::1] rp = np.ascontiguousarray(r_prev, dtype=np.int64)
    cdef cnp.int64_t[::1] rc = np.ascontiguousarray(r_cur, dtype=np.int64)
    cdef cnp.int64_t[::1] ps = np.ascontiguousarray(p_start, dtype=np.int64)
    cdef cnp.int64_t[::1] pc = np.ascontiguousarray(p_cur, dtype=np.int64)
    cdef double[::1] pr = np.ascontiguousarray(prior, dtype=np.float64)
    cdef double[::1] sc = np.ascontiguousarray(scales, dtype=np.float64)
    cdef double[::1] ub = np.ascontiguousarray(u_block, dtype=np.float64)
    cdef double[::1] up = np.ascontiguousarray(u_pick, dtype=np.float64)
    cdef double[:, ::1] zx = np.ascontiguousarray(z_x, dtype=np.float64)
    cdef double[:, ::1] zt = np.ascontiguousarray(z_th, dtype=np.float64)
    cdef double[::1] lu = np.ascontiguousarray(log_u, dtype=np.float64)

    cdef Py_ssize_t t = off.shape[0] - 1
    cdef Py_ssize_t n_matches = mh.shape[0]
    cdef double sd_x = sc[0], sd_lh = sc[1], sd_la = sc[2], sd_eta = sc[3]
    cdef double sd_ss = sc[4], sd_mp = sc[5], sd_sp = sc[6], p_strength = sc[7]
    cdef double shape_h = pr[0], scale_h = pr[1], shape_a = pr[2], scale_a = pr[3]
    cdef Py_ssize_t n_steps = ub.shape[0]
    cdef Py_ssize_t max_team = zx.shape[1]
    saved_arr = np.empty(max_team)
    cdef double[::1] saved = saved_arr

    cdef Py_ssize_t j, v, w, lo, hi, i, s, m
    cdef int accepted = 0
    cdef double lh, la, eta, ss, mp, sp, log_lh, log_la
    cdef double old, new, delta, lam, lam_new, dlog, goals, expsum, d
    cdef double eta_new, ss_new, mp_new, sp_new, shape, scale

    for j in range(n_steps):
        lh = th[0]; la = th[1]; eta = th[2]; ss = th[3]; mp = th[4]; sp = th[5]
        log_lh = log(lh); log_la = log(la)
        if ub[j] < p_strength:
            v = <Py_ssize_t>(up[j] * t)
            if v > t - 1:
                v = t - 1
            lo = off[v]; hi = off[v + 1]
            old = _match_term(xv, lh, la, log_lh, log_la, mh, ma, hg, ag, ms[v], ms[v + 1])
            if v >= 1:
                old += _retained_term(xv, eta, ss, rp, rc, rs[v], rs[v + 1])
                old += _promoted_term(xv, mp, sp, pc, ps[v], ps[v + 1])
            if v + 1 < t:
                old += _retained_term(xv, eta, ss, rp, rc, rs[v + 1], rs[v + 2])
            for i in range(hi - lo):
                saved[i] = xv[lo + i]
                xv[lo + i] = saved[i] + sd_x * zx[j, i]
            new = _match_term(xv, lh, la, log_lh, log_la, mh, ma, hg, ag, ms[v], ms[v + 1])
            if v >= 1:
                new += _retained_term(xv, eta, ss, rp, rc, rs[v], rs[v + 1])
                new += _promoted_term(xv, mp, sp, pc, ps[v], ps[v + 1])
            if v + 1 < t:
                new += _retained_term(xv, eta, ss, rp, rc, rs[v + 1], rs[v + 2])
            if lu[j] < new - old:
                accepted += 1
            else:
                for i in range(hi - lo):
                    xv[lo + i] = saved[i]
            continue
        w = <Py_ssize_t>(up[j] * 4)
        if w > 3:
            w = 3
        if w == 0 or w == 1:
            goals = 0.0
            expsum = 0.0
            if w == 0:
                lam = lh
                lam_new = lh * exp(sd_lh * zt[j, 0])
                for m in range(n_matches):
                    d = xv[mh[m]] - xv[ma[m]]
                    goals += hg[m]
                    expsum += exp(d)
                shape = shape_h; scale = scale_h
            else:
                lam = la
                lam_new = la * exp(sd_la * zt[j, 0])
                for m in range(n_matches):
                    d = xv[mh[m]] - xv[ma[m]]
                    goals += ag[m]
                    expsum += exp(-d)
                shape = shape_a; scale = scale_a
            dlog = log(lam_new) - log(lam)
            delta = goals * dlog - (lam_new - lam) * expsum
            delta += (shape - 1.0) * dlog - (lam_new - lam) / scale
            delta += dlog
            if lu[j] < delta:
                th[w] = lam_new
                accepted += 1
        elif w == 2:
            eta_new = eta + sd_eta * zt[j, 0]
            ss_new = ss * exp(sd_ss * zt[j, 1])
            delta = 0.0
            for s in range(1, t):
                delta += _retained_term(xv, eta_new, ss_new, rp, rc, rs[s], rs[s + 1])
                delta -= _retained_term(xv, eta, ss, rp, rc, rs[s], rs[s + 1])
            delta += -(log(ss_new) - log(ss))
            delta += log(ss_new) - log(ss)
            if lu[j] < delta:
                th[2] = eta_new
                th[3] = ss_new
                accepted += 1
        else:
            mp_new = mp + sd_mp * zt[j, 0]
            sp_new = sp * exp(sd_sp * zt[j, 1])
            delta = 0.0
            for s in range(1, t):
                delta += _promoted_term(xv, mp_new, sp_new, pc, ps[s], ps[s + 1])
                delta -= _promoted_term(xv, mp, sp, pc, ps[s], ps[s + 1])
            delta += -(log(sp_new) - log(sp))
            delta += log(sp_new) - log(sp)
            if lu[j] < delta:
                th[4] = mp_new
                th[5] = sp_new
                accepted += 1
    return accepted


def lgm_gibbs_chain(traj, chol, mprev, mnext, cvecs, u_pick, z):
    cdef double[:, ::1] tr = traj
    cdef double[:, :, ::1] ch = np.ascontiguousarray(chol, dtype=np.float64)
    cdef double[:, :, ::1] mp = np.ascontiguousarray(mprev, dtype=np.float64)
    cdef double[:, :, ::1] mn = np.ascontiguousarray(mnext, dtype=np.float64)
    cdef double[:, ::1] co = np.ascontiguousarray(cvecs, dtype=np.float64)
    cdef double[::1] up = np.ascontiguousarray(u_pick, dtype=np.float64)
    cdef double[:, ::1] zv = np.ascontiguousarray(z, dtype=np.float64)
    cdef Py_ssize_t t = tr.shape[0], d = tr.shape[1]
    rhs_arr = np.empty(d)
    tmp_arr = np.empty(d)
    cdef double[::1] rhs = rhs_arr
    cdef double[::1] tmp = tmp_arr
    cdef Py_ssize_t j, s, i, c
    cdef double acc
    for j in range(up.shape[0]):
        s = <Py_ssize_t>(up[j] * t)
        if s > t - 1:
            s = t - 1
        for i in range(d):
            rhs[i] = co[s, i]
        if s > 0:
            for i in range(d):
                acc = 0.0
                for c in range(d):
                    acc += mp[s, i, c] * tr[s - 1, c]
                rhs[i] += acc
        if s < t - 1:
            for i in range(d):
                acc = 0.0
                for c in range(d):
                    acc += mn[s, i, c] * tr[s + 1, c]
                rhs[i] += acc
        # forward solve L w = rhs, then back solve L^T m = w (both in place)
        for i in range(d):
            acc = rhs[i]
            for c in range(i):
                acc -= ch[s, i, c] * rhs[c]
            rhs[i] = acc / ch[s, i, i]
        for i in range(d - 1, -1, -1):
            acc = rhs[i]
            for c in range(i + 1, d):
                acc -= ch[s, c, i] * rhs[c]
            rhs[i] = acc / ch[s, i, i]
        # noise: back solve L^T e = z_j
        for i in range(d - 1, -1, -1):
            acc = zv[j, i]
            for c in range(i + 1, d):
                acc -= ch[s, c, i] * tmp[c]
            tmp[i] = acc / ch[s, i, i]
        for i in range(d):
            tr[s, i] = rhs[i] + tmp[i]
