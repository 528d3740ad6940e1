"""Numpy implementations of the hot kernels.

The compiled extension (``_ckernels``) mirrors these signatures exactly; the
package selects one backend at import time. All randomness is pre-drawn by
the caller, so every kernel is a deterministic function of its inputs.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def batch_interval_sums(
    weights: np.ndarray, gvals: np.ndarray, b: float
) -> tuple[np.ndarray, np.ndarray, int]:
    """Split weighted samples into consecutive intervals of weight mass ``b``.

    Returns per-interval estimand sums ``S`` (kappa-weighted), interval masses
    ``M`` and ``L = ceil(sum(w) / b)``. Sample ``u`` occupies the mass range
    ``(D_{u-1}, D_u]``; a sample straddling interval edges is split so that
    its pieces sum to ``w_u`` exactly.
    """
    w = np.asarray(weights, dtype=float)
    g = np.asarray(gvals, dtype=float)
    if g.ndim != 2 or g.shape[0] != w.shape[0]:
        raise ValueError("gvals must be (n_samples, n_components)")
    total = float(np.sum(w))
    if total <= 0.0 or b <= 0.0:
        raise ValueError("positive total weight and batch length required")
    L = int(np.ceil(total / b))
    S = np.zeros((L, g.shape[1]))
    M = np.zeros(L)
    right = np.cumsum(w)
    left = right - w
    pos = w > 0.0
    i0 = np.clip((left[pos] // b).astype(np.int64), 0, L - 1)
    i1 = np.clip(np.ceil(right[pos] / b).astype(np.int64) - 1, 0, L - 1)
    i1 = np.maximum(i1, i0)
    rows = np.nonzero(pos)[0]
    single = i0 == i1
    sr = rows[single]
    np.add.at(M, i0[single], w[sr])
    np.add.at(S, i0[single], w[sr, None] * g[sr])
    for u, j0, j1 in zip(rows[~single], i0[~single], i1[~single]):
        wu = w[u]
        acc = 0.0
        for j in range(j0, j1 + 1):
            if j == j0:
                kap = (j0 + 1) * b - left[u]
            elif j == j1:
                kap = wu - acc
            else:
                kap = b
            if kap > 0.0:
                M[j] += kap
                S[j] += kap * g[u]
            acc += kap
    return S, M, L


def football_loglik(
    x: np.ndarray,
    log_lh: float,
    log_la: float,
    home: np.ndarray,
    away: np.ndarray,
    hg: np.ndarray,
    ag: np.ndarray,
    norm: np.ndarray,
) -> float:
    """Poisson goals log likelihood over a set of matches.

    ``x`` holds team strengths indexed by ``home``/``away``; home and away
    rates are ``exp(log_lh + x_h - x_a)`` and ``exp(log_la - (x_h - x_a))``.
    ``norm`` carries the per-match ``-log(hg! ag!)`` constants (zeros to drop
    them).
    """
    d = x[home] - x[away]
    with np.errstate(over="ignore"):
        ll = (
            hg * (log_lh + d)
            - np.exp(log_lh + d)
            + ag * (log_la - d)
            - np.exp(log_la - d)
            + norm
        )
    return float(np.sum(ll))


def _season_match_term(x, lh, la, log_lh, log_la, m_home, m_away, m_hg, m_ag, sl) -> float:
    d = x[m_home[sl]] - x[m_away[sl]]
    with np.errstate(over="ignore"):
        out = (
            float(np.dot(m_hg[sl], d) - np.dot(m_ag[sl], d))
            - lh * float(np.sum(np.exp(d)))
            - la * float(np.sum(np.exp(-d)))
            + float(np.sum(m_hg[sl])) * log_lh
            + float(np.sum(m_ag[sl])) * log_la
        )
    return out


def _retained_term(x, eta, ss, r_prev, r_cur, sl) -> float:
    rp = r_prev[sl]
    if len(rp) == 0:
        return 0.0
    prev = x[rp]
    resid = x[r_cur[sl]] - eta * (prev - prev.mean())
    return -len(rp) * np.log(ss) - 0.5 * float(np.dot(resid, resid)) / (ss * ss)


def _promoted_term(x, mp, sp, p_cur, sl) -> float:
    pc = p_cur[sl]
    if len(pc) == 0:
        return 0.0
    resid = x[pc] - mp
    return -len(pc) * np.log(sp) - 0.5 * float(np.dot(resid, resid)) / (sp * sp)


def football_mh_chain(
    x: np.ndarray,
    theta: np.ndarray,
    offsets: np.ndarray,
    m_start: np.ndarray,
    m_home: np.ndarray,
    m_away: np.ndarray,
    m_hg: np.ndarray,
    m_ag: np.ndarray,
    r_start: np.ndarray,
    r_prev: np.ndarray,
    r_cur: np.ndarray,
    p_start: np.ndarray,
    p_cur: np.ndarray,
    prior: np.ndarray,
    scales: np.ndarray,
    u_block: np.ndarray,
    u_pick: np.ndarray,
    z_x: np.ndarray,
    z_th: np.ndarray,
    log_u: np.ndarray,
) -> int:
    """Metropolis-Hastings chain over strengths and rate/evolution parameters.

    ``x`` (flat strengths, seasons at ``offsets``) and ``theta``
    ``(lambda_h, lambda_a, eta, sigma_s, mu_p, sigma_p)`` are updated in
    place; one step per entry of the pre-drawn arrays. ``prior`` is
    ``(shape_h, scale_h, shape_a, scale_a)``; ``scales`` is
    ``(sd_x, sd_lh, sd_la, sd_eta, sd_ss, sd_mp, sd_sp, p_strength)``.
    Block choice: with probability ``p_strength`` one season's strengths move
    jointly; otherwise one of four parameter blocks moves (lambdas and scale
    parameters via log-normal proposals, with the Jacobian correction in the
    acceptance ratio). Returns the number of accepted proposals.
    """
    t = len(offsets) - 1
    sd_x, sd_lh, sd_la, sd_eta, sd_ss, sd_mp, sd_sp, p_strength = scales
    shape_h, scale_h, shape_a, scale_a = prior
    n_steps = len(u_block)
    accepted = 0

    def mslice(s):
        return slice(m_start[s], m_start[s + 1])

    def rslice(s):
        return slice(r_start[s], r_start[s + 1])

    def pslice(s):
        return slice(p_start[s], p_start[s + 1])

    for j in range(n_steps):
        lh, la, eta, ss, mp, sp = theta
        log_lh, log_la = np.log(lh), np.log(la)
        if u_block[j] < p_strength:
            v = min(int(u_pick[j] * t), t - 1)
            lo, hi = offsets[v], offsets[v + 1]
            old = 0.0
            old += _season_match_term(x, lh, la, log_lh, log_la, m_home, m_away, m_hg, m_ag, mslice(v))
            if v >= 1:
                old += _retained_term(x, eta, ss, r_prev, r_cur, rslice(v))
                old += _promoted_term(x, mp, sp, p_cur, pslice(v))
            if v + 1 < t:
                old += _retained_term(x, eta, ss, r_prev, r_cur, rslice(v + 1))
            saved = x[lo:hi].copy()
            x[lo:hi] = saved + sd_x * z_x[j, : hi - lo]
            new = 0.0
            new += _season_match_term(x, lh, la, log_lh, log_la, m_home, m_away, m_hg, m_ag, mslice(v))
            if v >= 1:
                new += _retained_term(x, eta, ss, r_prev, r_cur, rslice(v))
                new += _promoted_term(x, mp, sp, p_cur, pslice(v))
            if v + 1 < t:
                new += _retained_term(x, eta, ss, r_prev, r_cur, rslice(v + 1))
            if log_u[j] < new - old:
                accepted += 1
            else:
                x[lo:hi] = saved
            continue
        w = min(int(u_pick[j] * 4), 3)
        if w == 0 or w == 1:
            d = x[m_home] - x[m_away]
            if w == 0:
                lam, lam_new = lh, lh * np.exp(sd_lh * z_th[j, 0])
                goals = float(np.sum(m_hg))
                expsum = float(np.sum(np.exp(d)))
                shape, scale = shape_h, scale_h
            else:
                lam, lam_new = la, la * np.exp(sd_la * z_th[j, 0])
                goals = float(np.sum(m_ag))
                expsum = float(np.sum(np.exp(-d)))
                shape, scale = shape_a, scale_a
            dlog = np.log(lam_new) - np.log(lam)
            delta = goals * dlog - (lam_new - lam) * expsum
            delta += (shape - 1.0) * dlog - (lam_new - lam) / scale
            delta += dlog  # log-normal proposal Jacobian
            if log_u[j] < delta:
                theta[w] = lam_new
                accepted += 1
        elif w == 2:
            eta_new = eta + sd_eta * z_th[j, 0]
            ss_new = ss * np.exp(sd_ss * z_th[j, 1])
            delta = 0.0
            for s in range(1, t):
                delta += _retained_term(x, eta_new, ss_new, r_prev, r_cur, rslice(s))
                delta -= _retained_term(x, eta, ss, r_prev, r_cur, rslice(s))
            delta += -(np.log(ss_new) - np.log(ss))  # Jeffreys 1/sigma_s
            delta += np.log(ss_new) - np.log(ss)  # proposal Jacobian
            if log_u[j] < delta:
                theta[2], theta[3] = eta_new, ss_new
                accepted += 1
        else:
            mp_new = mp + sd_mp * z_th[j, 0]
            sp_new = sp * np.exp(sd_sp * z_th[j, 1])
            delta = 0.0
            for s in range(1, t):
                delta += _promoted_term(x, mp_new, sp_new, p_cur, pslice(s))
                delta -= _promoted_term(x, mp, sp, p_cur, pslice(s))
            delta += -(np.log(sp_new) - np.log(sp))
            delta += np.log(sp_new) - np.log(sp)
            if log_u[j] < delta:
                theta[4], theta[5] = mp_new, sp_new
                accepted += 1
    return accepted


def lgm_gibbs_chain(
    traj: np.ndarray,
    chol: np.ndarray,
    mprev: np.ndarray,
    mnext: np.ndarray,
    cvecs: np.ndarray,
    u_pick: np.ndarray,
    z: np.ndarray,
) -> None:
    """Single-site Gibbs sweeps over trajectory states, in place.

    Each step redraws one uniformly chosen state from its Gaussian full
    conditional. ``chol[s]`` is the lower Cholesky factor of the conditional
    precision ``P_s``; the conditional mean is ``P_s^{-1} rhs`` with
    ``rhs = cvecs[s] + mprev[s] @ x_{s-1} + mnext[s] @ x_{s+1}`` (boundary
    matrices are zero). The draw is ``mean + L^{-T} z``.
    """
    t = traj.shape[0]
    for j in range(len(u_pick)):
        s = min(int(u_pick[j] * t), t - 1)
        rhs = cvecs[s].copy()
        if s > 0:
            rhs += mprev[s] @ traj[s - 1]
        if s < t - 1:
            rhs += mnext[s] @ traj[s + 1]
        L = chol[s]
        w = np.linalg.solve(L, rhs)
        mean = np.linalg.solve(L.T, w)
        noise = np.linalg.solve(L.T, z[j])
        traj[s] = mean + noise
