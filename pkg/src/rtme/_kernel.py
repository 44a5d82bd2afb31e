"""Compiled Metropolis-within-Gibbs sweep for the hierarchical renewal model.

One call runs a whole chain. All updates are local: a proposal only re-evaluates
the likelihood terms it touches, and cached quantities (infection pressure,
GARMA log means) are recomputed exactly for the affected days on acceptance.
"""
import math

import numpy as np
from numba import njit

MEAN_FLOOR = 1e-10
DIVERGENCE_LIMIT = 100

# block ids, also used to index acceptance counters
B_ISTAR, B_R, B_BETAPHI, B_SIGMA, B_THETA, B_LAMBDA, B_THETA_JOINT, B_LAMBDA_JOINT, B_GARMA_NC = range(9)
N_BLOCKS = 9
BLOCK_NAMES = ("istar", "r", "beta_phi", "sigma_r", "theta", "lambda", "theta_joint", "lambda_joint",
               "garma_noncentred")


@njit(cache=True)
def pois_lpmf(k, mean):
    if mean < MEAN_FLOOR:
        mean = MEAN_FLOOR
    return k * math.log(mean) - mean - math.lgamma(k + 1.0)


@njit(cache=True)
def gamma_lpdf_logmu(r, logmu, nu):
    return nu * (math.log(nu) - logmu) - math.lgamma(nu) + (nu - 1.0) * math.log(r) - nu * r * math.exp(-logmu)


@njit(cache=True)
def exact_pois_lpmf(k, mean):
    if mean <= 0.0:
        return 0.0 if k == 0 else -np.inf
    return k * math.log(mean) - mean - math.lgamma(k + 1.0)


@njit(cache=True)
def binom_lpmf(k, n, p):
    if k < 0 or k > n:
        return -np.inf
    if p <= 0.0:
        return 0.0 if k == 0 else -np.inf
    if p >= 1.0:
        return 0.0 if k == n else -np.inf
    return (math.lgamma(n + 1.0) - math.lgamma(k + 1.0) - math.lgamma(n - k + 1.0)
            + k * math.log(p) + (n - k) * math.log1p(-p))


@njit(cache=True)
def joint_target(obs, tau, theta, has_me, istar, r, lam_t, logmu, nu, rt_mode, g_shape, g_scale):
    """Every likelihood and transmission term that a joint rescaling move can touch."""
    lp = renewal_sum(istar, r, lam_t)
    if has_me:
        for t in range(obs.shape[0]):
            lp += pois_lpmf(obs[t], theta[tau[t]] * istar[t])
    if rt_mode == 0:
        lp += garma_sum(r, logmu, nu)
    else:
        for t in range(r.shape[0]):
            lp += iid_gamma_lpdf(r[t], g_shape, g_scale)
    return lp


@njit(cache=True)
def iid_gamma_lpdf(r, shape, scale):
    return (shape - 1.0) * math.log(r) - r / scale - math.lgamma(shape) - shape * math.log(scale)


@njit(cache=True)
def pressure_at(istar, w, u):
    s_max = w.shape[0]
    acc = 0.0
    for s in range(1, s_max + 1):
        if u - s < 0:
            break
        acc += w[s - 1] * istar[u - s]
    return acc


@njit(cache=True)
def logmu_at(r, eta, phi, u):
    out = eta[u]
    for i in range(1, phi.shape[0] + 1):
        if u - i < 0:
            break
        out += phi[i - 1] * (math.log(r[u - i]) - eta[u - i])
    return out


@njit(cache=True)
def renewal_sum(istar, r, lam_t):
    acc = 0.0
    for t in range(1, istar.shape[0]):
        acc += pois_lpmf(istar[t], r[t] * lam_t[t])
    return acc


@njit(cache=True)
def garma_sum(r, logmu, nu):
    acc = 0.0
    for t in range(r.shape[0]):
        acc += gamma_lpdf_logmu(r[t], logmu[t], nu)
    return acc


@njit(cache=True)
def _dirichlet_step(cur, kappa):
    """Propose from Dirichlet(kappa * cur); returns (proposal, log q(prop|cur) - log q(cur|prop))."""
    k = cur.shape[0]
    g = np.empty(k)
    tot = 0.0
    for j in range(k):
        g[j] = np.random.gamma(kappa * cur[j], 1.0)
        tot += g[j]
    prop = g / tot
    fwd = 0.0
    rev = 0.0
    for j in range(k):
        if prop[j] <= 1e-300:
            return prop, np.nan
        fwd += -math.lgamma(kappa * cur[j]) + (kappa * cur[j] - 1.0) * math.log(prop[j])
        rev += -math.lgamma(kappa * prop[j]) + (kappa * prop[j] - 1.0) * math.log(cur[j])
    return prop, fwd - rev


@njit(cache=True)
def _rm_gain(i):
    return (i + 1.0) ** -0.6


@njit(cache=True, nogil=True)
def run_chain(seed, obs, tau, has_me, comps, X, ar_order,
              theta_alpha, lam_alpha, beta_sd, phi_sd, sig_lo, sig_hi,
              rt_mode, g_shape, g_scale,
              istar0, r0, theta0, lam0, beta0, phi0, sigma0,
              n_iter, burn, n_adapt, thin, target, target_joint,
              out_theta, out_lam, out_beta, out_phi, out_sigma, out_istar, out_r,
              acc, tries, final_scales):
    """Run one chain; returns 0 on success or -(block + 1) on divergence."""
    np.random.seed(seed)
    n = obs.shape[0]
    n_comp, s_max = comps.shape
    p1 = X.shape[1]
    k_rep = theta0.shape[0]
    m = ar_order
    d_bp = p1 + m

    istar = istar0.copy()
    r = r0.copy()
    theta = theta0.copy()
    lam = lam0.copy()
    beta = beta0.copy()
    phi = phi0.copy()
    sigma = sigma0
    nu = 1.0 / (sigma * sigma)

    w = np.zeros(s_max)
    for k in range(n_comp):
        for s in range(s_max):
            w[s] += lam[k] * comps[k, s]
    lam_t = np.zeros(n)
    for u in range(n):
        lam_t[u] = pressure_at(istar, w, u)
    eta = X @ beta
    logmu = np.zeros(n)
    for u in range(n):
        logmu[u] = logmu_at(r, eta, phi, u)

    ls_i = np.zeros(n)
    for t in range(n):
        ls_i[t] = math.log(max(1.0, 0.3 * math.sqrt(istar[t] + 1.0)))
    ls_r = np.full(n, math.log(0.1))
    ls_bp = 0.0
    ls_sig = math.log(0.1)
    ls_th = math.log(0.03)
    ls_lam = math.log(0.1)
    ls_tj = math.log(0.03)
    ls_lj = math.log(0.1)
    ls_nc = math.log(0.5)

    chol = np.zeros((d_bp, d_bp))
    for j in range(d_bp):
        chol[j, j] = 0.05
    adapt_start = n_adapt // 4
    w_count = 0
    w_mean = np.zeros(d_bp)
    w_m2 = np.zeros((d_bp, d_bp))
    bp_cur = np.empty(d_bp)
    cov_ready = False

    bad = 0
    kept = 0
    for it in range(n_iter):
        adapting = it < n_adapt
        gain = _rm_gain(it)
        recording = it >= burn

        # (a) latent true cases, integer random walk
        if has_me:
            for t in range(n):
                scale = math.exp(ls_i[t])
                step = np.random.geometric(1.0 / scale) if scale > 1.0 else 1
                if np.random.random() < 0.5:
                    step = -step
                k_old = istar[t]
                k_new = k_old + step
                a_prob = 0.0
                if k_new >= 0:
                    th = theta[tau[t]]
                    d = pois_lpmf(obs[t], th * k_new) - pois_lpmf(obs[t], th * k_old)
                    if t >= 1:
                        d += pois_lpmf(k_new, r[t] * lam_t[t]) - pois_lpmf(k_old, r[t] * lam_t[t])
                    for s in range(1, s_max + 1):
                        u = t + s
                        if u >= n:
                            break
                        if w[s - 1] == 0.0:
                            continue
                        lam_new = lam_t[u] + w[s - 1] * (k_new - k_old)
                        d += pois_lpmf(istar[u], r[u] * lam_new) - pois_lpmf(istar[u], r[u] * lam_t[u])
                    if not math.isfinite(d):
                        bad += 1
                        if bad > DIVERGENCE_LIMIT:
                            return -(B_ISTAR + 1)
                    else:
                        bad = 0
                        a_prob = 1.0 if d >= 0 else math.exp(d)
                        if math.log(np.random.random()) < d:
                            istar[t] = k_new
                            for s in range(1, s_max + 1):
                                u = t + s
                                if u >= n:
                                    break
                                lam_t[u] = pressure_at(istar, w, u)
                            if recording:
                                acc[B_ISTAR] += 1
                if recording:
                    tries[B_ISTAR] += 1
                if adapting:
                    ls_i[t] = min(max(ls_i[t] + gain * (a_prob - target), 0.0), 15.0)

        # (b) R_t, log-scale random walk
        for t in range(n):
            r_old = r[t]
            dl = math.exp(ls_r[t]) * np.random.standard_normal()
            r_new = r_old * math.exp(dl)
            d = dl
            if t >= 1:
                d += pois_lpmf(istar[t], r_new * lam_t[t]) - pois_lpmf(istar[t], r_old * lam_t[t])
            if rt_mode == 0:
                d += gamma_lpdf_logmu(r_new, logmu[t], nu) - gamma_lpdf_logmu(r_old, logmu[t], nu)
                for i in range(1, m + 1):
                    u = t + i
                    if u >= n:
                        break
                    lm_new = logmu[u] + phi[i - 1] * dl
                    d += gamma_lpdf_logmu(r[u], lm_new, nu) - gamma_lpdf_logmu(r[u], logmu[u], nu)
            else:
                d += iid_gamma_lpdf(r_new, g_shape, g_scale) - iid_gamma_lpdf(r_old, g_shape, g_scale)
            a_prob = 0.0
            if not math.isfinite(d) or r_new <= 0.0 or not math.isfinite(r_new):
                bad += 1
                if bad > DIVERGENCE_LIMIT:
                    return -(B_R + 1)
            else:
                bad = 0
                a_prob = 1.0 if d >= 0 else math.exp(d)
                if math.log(np.random.random()) < d:
                    r[t] = r_new
                    if rt_mode == 0:
                        for i in range(1, m + 1):
                            u = t + i
                            if u >= n:
                                break
                            logmu[u] = logmu_at(r, eta, phi, u)
                    if recording:
                        acc[B_R] += 1
            if recording:
                tries[B_R] += 1
            if adapting:
                ls_r[t] = min(max(ls_r[t] + gain * (a_prob - target), -12.0), 3.0)

        if rt_mode == 0:
            # (c) beta and phi jointly
            for j in range(p1):
                bp_cur[j] = beta[j]
            for j in range(m):
                bp_cur[p1 + j] = phi[j]
            z = np.empty(d_bp)
            for j in range(d_bp):
                z[j] = np.random.standard_normal()
            bp_new = bp_cur + math.exp(ls_bp) * (chol @ z)
            beta_new = bp_new[:p1].copy()
            phi_new = bp_new[p1:].copy()
            eta_new = X @ beta_new
            logmu_new = np.empty(n)
            for u in range(n):
                logmu_new[u] = logmu_at(r, eta_new, phi_new, u)
            d = garma_sum(r, logmu_new, nu) - garma_sum(r, logmu, nu)
            for j in range(p1):
                d += -0.5 * (beta_new[j] ** 2 - beta[j] ** 2) / beta_sd ** 2
            for j in range(m):
                d += -0.5 * (phi_new[j] ** 2 - phi[j] ** 2) / phi_sd ** 2
            a_prob = 0.0
            if not math.isfinite(d):
                bad += 1
                if bad > DIVERGENCE_LIMIT:
                    return -(B_BETAPHI + 1)
            else:
                bad = 0
                a_prob = 1.0 if d >= 0 else math.exp(d)
                if math.log(np.random.random()) < d:
                    beta[:] = beta_new
                    phi[:] = phi_new
                    eta[:] = eta_new
                    logmu[:] = logmu_new
                    if recording:
                        acc[B_BETAPHI] += 1
            if recording:
                tries[B_BETAPHI] += 1
            if adapting:
                ls_bp = min(max(ls_bp + gain * (a_prob - target_joint), -12.0), 5.0)
                if it >= adapt_start:
                    for j in range(p1):
                        bp_cur[j] = beta[j]
                    for j in range(m):
                        bp_cur[p1 + j] = phi[j]
                    w_count += 1
                    delta = bp_cur - w_mean
                    w_mean += delta / w_count
                    delta2 = bp_cur - w_mean
                    for a in range(d_bp):
                        for b in range(d_bp):
                            w_m2[a, b] += delta[a] * delta2[b]
                    if (it + 1) % 100 == 0 and w_count > 10 * d_bp:
                        cov = w_m2 / (w_count - 1)
                        for a in range(d_bp):
                            cov[a, a] += 1e-10
                        cov *= 2.38 ** 2 / d_bp
                        chol = np.linalg.cholesky(cov)
                        if not cov_ready:
                            ls_bp = 0.0
                            cov_ready = True

            # (d) sigma_R, log-scale walk
            dl = math.exp(ls_sig) * np.random.standard_normal()
            sig_new = sigma * math.exp(dl)
            a_prob = 0.0
            if sig_lo <= sig_new <= sig_hi:
                nu_new = 1.0 / (sig_new * sig_new)
                d = garma_sum(r, logmu, nu_new) - garma_sum(r, logmu, nu) + dl
                if not math.isfinite(d):
                    bad += 1
                    if bad > DIVERGENCE_LIMIT:
                        return -(B_SIGMA + 1)
                else:
                    bad = 0
                    a_prob = 1.0 if d >= 0 else math.exp(d)
                    if math.log(np.random.random()) < d:
                        sigma = sig_new
                        nu = nu_new
                        if recording:
                            acc[B_SIGMA] += 1
            if recording:
                tries[B_SIGMA] += 1
            if adapting:
                ls_sig = min(max(ls_sig + gain * (a_prob - target), -12.0), 2.0)

            # (d2) beta, phi and sigma_R with R_t carried along: every day keeps its
            # standardised log residual (log R_t - log mu_t) / sigma_R, so a change in
            # the transmission model does not have to fight the fixed R_t path.
            for j in range(p1):
                bp_cur[j] = beta[j]
            for j in range(m):
                bp_cur[p1 + j] = phi[j]
            step = math.exp(ls_nc)
            z = np.empty(d_bp)
            for j in range(d_bp):
                z[j] = np.random.standard_normal()
            bp_new = bp_cur + step * math.exp(ls_bp) * (chol @ z)
            dl = step * math.exp(ls_sig) * np.random.standard_normal()
            sig_new = sigma * math.exp(dl)
            a_prob = 0.0
            if sig_lo <= sig_new <= sig_hi:
                beta_new = bp_new[:p1].copy()
                phi_new = bp_new[p1:].copy()
                eta_new = X @ beta_new
                r_new = np.empty(n)
                logmu_new = np.empty(n)
                log_jac = n * dl
                for u in range(n):
                    logmu_new[u] = logmu_at(r_new, eta_new, phi_new, u)
                    lr = logmu_new[u] + sig_new * (math.log(r[u]) - logmu[u]) / sigma
                    r_new[u] = math.exp(lr)
                    log_jac += lr - math.log(r[u])
                nu_new = 1.0 / (sig_new * sig_new)
                d = (renewal_sum(istar, r_new, lam_t) - renewal_sum(istar, r, lam_t)
                     + garma_sum(r_new, logmu_new, nu_new) - garma_sum(r, logmu, nu)
                     + log_jac + dl)
                for j in range(p1):
                    d += -0.5 * (beta_new[j] ** 2 - beta[j] ** 2) / beta_sd ** 2
                for j in range(m):
                    d += -0.5 * (phi_new[j] ** 2 - phi[j] ** 2) / phi_sd ** 2
                if not math.isfinite(d):
                    bad += 1
                    if bad > DIVERGENCE_LIMIT:
                        return -(B_GARMA_NC + 1)
                else:
                    bad = 0
                    a_prob = 1.0 if d >= 0 else math.exp(d)
                    if math.log(np.random.random()) < d:
                        beta[:] = beta_new
                        phi[:] = phi_new
                        eta[:] = eta_new
                        sigma = sig_new
                        nu = nu_new
                        r[:] = r_new
                        logmu[:] = logmu_new
                        if recording:
                            acc[B_GARMA_NC] += 1
            if recording:
                tries[B_GARMA_NC] += 1
            if adapting:
                ls_nc = min(max(ls_nc + gain * (a_prob - target_joint), -12.0), 3.0)

        # (e) reporting weights on the mean-one simplex
        if has_me and k_rep > 1:
            cur = theta / k_rep
            scale = math.exp(ls_th)
            kappa = 1.0 / (scale * scale)
            prop, log_q = _dirichlet_step(cur, kappa)
            a_prob = 0.0
            if math.isfinite(log_q):
                d = -log_q
                for t in range(n):
                    c = tau[t]
                    d += pois_lpmf(obs[t], k_rep * prop[c] * istar[t]) - pois_lpmf(obs[t], theta[c] * istar[t])
                for j in range(k_rep):
                    d += (theta_alpha[j] - 1.0) * (math.log(prop[j]) - math.log(cur[j]))
                if not math.isfinite(d):
                    bad += 1
                    if bad > DIVERGENCE_LIMIT:
                        return -(B_THETA + 1)
                else:
                    bad = 0
                    a_prob = 1.0 if d >= 0 else math.exp(d)
                    if math.log(np.random.random()) < d:
                        theta[:] = k_rep * prop
                        if recording:
                            acc[B_THETA] += 1
            if recording:
                tries[B_THETA] += 1
            if adapting:
                ls_th = min(max(ls_th + gain * (a_prob - target), -9.0), 0.0)

        # (e2) reporting weights jointly with the latent cases and R_t they imply:
        # I* is thinned (binomially) or expanded (Poisson) by theta / theta', and
        # R_t is rescaled so that R_t * Lambda_t follows the new latent cases.
        if has_me and k_rep > 1:
            cur = theta / k_rep
            scale = math.exp(ls_tj)
            prop, log_q = _dirichlet_step(cur, 1.0 / (scale * scale))
            a_prob = 0.0
            if math.isfinite(log_q):
                theta_new = k_rep * prop
                ist_new = np.empty(n)
                lq_f = 0.0
                lq_r = 0.0
                for t in range(n):
                    c = theta[tau[t]] / theta_new[tau[t]]
                    k_old = istar[t]
                    if c <= 1.0:
                        k_new = float(np.random.binomial(np.int64(k_old), c))
                        lq_f += binom_lpmf(k_new, k_old, c)
                        lq_r += exact_pois_lpmf(k_old - k_new, k_new * (1.0 / c - 1.0))
                    else:
                        k_new = k_old + float(np.random.poisson(k_old * (c - 1.0)))
                        lq_f += exact_pois_lpmf(k_new - k_old, k_old * (c - 1.0))
                        lq_r += binom_lpmf(k_old, k_new, 1.0 / c)
                    ist_new[t] = k_new
                if math.isfinite(lq_r):
                    lam_t_new = np.empty(n)
                    for u in range(n):
                        lam_t_new[u] = pressure_at(ist_new, w, u)
                    r_new = r.copy()
                    log_jac = 0.0
                    for t in range(1, n):
                        if lam_t[t] > 0.0 and lam_t_new[t] > 0.0:
                            g = (theta[tau[t]] / theta_new[tau[t]]) * lam_t[t] / lam_t_new[t]
                            r_new[t] = r[t] * g
                            log_jac += math.log(g)
                    logmu_new = np.empty(n)
                    for u in range(n):
                        logmu_new[u] = logmu_at(r_new, eta, phi, u)
                    d = (joint_target(obs, tau, theta_new, has_me, ist_new, r_new, lam_t_new, logmu_new,
                                      nu, rt_mode, g_shape, g_scale)
                         - joint_target(obs, tau, theta, has_me, istar, r, lam_t, logmu,
                                        nu, rt_mode, g_shape, g_scale)
                         + log_jac + lq_r - lq_f - log_q)
                    for j in range(k_rep):
                        d += (theta_alpha[j] - 1.0) * (math.log(prop[j]) - math.log(cur[j]))
                    if not math.isfinite(d):
                        bad += 1
                        if bad > DIVERGENCE_LIMIT:
                            return -(B_THETA_JOINT + 1)
                    else:
                        bad = 0
                        a_prob = 1.0 if d >= 0 else math.exp(d)
                        if math.log(np.random.random()) < d:
                            theta[:] = theta_new
                            istar[:] = ist_new
                            r[:] = r_new
                            lam_t[:] = lam_t_new
                            logmu[:] = logmu_new
                            if recording:
                                acc[B_THETA_JOINT] += 1
            if recording:
                tries[B_THETA_JOINT] += 1
            if adapting:
                ls_tj = min(max(ls_tj + gain * (a_prob - target), -9.0), 0.0)

        # (f) serial-interval mixture weights
        if n_comp > 1:
            scale = math.exp(ls_lam)
            kappa = 1.0 / (scale * scale)
            prop, log_q = _dirichlet_step(lam, kappa)
            a_prob = 0.0
            if math.isfinite(log_q):
                w_new = np.zeros(s_max)
                for k in range(n_comp):
                    for s in range(s_max):
                        w_new[s] += prop[k] * comps[k, s]
                lam_t_new = np.empty(n)
                for u in range(n):
                    lam_t_new[u] = pressure_at(istar, w_new, u)
                d = -log_q + renewal_sum(istar, r, lam_t_new) - renewal_sum(istar, r, lam_t)
                for k in range(n_comp):
                    d += (lam_alpha[k] - 1.0) * (math.log(prop[k]) - math.log(lam[k]))
                if not math.isfinite(d):
                    bad += 1
                    if bad > DIVERGENCE_LIMIT:
                        return -(B_LAMBDA + 1)
                else:
                    bad = 0
                    a_prob = 1.0 if d >= 0 else math.exp(d)
                    if math.log(np.random.random()) < d:
                        lam[:] = prop
                        w[:] = w_new
                        lam_t[:] = lam_t_new
                        if recording:
                            acc[B_LAMBDA] += 1
            if recording:
                tries[B_LAMBDA] += 1
            if adapting:
                ls_lam = min(max(ls_lam + gain * (a_prob - target), -9.0), 0.0)

            # (f2) mixture weights with R_t rescaled to hold R_t * Lambda_t fixed
            scale = math.exp(ls_lj)
            prop, log_q = _dirichlet_step(lam, 1.0 / (scale * scale))
            a_prob = 0.0
            if math.isfinite(log_q):
                w_new = np.zeros(s_max)
                for k in range(n_comp):
                    for s in range(s_max):
                        w_new[s] += prop[k] * comps[k, s]
                lam_t_new = np.empty(n)
                for u in range(n):
                    lam_t_new[u] = pressure_at(istar, w_new, u)
                r_new = r.copy()
                log_jac = 0.0
                for t in range(1, n):
                    if lam_t[t] > 0.0 and lam_t_new[t] > 0.0:
                        g = lam_t[t] / lam_t_new[t]
                        r_new[t] = r[t] * g
                        log_jac += math.log(g)
                logmu_new = np.empty(n)
                for u in range(n):
                    logmu_new[u] = logmu_at(r_new, eta, phi, u)
                d = (joint_target(obs, tau, theta, False, istar, r_new, lam_t_new, logmu_new,
                                  nu, rt_mode, g_shape, g_scale)
                     - joint_target(obs, tau, theta, False, istar, r, lam_t, logmu,
                                    nu, rt_mode, g_shape, g_scale)
                     + log_jac - log_q)
                for k in range(n_comp):
                    d += (lam_alpha[k] - 1.0) * (math.log(prop[k]) - math.log(lam[k]))
                if not math.isfinite(d):
                    bad += 1
                    if bad > DIVERGENCE_LIMIT:
                        return -(B_LAMBDA_JOINT + 1)
                else:
                    bad = 0
                    a_prob = 1.0 if d >= 0 else math.exp(d)
                    if math.log(np.random.random()) < d:
                        lam[:] = prop
                        w[:] = w_new
                        lam_t[:] = lam_t_new
                        r[:] = r_new
                        logmu[:] = logmu_new
                        if recording:
                            acc[B_LAMBDA_JOINT] += 1
            if recording:
                tries[B_LAMBDA_JOINT] += 1
            if adapting:
                ls_lj = min(max(ls_lj + gain * (a_prob - target), -9.0), 0.0)

        if recording and (it - burn + 1) % thin == 0 and kept < out_r.shape[0]:
            out_theta[kept, :] = theta
            out_lam[kept, :] = lam
            out_beta[kept, :] = beta
            out_phi[kept, :] = phi
            out_sigma[kept] = sigma
            for t in range(n):
                out_istar[kept, t] = np.int64(istar[t])
                out_r[kept, t] = r[t]
            kept += 1

    final_scales[0] = math.exp(np.mean(ls_i)) if n > 0 else 0.0
    final_scales[1] = math.exp(np.mean(ls_r))
    final_scales[2] = math.exp(ls_bp)
    final_scales[3] = math.exp(ls_sig)
    final_scales[4] = math.exp(ls_th)
    final_scales[5] = math.exp(ls_lam)
    final_scales[6] = math.exp(ls_tj)
    final_scales[7] = math.exp(ls_lj)
    final_scales[8] = math.exp(ls_nc)
    return 0
