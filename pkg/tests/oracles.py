"""Reference computations that share no code with the package.

Each oracle uses a different algorithm from the implementation it checks:
derivative-free minimisation for the tilting problem, brute-force
enumeration for the proposals, and quadrature over a grid for the toy
posterior.
"""
import itertools
import math

import numpy as np
from scipy import integrate, optimize, special


# tilting problem

def tilt_objective(lam, g):
    z = g @ lam
    zmax = z.max()
    return zmax + math.log(np.exp(z - zmax).sum())


def tilt_oracle(g):
    """Grid search over a box followed by Nelder-Mead on log sum exp(lam'g)."""
    g = np.atleast_2d(np.asarray(g, dtype=float))
    d = g.shape[1]
    axis = np.linspace(-6, 6, 25)
    best = min(itertools.product(axis, repeat=d), key=lambda p: tilt_objective(np.array(p), g))
    res = optimize.minimize(tilt_objective, np.array(best), args=(g,), method="Nelder-Mead",
                            options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 20000, "maxfev": 40000})
    # Nelder-Mead alone stalls near 1e-8; polish with BFGS on the same objective
    res = optimize.minimize(tilt_objective, res.x, args=(g,), jac=tilt_gradient, method="BFGS",
                            options={"gtol": 1e-14, "maxiter": 2000})
    lam = res.x
    w = np.exp(g @ lam - (g @ lam).max())
    return lam, w / w.sum()


def tilt_gradient(lam, g):
    z = g @ lam
    w = np.exp(z - z.max())
    return (w / w.sum()) @ g


def three_point_closed_form():
    """Rows (-1, 0, 2).  Stationarity -exp(-lam) + 2 exp(2 lam) = 0 gives
    exp(3 lam) = 1/2."""
    lam = -math.log(2.0) / 3.0
    e = np.exp(lam * np.array([-1.0, 0.0, 2.0]))
    w = e / e.sum()
    return lam, w, float(np.sum(np.log(3 * w)))


# proposals

def q1_enumerated(n, k_prev, c):
    p = c * k_prev / n
    ks = range(n // 2 + 1, n + 1)
    mass = {k: math.comb(n, k) * p ** k * (1 - p) ** (n - k) for k in ks}
    total = sum(mass.values())
    return {k: m / total for k, m in mass.items()}


def q2_enumerated(s_prev, k_dagger, tau):
    """All indicator vectors with k_dagger ones and their normalised masses."""
    s_prev = tuple(int(b) for b in s_prev)
    n = len(s_prev)
    out = {}
    for ones in itertools.combinations(range(n), k_dagger):
        s = tuple(1 if i in ones else 0 for i in range(n))
        stay = sum(a == b for a, b in zip(s, s_prev))
        out[s] = tau ** stay * (1 - tau) ** (n - stay)
    z = sum(out.values())
    return {s: m / z for s, m in out.items()}, z


# truncated Beta

def truncated_beta_mean_quad(a, b, lower=0.5):
    num = integrate.quad(lambda v: v * v ** (a - 1) * (1 - v) ** (b - 1), lower, 1, epsabs=0, epsrel=1e-13)[0]
    den = integrate.quad(lambda v: v ** (a - 1) * (1 - v) ** (b - 1), lower, 1, epsabs=0, epsrel=1e-13)[0]
    return num / den


def log_v_marginal(K, n, a0, b0, lower=0.5):
    """log of int pi(v) v^K (1-v)^(n-K) dv over (lower, 1] for the truncated Beta prior."""
    upper_mass = lambda a, b: special.betainc(b, a, 1 - lower)
    return (special.betaln(a0 + K, b0 + n - K) + math.log(upper_mass(a0 + K, b0 + n - K))
            - special.betaln(a0, b0) - math.log(upper_mass(a0, b0)))


# toy posterior

def el_log_ratio_1d(x, mu):
    """Log ETEL ratio for the single moment x - mu by 1-d root finding."""
    e = np.asarray(x, dtype=float) - mu
    if not (e.min() < 0 < e.max()):
        return -np.inf
    f = lambda lam: np.sum(e * np.exp(lam * e - (lam * e).max()))
    lo, hi = -1.0, 1.0
    while f(lo) > 0:
        lo *= 2
    while f(hi) < 0:
        hi *= 2
    lam = optimize.brentq(f, lo, hi, xtol=1e-14, rtol=1e-14)
    z = lam * e
    w = np.exp(z - z.max())
    w /= w.sum()
    return float(np.sum(np.log(e.size * w)))


def toy_exact_law(x, edges, prior_mean, prior_var, a0, b0, nodes=24):
    """Exact probabilities of (theta cell, s) for the location model with the
    single moment x - mu, by Gauss-Legendre quadrature inside each cell and a
    closed-form v integral."""
    x = np.asarray(x, dtype=float)
    n = x.size
    gl_t, gl_w = np.polynomial.legendre.leggauss(nodes)
    states = [s for K in range(n // 2 + 1, n + 1) for s in itertools.combinations(range(n), K)]
    table = np.zeros((edges.size - 1, len(states)))
    for j, active in enumerate(states):
        xs = x[list(active)]
        lv = log_v_marginal(len(active), n, a0, b0)
        for c in range(edges.size - 1):
            a, b = edges[c], edges[c + 1]
            pts = 0.5 * (b - a) * gl_t + 0.5 * (a + b)
            vals = np.array([el_log_ratio_1d(xs, t) for t in pts])
            logp = -0.5 * (pts - prior_mean) ** 2 / prior_var
            with np.errstate(under="ignore"):
                table[c, j] = 0.5 * (b - a) * np.sum(gl_w * np.exp(vals + logp + lv))
    return table / table.sum(), states


def location_state_probs(x, prior_mean, prior_var, a0, b0, nodes=400):
    """Exact posterior probabilities of every admissible s for the location
    model with the single moment x - mu.

    The mu integral over each active set's hull uses Gauss-Legendre nodes
    after the substitution mu = lo + (hi - lo) sin^2(u), which clusters
    nodes at the hull ends where the EL ratio vanishes.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    t, w = np.polynomial.legendre.leggauss(nodes)
    u = 0.25 * np.pi * (t + 1)
    states = [s for K in range(n // 2 + 1, n + 1) for s in itertools.combinations(range(n), K)]
    logm = []
    for active in states:
        xs = x[list(active)]
        lo, hi = xs.min(), xs.max()
        mu = lo + (hi - lo) * np.sin(u) ** 2
        jac = (hi - lo) * np.sin(2 * u) * np.pi / 4
        with np.errstate(divide="ignore"):
            vals = np.array([el_log_ratio_1d(xs, m) for m in mu]) - 0.5 * (mu - prior_mean) ** 2 / prior_var
            logm.append(special.logsumexp(vals + np.log(w * jac)) + log_v_marginal(len(active), n, a0, b0))
    logm = np.array(logm)
    return dict(zip(states, np.exp(logm - special.logsumexp(logm))))
