"""Monte Carlo oracles for the frozen distribution and EI values in the unit tests.

Each quantity is estimated from 10^7 draws with numpy's PCG64 generator and
printed with its standard error. The draws sample the defining random
variables directly (Gaussian surrogate outputs, squared and weighted), not
the library's decomposition.

    python3 tests/oracle/mc_oracles.py
"""

import numpy as np

N = 10_000_000


def wncs_draws(rng, weights, deltas, g_mean=0.0, g_sd=0.0):
    u = np.full(N, g_mean) + (g_sd * rng.standard_normal(N) if g_sd > 0 else 0.0)
    for w, d in zip(weights, deltas):
        z = rng.standard_normal(N) + np.sqrt(d)
        u += w * z * z
    return u


def report(name, samples):
    m = samples.mean()
    se = samples.std(ddof=1) / np.sqrt(N)
    print(f"{name:28s} {m:.10g}  se {se:.3g}")


def main():
    rng = np.random.default_rng(12345)

    u = wncs_draws(rng, [1.0], [0.0])
    report("cdf chi2_1 @ 3.8415", (u <= 3.8415).astype(float))

    u = wncs_draws(rng, [0.5, 2.0], [1.0, 0.25])
    report("cdf mixed @ 4", (u <= 4.0).astype(float))

    u = wncs_draws(rng, [0.3, 0.7], [0.5, 1.5])
    report("ei_known w=5 rho=0.5", np.maximum(5.0 - u, 0.0) / (2 * 0.5))

    u = wncs_draws(rng, [0.4, 0.9], [2.0, 0.3], 1.5, 0.8)
    report("ei_unknown w=4 rho=0.5", np.maximum(4.0 - u, 0.0) / (2 * 0.5))

    # Slack composite with one inequality and one equality and a modeled
    # objective: Y = Y_f + lam'(Y_c + s) + |Y_c + s|^2 / (2 rho).
    f_mean, f_sd = 0.3, 0.4
    c_mean = np.array([-0.2, 0.1])
    c_sd = np.array([0.3, 0.25])
    lam = np.array([0.5, -0.4])
    rho, y_min = 0.5, 0.4
    s = np.array([max(0.0, -lam[0] * rho - c_mean[0]), 0.0])
    yf = f_mean + f_sd * rng.standard_normal(N)
    y = yf.copy()
    for j in range(2):
        yc = c_mean[j] + c_sd[j] * rng.standard_normal(N)
        y += lam[j] * (yc + s[j]) + (yc + s[j]) ** 2 / (2 * rho)
    report("slack_al_ei mixed", np.maximum(y_min - y, 0.0))


if __name__ == "__main__":
    main()
