"""Reference values for the noise allocator tests.

analytic delta uses mpmath's erfc at 50 digits. The cosine means use
10^7 numpy draws per case; the printed standard errors bound the reference
uncertainty.
"""

import numpy as np
from mpmath import erfc, exp, mp, mpf, sqrt

mp.dps = 50


def phi(x):
    return erfc(-x / sqrt(2)) / 2


def analytic_delta(h, eps):
    h = mpf(h)
    eps = mpf(eps)
    r = sqrt(h)
    return phi(r / 2 - eps / r) - exp(eps) * phi(-eps / r - r / 2)


if __name__ == "__main__":
    for h, eps in [(1, 1), (0.25, 0.5), (4, 2), (16, 3), (1e-3, 1)]:
        print("analytic", h, eps, mp.nstr(analytic_delta(h, eps), 20))
    rng = np.random.default_rng(20260101)
    f = np.array([10.0, 5.0])
    for s in [(17.0, 8.5), (13.5, 13.5), (12.4, 24.8)]:
        total = []
        for _ in range(10):
            y = f + rng.normal(size=(10 ** 6, 2)) * np.array(s)
            total.append(y @ f / np.linalg.norm(y, axis=1) / np.linalg.norm(f))
        c = np.concatenate(total)
        print("cosine", s, repr(c.mean()), repr(c.std() / np.sqrt(c.size)))
