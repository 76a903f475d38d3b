"""High-precision reference values for the RDP accountant tests.

Evaluates the subsampled Gaussian RDP bound and its conversion to (eps, delta)
with mpmath at 300 significant digits. Output is pasted into
tests/accountant_test.cc.
"""

from mpmath import binomial, exp, log, mp, mpf, sqrt

mp.dps = 300


def b_table(max_l, sigma):
    s = mpf(sigma)
    return [
        sum((-1) ** i * binomial(l, i) * exp(mpf((i - 1) * i) / (2 * s * s))
            for i in range(l + 1))
        for l in range(max_l + 1)
    ]


def rdp_step(alpha, q, sigma, b):
    q = mpf(q)
    s = mpf(sigma)
    t = 1 + q ** 2 * binomial(alpha, 2) * min(4 * (exp(1 / s ** 2) - 1),
                                               2 * exp(1 / s ** 2))
    for j in range(3, alpha + 1):
        t += 4 * q ** j * binomial(alpha, j) * sqrt(
            b[2 * ((j + 1) // 2)] * b[2 * (j // 2)])
    return log(t) / (alpha - 1)


def best_epsilon(q, sigma, steps, delta, max_alpha=64):
    b = b_table(max_alpha + 1, sigma)
    best = None
    for a in range(2, max_alpha + 1):
        e = steps * rdp_step(a, q, sigma, b) + log(1 / mpf(delta)) / (a - 1)
        if best is None or e < best[0]:
            best = (e, a)
    return best


def smallest_delta(eps, q, sigma, steps, max_alpha=64):
    b = b_table(max_alpha + 1, sigma)
    best = None
    for a in range(2, max_alpha + 1):
        d = exp(-(a - 1) * (mpf(eps) - steps * rdp_step(a, q, sigma, b)))
        if best is None or d < best[0]:
            best = (d, a)
    return best


GRID = [(q, s, t) for q, s in [
    (0.001, 0.8), (0.001, 2.0), (0.01, 0.7), (0.01, 0.9), (0.01, 1.5),
    (0.01, 3.0), (0.01, 8.0), (0.05, 1.0), (0.05, 2.0), (0.05, 4.0),
] for t in (100, 2000)]

if __name__ == "__main__":
    print("// q, sigma, steps, epsilon at delta=1e-5, alpha")
    for q, s, t in GRID:
        e, a = best_epsilon(mpf(q), s, t, mpf(10) ** -5)
        print("{%s, %s, %d, %s, %d}," % (q, s, t, mp.nstr(e, 17), a))
    print("// B(l, sigma)")
    for s in (0.5, 0.9, 3.0):
        b = b_table(8, s)
        print(s, [mp.nstr(x, 20) for x in b])
    print("// single step rdp")
    for a, q, s in [(2, 0.01, 0.9), (6, 0.01, 0.9), (32, 0.05, 2.0),
                    (64, 0.001, 0.8)]:
        print(a, q, s, mp.nstr(rdp_step(a, mpf(q), s, b_table(65, s)), 20))
    print("// smallest delta")
    for eps, q, s, t in [(4.0, 0.01, 0.9, 1800), (1.0, 0.01, 3.0, 1000),
                         (2.0, 0.05, 4.0, 300)]:
        d, a = smallest_delta(eps, mpf(q), s, t)
        print(eps, q, s, t, mp.nstr(d, 17), a)
