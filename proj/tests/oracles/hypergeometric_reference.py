"""Reference values for the large-population hypergeometric checks.

Run with mpmath at 50 digits; results are frozen into test_exact_hyg.cpp.
"""
from mpmath import mp, binomial, mpf, nsum

mp.dps = 50


def pmf(M, N, n, k):
    return binomial(N, k) * binomial(M - N, n - k) / binomial(M, n)


def sf(M, N, n, m):
    hi = min(n, N)
    return sum(pmf(M, N, n, k) for k in range(m, hi + 1))


cases = [
    ("pmf", 1000000, 300000, 1000, 300),
    ("pmf", 1000000, 500000, 40, 20),
    ("sf", 1000000, 500000, 100, 60),
    ("sf", 1000000, 500000, 100, 75),
    ("sf", 13816, 6908, 28, 20),
    ("sf", 200000, 100000, 500, 260),
]
for kind, M, N, n, k in cases:
    v = pmf(M, N, n, k) if kind == "pmf" else sf(M, N, n, k)
    print(kind, M, N, n, k, mp.nstr(v, 20))
