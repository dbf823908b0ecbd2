"""Independent reference computations used by the tests.

None of these share code with the package.
"""
import cmath
import math

import numpy as np

# one "PASS"/"FAIL" line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LOG: list[str] = []


def cofactor_det(m):
    m = [list(row) for row in m]
    n = len(m)
    if n == 1:
        return m[0][0]
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * m[0][j] * cofactor_det(minor)
    return total


def match_multisets(a, b):
    """Greedy nearest-neighbour matching; returns the largest matched distance."""
    a = list(np.asarray(a).ravel())
    b = list(np.asarray(b).ravel())
    assert len(a) == len(b)
    worst = 0.0
    for x in a:
        k = min(range(len(b)), key=lambda i: abs(b[i] - x))
        worst = max(worst, abs(b[k] - x))
        b.pop(k)
    return worst


def aberth_roots(coeffs, iters=500, tol=1e-15):
    """Roots of sum_k coeffs[k] z**k by the Aberth-Ehrlich iteration."""
    c = [complex(v) for v in coeffs]
    n = len(c) - 1
    lead = c[-1]
    c = [v / lead for v in c]

    def p_and_dp(z):
        p, dp = 0j, 0j
        for v in reversed(c):
            dp = dp * z + p
            p = p * z + v
        return p, dp

    radius = 1 + max(abs(v) for v in c[:-1])
    z = [0.5 * radius * cmath.exp(2j * math.pi * (k + 0.25) / n) for k in range(n)]
    for _ in range(iters):
        biggest = 0.0
        for i in range(n):
            p, dp = p_and_dp(z[i])
            if p == 0:
                continue
            ratio = p / dp
            repulse = sum(1 / (z[i] - z[j]) for j in range(n) if j != i)
            step = ratio / (1 - ratio * repulse)
            z[i] -= step
            biggest = max(biggest, abs(step) / max(1.0, abs(z[i])))
        if biggest < tol:
            break
    return np.array(z)


def random_unitary(rng, n):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def scalar_poly_from_roots(roots, lead):
    """Coefficients (ascending) of lead * prod (z - root)."""
    c = np.array([complex(lead)])
    for z0 in roots:
        c = np.concatenate([[0], c]) - z0 * np.concatenate([c, [0]])
    return c
