"""Independent residue-sum evaluation of the rank-one MB integral with mpmath.

Closing the contour to the right (Im x > 0) picks up the poles of the
Gamma factors with b_j > 0 at s = (k - gamma_j) / b_j, k >= 0.  With the
measure ds and no 1/(2 pi i), the integral equals -2 pi i times the sum of
residues.
"""

import mpmath as mp


def mb_residue_sum(b, gamma, vhat, x, terms=80, dps=30):
    mp.mp.dps = dps
    g = [mp.mpc(complex(v)) for v in gamma]
    vh = [mp.mpc(complex(v)) for v in vhat]
    x = mp.mpc(complex(x))
    phase0 = sum(a * c for a, c in zip(vh, g))
    total = mp.mpc(0)
    for j, bj in enumerate(b):
        if bj <= 0:
            continue
        for k in range(terms):
            s = (k - g[j]) / bj
            res = -((-1) ** k) / (mp.factorial(k) * bj)
            for i, bi in enumerate(b):
                if i != j:
                    res *= mp.gamma(-g[i] - bi * s)
            total += res * mp.exp(2j * mp.pi * (phase0 + x * s))
    return complex(-2j * mp.pi * total)
