"""Exact rational boundary matrices, used to freeze reference values.

Direct summation of the series recurrences in rational arithmetic; shares no
code with the Rust implementation. Run: python3 boundary_exact.py
"""
from fractions import Fraction as Q


def k_nonzero(k, eps, s, seeds, M):
    S = s * (s + 1)
    K = k * k
    a = [Q(0)] * (M + 1); b = [Q(0)] * (M + 1); c = [Q(0)] * (M + 1); d = [Q(0)] * (M + 1)
    a[0], b[0], c[0], d[0] = seeds
    # phi_{j+2} = [(k^2 - S + 2j^2) phi_j + (S - (j-2)(j-1)) phi_{j-2}
    #              - eps (j+1) phi_{j+1} + eps (j-1) phi_{j-1}] / ((j+2)(j+1))
    phi = {}
    psi = {}
    for j in (0, 1):
        phi[j] = a[0] if j == 0 else b[0]
        psi[j] = c[0] if j == 0 else d[0]
    get = lambda t, i: t.get(i, Q(0))
    for j in range(0, 2 * M):
        phi[j + 2] = ((K - S + 2 * j * j) * get(phi, j) + (S - (j - 2) * (j - 1)) * get(phi, j - 2)
                      - eps * (j + 1) * get(phi, j + 1) + eps * (j - 1) * get(phi, j - 1)) / ((j + 2) * (j + 1))
        psi[j + 2] = ((K + 2 * j * j) * get(psi, j) - (j - 2) * (j - 1) * get(psi, j - 2)
                      + get(phi, j) - get(phi, j - 2)) / ((j + 2) * (j + 1))
    c = [psi[2 * m] for m in range(M + 1)]
    d = [psi[2 * m + 1] for m in range(M + 1)]
    return c, d


def functionals(c, d, x0):
    y = x0 * x0
    out = [Q(0)] * 4
    p = Q(1)
    for m in range(len(c)):
        out[0] += c[m] * p
        out[1] += d[m] * p
        out[2] += 2 * m * c[m] * p
        out[3] += (2 * m + 1) * d[m] * p
        p *= y
    return out


def k_zero(eps, s, a0, d0, M):
    S = s * (s + 1)
    phi = {0: a0, 1: -eps * a0 - S * d0}
    psi = {0: Q(0), 1: d0}
    get = lambda t, i: t.get(i, Q(0))
    # (1-x^2) phi'' - 2x phi' + eps phi' + S phi = 0 ; L_0 psi = phi
    for j in range(0, 2 * M):
        phi[j + 2] = ((j * (j + 1) - S) * phi[j] - eps * (j + 1) * phi[j + 1]) / ((j + 2) * (j + 1))
        psi[j + 2] = (j * (j + 1) * psi[j] + phi[j]) / ((j + 2) * (j + 1))
    c = [psi[2 * m] for m in range(M + 1)]
    d = [psi[2 * m + 1] for m in range(M + 1)]
    return c, d


if __name__ == "__main__":
    x0 = Q(9, 10)
    print("A_1(s=3/2), eps=0, x0=0.9, M=150 (row-major)")
    cols = []
    for j in range(4):
        seeds = [Q(0)] * 4
        seeds[j] = Q(1)
        cols.append(functionals(*k_nonzero(1, Q(0), Q(3, 2), seeds, 150), x0))
    for i in range(4):
        print(", ".join(repr(float(cols[j][i])) for j in range(4)))
    print("A_2(s=13/10), eps=3/2, x0=0.9, M=150 (row-major)")
    cols = []
    for j in range(4):
        seeds = [Q(0)] * 4
        seeds[j] = Q(1)
        cols.append(functionals(*k_nonzero(2, Q(3, 2), Q(13, 10), seeds, 150), x0))
    for i in range(4):
        print(", ".join(repr(float(cols[j][i])) for j in range(4)))
    print("A_0(s=9/5), eps=1, x0=0.9, M=100 (row-major)")
    cols = []
    for a0, d0 in ((Q(1), Q(0)), (Q(0), Q(1))):
        f = functionals(*k_zero(Q(1), Q(9, 5), a0, d0, 100), x0)
        cols.append(f[2:])
    for i in range(2):
        print(", ".join(repr(float(cols[j][i])) for j in range(2)))
