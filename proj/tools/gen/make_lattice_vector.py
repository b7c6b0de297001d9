#!/usr/bin/env python3
"""Constructs the rank-1 lattice generating vector embedded in qmc_tables.cpp.

Component-by-component (CBC) minimization of the shift-averaged worst-case
error in the weighted Korobov space of smoothness alpha = 2 with product
weights gamma_j = j^{-2}.  For a candidate component z the squared error at
cardinality N grows by

    inc_N(z) = (1 / N) * sum_k p_N(k) * 2 pi^2 B2({k z / N})

where B2(t) = t^2 - t + 1/6 and p_N carries the product over the components
chosen so far.  Candidates are ranked by the worst normalized increment over
the dyadic range N = 2^7 .. 2^13 so one vector serves every cardinality used
by the estimators (an embedded-range construction).  Components are odd,
restricted to [1, N/2) (z and N - z generate mirrored point sets), and
duplicates are excluded.

Run time is a couple of minutes; the output is pasted into qmc_tables.cpp.
    python3 tools/gen/make_lattice_vector.py
"""

import numpy as np

S_MAX = 64
N_EXPS = range(7, 14)  # N = 2^7 .. 2^13
TWO_PI2 = 2.0 * np.pi ** 2


def b2_frac(t):
    return t * t - t + 1.0 / 6.0


def main() -> None:
    ns = [1 << e for e in N_EXPS]
    nmax = ns[-1]
    cand = np.arange(1, nmax // 2, 2, dtype=np.int64)
    prods = {n: np.ones(n) for n in ns}

    z = [1]
    for n in ns:  # fold in the fixed first component z_1 = 1
        k = np.arange(n)
        prods[n] *= 1.0 + 1.0 * TWO_PI2 * b2_frac(k / n)

    for s in range(2, S_MAX + 1):
        gamma = 1.0 / s ** 2
        live = np.array([c for c in cand if c not in set(z)])
        score = np.zeros(len(live))
        for n in ns:
            k = np.arange(n, dtype=np.int64)
            frac = ((live[:, None] * k[None, :]) % n) / n
            inc = b2_frac(frac) @ prods[n] / n  # one value per candidate
            inc -= inc.min()
            span = inc.max()
            if span > 0:
                inc /= span
            score = np.maximum(score, inc)
        zbest = int(live[int(np.argmin(score))])
        z.append(zbest)
        for n in ns:
            k = np.arange(n)
            prods[n] *= 1.0 + gamma * TWO_PI2 * b2_frac(((zbest * k) % n) / n)

    print("const std::uint32_t kLatticeZ[%d] = {" % len(z))
    for start in range(0, len(z), 10):
        print("    " + ", ".join(str(v) for v in z[start:start + 10]) + ",")
    print("};")


if __name__ == "__main__":
    main()
