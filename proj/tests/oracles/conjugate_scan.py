#!/usr/bin/env python3
"""Reference values for the ball-constrained and p-norm mirror maps.

Ball map: psi(x) = (mu/2)||x||^2 on {||x|| <= R}.  The conjugate reduces to a
1-D problem over the radius, maximized here by dense scanning plus refinement
(no closed form assumed).  p-norm map: psi(x) = (mu/2)||x||_p^2; the conjugate
gradient is checked against central finite differences of the closed-form
conjugate value.
"""
import math


def ball_conjugate_scan(z, mu, radius):
    zn = math.sqrt(sum(v * v for v in z))
    lo, hi = 0.0, radius
    for _ in range(200):
        n = 64
        best_r, best_v = lo, -float("inf")
        for i in range(n + 1):
            r = lo + (hi - lo) * i / n
            v = zn * r - 0.5 * mu * r * r
            if v > best_v:
                best_v, best_r = v, r
        w = (hi - lo) / n
        lo, hi = max(0.0, best_r - w), min(radius, best_r + w)
    return best_v


def pnorm_conjugate_value(z, mu, p):
    q = p / (p - 1.0)
    zq = sum(abs(v) ** q for v in z) ** (1.0 / q)
    return zq * zq / (2.0 * mu)


def pnorm_conjugate_grad_fd(z, mu, p):
    g = []
    hstep = 1e-7
    for i in range(len(z)):
        zh = list(z)
        zl = list(z)
        zh[i] += hstep
        zl[i] -= hstep
        g.append((pnorm_conjugate_value(zh, mu, p)
                  - pnorm_conjugate_value(zl, mu, p)) / (2 * hstep))
    return g


def pnorm_conjugate_grad_closed(z, mu, p):
    q = p / (p - 1.0)
    zq = sum(abs(v) ** q for v in z) ** (1.0 / q)
    if zq == 0.0:
        return [0.0] * len(z)
    return [math.copysign(abs(v) ** (q - 1.0), v) * zq ** (2.0 - q) / mu for v in z]


if __name__ == "__main__":
    cases = [((2.0, 0.0), 1.0, 1.0), ((0.6, 0.8), 1.0, 1.0), ((3.0, -4.0), 1.5, 2.0)]
    for z, mu, radius in cases:
        print(f"ball psi*: z={z} mu={mu} R={radius} ->",
              f"{ball_conjugate_scan(z, mu, radius):.17g}")
    for z, mu, p in [((1.0, -2.0, 0.5), 2.0, 1.5), ((0.3, 1.7), 1.0, 1.25)]:
        closed = pnorm_conjugate_grad_closed(z, mu, p)
        fd = pnorm_conjugate_grad_fd(z, mu, p)
        err = max(abs(a - b) for a, b in zip(closed, fd))
        print(f"pnorm grad: z={z} mu={mu} p={p}")
        print("  closed:", [f"{v:.17g}" for v in closed])
        print(f"  max |closed - fd| = {err:.3e}")
    print("dual norm p=1.5 (q=3) of (1,1):", f"{2.0 ** (1.0 / 3.0):.17g}")
