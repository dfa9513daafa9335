"""Self-similar boundary coefficient a(lambda) for v0 = lambda x_+.

Two independent routes: the closed form 2 a Q(a) + (lambda - 2) phi(a) = 0,
and shooting on G'' = G - xi G' from G(a) = 0, G'(a) = 2 with DOP853.
"""
import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq
from scipy.stats import norm


def closed_form(lam):
    f = lambda a: 2 * a * norm.sf(a) + (lam - 2) * norm.pdf(a)
    return 0.0 if lam == 2 else brentq(f, -8, 8, xtol=1e-15, rtol=1e-15)


def shoot(lam, xi_max=12.0):
    def slope(a):
        sol = solve_ivp(lambda x, y: [y[1], y[0] - x * y[1]], (a, xi_max), [0.0, 2.0],
                        method="DOP853", rtol=1e-13, atol=1e-13)
        return sol.y[1, -1] - lam
    return 0.0 if lam == 2 else brentq(slope, -6, 6, xtol=1e-15)


if __name__ == "__main__":
    for lam in [0.5, 1, 2, 3, 4]:
        a, b = closed_form(lam), shoot(lam)
        print(f"lambda={lam}: a_closed={a!r} a_shoot={b!r} sigma(0.25)={a * 0.5!r}")
