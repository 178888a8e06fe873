"""Constants sheet: every normalization convention used by the package.

All modules defer to this sheet; cross-oracle tests (spectral gain vs
direct quadrature, Plancherel checks) pin the choices down numerically.

Fourier conventions
-------------------
Position ``x`` lives on the torus ``[0, 2pi)^d`` and carries integer
modes ``n``; velocity ``v`` lives on the uniform grid ``[-V, V)^d`` with
spacing ``dv = 2V / v_points``; the dual variable ``xi`` lives on the
grid with spacing ``dxi = pi / V``.

* x-series:        ``f(x, v) = sum_n fhat(n, v) exp(+i n.x)``
* x-coefficients:  ``fhat(n, v) = (2pi)^-d integral f exp(-i n.x) dx``
                   (discretely: mean over the x-grid with phase).
* v -> xi:         ``ftil(n, xi) = dv^d sum_v fhat(n, v) exp(+i xi.v)``
                   -- a plain Riemann sum with NO 2pi factor, so that
                   ``ftil(n, 0)`` is the discrete v-integral.
* xi -> v:         ``fhat(n, v) = (dxi / 2pi)^d sum_xi ftil(n, xi)
                   exp(-i xi.v)``, the exact discrete inverse.

With these choices ``ftil`` is a trigonometric polynomial in ``xi``,
periodic with period ``2pi/dv`` per axis, and the discrete Plancherel
identity reads ``dxi^d sum_xi |ftil|^2 = (2pi)^d dv^d sum_v |fhat|^2``.
The off-grid evaluator uses the identical sum at arbitrary ``xi``.

Collision constants
-------------------
The loss term is ``SPHERE_AREA(d) * f(v) * integral g(u) du``; the gain
term is the sphere integral of ``ftil(xi_plus) * gtil(xi_minus)`` with
``xi_pm = (xi +- |xi| omega) / 2``.  With the v->xi convention above the
two sides carry no extra constant, and the Maxwellian ``exp(-|v|^2)`` is
an exact equilibrium, which is the test that pins the sheet.

Discrete norms
--------------
* ``l2_n L2_v``:  ``(sum_n dv^d sum_v |fhat|^2)^(1/2)`` -- plain sum over
  modes, Riemann sum over v (no x-measure factor).
* Bracket:        ``<z> = (1 + |z|^2)^(1/2)`` everywhere.
* Time quadrature is trapezoidal on the uniform sample grid; the time
  transform acts on sqrt-trapezoid-weighted samples, so its Parseval
  identity reproduces the trapezoid rule exactly.
* ``log N`` in the counting bound is implemented as ``log(1 + N)``.

VERSION bumps whenever any convention above changes; experiment report
headers record it.
"""

import math

VERSION = "1"


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere in R^d (2pi for d=2, 4pi for d=3)."""
    if d == 2:
        return 2.0 * math.pi
    if d == 3:
        return 4.0 * math.pi
    raise ValueError(f"dimension must be 2 or 3, got {d}")
