"""Concrete metric catalog.

The centerpiece is the five-dimensional family of Sasaki-Einstein metrics in
coordinates (phi, theta, psi, y, alpha),

    g = (1 - c y)/6 (dtheta^2 + sin^2 theta dphi^2)  +  dy^2 / (w q)
        + q/9 (dpsi - cos theta dphi)^2
        + w [dalpha + A (dpsi - cos theta dphi)]^2,

    w(y) = 2 (a - y^2)/(1 - c y),
    q(y) = (a - 3 y^2 + 2 c y^3)/(a - y^2),
    A(y) = (a c - 2 y + y^2 c)/(6 (a - y^2)),

defined on the open box phi in (0, 2 pi), theta in (0, pi), psi in (0, 2 pi),
y in (y1, y2), alpha in (0, 2 pi ell), where y1 < y2 are the two smaller
roots of a - 3 y^2 + 2 y^3 = 0.  For coprime integers 0 < q < p the family
parameters are determined by

    y_{1,2} = (2 p -+ 3 q - n) / (4 p),      n = sqrt(4 p^2 - 3 q^2),
    a       = 3 y1^2 - 2 y1^3,
    ell     = q / (3 q^2 - 2 p^2 + p n),

rational whenever 4 p^2 - 3 q^2 is a perfect square (exact mode, computed in
arbitrary-precision rational arithmetic).  Reference metrics (flat tori,
round spheres, products, a perturbed torus) back the vanishing and
validation tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import jets
from .geometry import CoordBox, MetricField, leading_minors_positive, metric_jets
from .jets import ChartDomainError, jet_constant

__all__ = [
    "YpqParams",
    "solve_ypq",
    "ypq_params_from_a",
    "ypq_metric",
    "flat_torus",
    "round_sphere",
    "product",
    "perturbed_torus",
    "catalog",
    "einstein_residual",
    "EINSTEIN_CONSTANT_DIM5",
]

TWO_PI = 2.0 * math.pi

# Einstein constant of the dim-5 family: Ric = 4 g (dimension minus one).
EINSTEIN_CONSTANT_DIM5 = 4.0


@dataclass(frozen=True)
class YpqParams:
    """Parameters of one member of the Sasaki-Einstein family.

    ``exact_mode`` is set when 4 p^2 - 3 q^2 is a perfect square n^2; then
    the rational values of a, ell, y1, y2 are kept alongside their float
    mirrors.  ``c`` is fixed to 1 except in degeneration experiments.
    """

    p: int | None
    q: int | None
    n: int | None
    a: float
    ell: float
    y1: float
    y2: float
    c: float = 1.0
    exact_mode: bool = False
    a_exact: Fraction | None = None
    ell_exact: Fraction | None = None
    y1_exact: Fraction | None = None
    y2_exact: Fraction | None = None

    def cubic_residual(self, y) -> float:
        """a - 3 y^2 + 2 c y^3 at y (zero at y1, y2 by construction)."""
        return self.a - 3.0 * y * y + 2.0 * self.c * y**3


def _check_root_order(a: float, y1: float, y2: float, c: float) -> None:
    if not y1 < y2:
        raise ValueError(f"cubic roots out of order: y1={y1}, y2={y2}")
    y3 = 1.5 / c - y1 - y2  # root sum of 2c y^3 - 3 y^2 + a is 3/(2c)
    if not y2 < y3:
        raise ValueError("y1, y2 are not the two smaller cubic roots")
    if not (y1 < 0.0 < y2):
        raise ValueError(f"expected y1 < 0 < y2, got ({y1}, {y2}) for a={a}")


def solve_ypq(p: int, q: int) -> YpqParams:
    """Resolve integers (p, q) into metric parameters.

    Requires 0 < q < p with gcd(p, q) = 1.  Exact mode uses Fractions
    throughout; otherwise the same closed forms are evaluated with a real
    square root.  The cubic-root identities are re-verified numerically.
    """
    p, q = int(p), int(q)
    if not (0 < q < p):
        raise ValueError(f"need 0 < q < p, got (p, q) = ({p}, {q})")
    if math.gcd(p, q) != 1:
        raise ValueError(f"(p, q) = ({p}, {q}) are not coprime")
    disc = 4 * p * p - 3 * q * q
    n = math.isqrt(disc)
    exact = n * n == disc

    if exact:
        y1_e = Fraction(2 * p - 3 * q - n, 4 * p)
        y2_e = Fraction(2 * p + 3 * q - n, 4 * p)
        a_e = 3 * y1_e**2 - 2 * y1_e**3
        ell_e = Fraction(q, 3 * q * q - 2 * p * p + p * n)
        if 3 * y2_e**2 - 2 * y2_e**3 != a_e:
            raise ValueError("rational cubic-root consistency failed")
        params = YpqParams(p=p, q=q, n=n, a=float(a_e), ell=float(ell_e),
                           y1=float(y1_e), y2=float(y2_e), exact_mode=True,
                           a_exact=a_e, ell_exact=ell_e,
                           y1_exact=y1_e, y2_exact=y2_e)
    else:
        rt = math.sqrt(disc)
        y1 = (2 * p - 3 * q - rt) / (4 * p)
        y2 = (2 * p + 3 * q - rt) / (4 * p)
        a = 3 * y1 * y1 - 2 * y1**3
        ell = q / (3 * q * q - 2 * p * p + p * rt)
        params = YpqParams(p=p, q=q, n=None, a=a, ell=ell, y1=y1, y2=y2)

    if not 0.0 < params.a <= 1.0:
        raise ValueError(f"parameter a={params.a} outside (0, 1]")
    for y in (params.y1, params.y2):
        if abs(params.cubic_residual(y)) > 1e-12:
            raise ValueError(f"cubic residual at y={y} too large")
    _check_root_order(params.a, params.y1, params.y2, params.c)
    if params.ell <= 0.0:
        raise ValueError("fiber period parameter must be positive")
    return params


def ypq_params_from_a(a: float, ell: float = 1.0, c: float = 1.0) -> YpqParams:
    """Parameters from a direct ``a`` override (degeneration experiments).

    Solves 2 c y^3 - 3 y^2 + a = 0 for its two smaller roots.  ``a`` must lie
    strictly inside (0, 1): at a = 1 the two larger roots collide and the
    y-interval degenerates.
    """
    a = float(a)
    if not 0.0 < a < 1.0:
        raise ChartDomainError(
            f"a={a} is degenerate: need 0 < a < 1 for an open y-interval")
    roots = np.roots([2.0 * c, -3.0, 0.0, a])
    real = np.sort(roots[np.abs(roots.imag) < 1e-9].real)
    if len(real) != 3:
        raise ValueError(f"cubic for a={a} does not have three real roots")
    y1, y2 = float(real[0]), float(real[1])
    _check_root_order(a, y1, y2, c)
    return YpqParams(p=None, q=None, n=None, a=a, ell=float(ell),
                     y1=y1, y2=y2, c=c)


@dataclass(frozen=True)
class _YpqComponents:
    """Metric component builder for the dim-5 Sasaki-Einstein family."""

    a: float
    c: float

    def __call__(self, xs):
        _, theta, _, y, _ = xs
        a, c = self.a, self.c
        sin_t = jets.sin(theta)
        cos_t = jets.cos(theta)
        one_minus_cy = 1.0 - c * y
        a_minus_y2 = a - y * y
        w = 2.0 * a_minus_y2 * jets.recip(one_minus_cy)
        qf = (a - 3.0 * y * y + 2.0 * c * y * y * y) * jets.recip(a_minus_y2)
        wq = w * qf
        if np.any(one_minus_cy.value <= 0.0) or np.any(wq.value <= 0.0) \
                or np.any(sin_t.value == 0.0):
            raise ChartDomainError(
                "Sasaki-Einstein chart degenerate at evaluation point "
                "(sin theta = 0, w q <= 0, or 1 - c y <= 0)")
        u = one_minus_cy * (1.0 / 6.0)
        big_a = (a * c - 2.0 * y + y * y * c) * jets.recip(6.0 * a_minus_y2)
        q9 = qf * (1.0 / 9.0)
        w_a = w * big_a
        fiber = q9 + w_a * big_a          # q/9 + w A^2
        g_pp = u * sin_t * sin_t + fiber * cos_t * cos_t
        g_pf = -(fiber * cos_t)           # phi-psi cross term
        g_pa = -(w_a * cos_t)             # phi-alpha cross term
        zero = 0.0
        return [
            [g_pp, zero, g_pf, zero, g_pa],
            [zero, u, zero, zero, zero],
            [g_pf, zero, fiber, zero, w_a],
            [zero, zero, zero, jets.recip(wq), zero],
            [g_pa, zero, w_a, zero, w],
        ]


def ypq_metric(params: YpqParams) -> MetricField:
    """The five-dimensional Sasaki-Einstein metric field for ``params``.

    Coordinates are ordered (phi, theta, psi, y, alpha); the orientation used
    by cycle integrals is the form order (phi, theta, y, psi, alpha).
    """
    box = CoordBox(
        intervals=((0.0, TWO_PI), (0.0, math.pi), (0.0, TWO_PI),
                   (params.y1, params.y2), (0.0, TWO_PI * params.ell)),
        periodic=(True, False, True, False, True),
    )
    label = f"ypq({params.p},{params.q})" if params.p else f"ypq(a={params.a:g})"
    return MetricField(
        dim=5,
        box=box,
        components=_YpqComponents(a=params.a, c=params.c),
        coord_names=("phi", "theta", "psi", "y", "alpha"),
        symmetry_axes=(0, 2, 4),
        form_order=(0, 1, 3, 2, 4),
        name=label,
        params=params,
    )


@dataclass(frozen=True)
class _ConstantDiagonal:
    diag: tuple[float, ...]

    def __call__(self, xs):
        n = len(self.diag)
        return [[self.diag[a] if a == b else 0.0 for b in range(n)] for a in range(n)]


def flat_torus(n: int) -> MetricField:
    """Flat torus: identity metric, every axis periodic with period 2 pi."""
    if n < 1:
        raise ValueError("dimension must be positive")
    box = CoordBox(intervals=((0.0, TWO_PI),) * n, periodic=(True,) * n)
    return MetricField(dim=n, box=box, components=_ConstantDiagonal((1.0,) * n),
                       coord_names=tuple(f"x{i}" for i in range(n)),
                       symmetry_axes=tuple(range(n)), name=f"flat_torus{n}")


@dataclass(frozen=True)
class _SphereComponents:
    """Round sphere in hyperspherical coordinates (theta_1 .. theta_{n-1}, phi)."""

    radius: float

    def __call__(self, xs):
        n = len(xs)
        r2 = self.radius * self.radius
        diag = []
        factor = jet_constant(np.ones_like(xs[0].value), xs[0].nvars) * r2
        for i in range(n):
            diag.append(factor)
            if i < n - 1:
                s = jets.sin(xs[i])
                factor = factor * s * s
        return [[diag[a] if a == b else 0.0 for b in range(n)] for a in range(n)]


def round_sphere(n: int, radius: float = 1.0) -> MetricField:
    """Round n-sphere of the given radius in a dense hyperspherical chart."""
    if n < 2:
        raise ValueError("sphere dimension must be >= 2")
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    intervals = tuple((0.0, math.pi) for _ in range(n - 1)) + ((0.0, TWO_PI),)
    periodic = (False,) * (n - 1) + (True,)
    names = tuple(f"theta{i+1}" for i in range(n - 1)) + ("phi",)
    return MetricField(dim=n, box=CoordBox(intervals, periodic),
                       components=_SphereComponents(radius=radius),
                       coord_names=names, symmetry_axes=(n - 1,),
                       name=f"round_sphere{n}(r={radius:g})")


@dataclass(frozen=True)
class _ProductComponents:
    left: object
    right: object
    split: int

    def __call__(self, xs):
        rows_l = self.left(xs[: self.split])
        rows_r = self.right(xs[self.split:])
        n = len(xs)
        out = [[0.0] * n for _ in range(n)]
        for a in range(self.split):
            for b in range(self.split):
                out[a][b] = rows_l[a][b]
        for a in range(self.split, n):
            for b in range(self.split, n):
                out[a][b] = rows_r[a - self.split][b - self.split]
        return out


def product(m1: MetricField, m2: MetricField) -> MetricField:
    """Block-diagonal product metric on the product of two chart boxes."""
    box = CoordBox(intervals=m1.box.intervals + m2.box.intervals,
                   periodic=m1.box.periodic + m2.box.periodic)
    names = tuple(f"l_{s}" for s in m1.coord_names) + tuple(f"r_{s}" for s in m2.coord_names)
    sym = m1.symmetry_axes + tuple(m1.dim + i for i in m2.symmetry_axes)
    return MetricField(dim=m1.dim + m2.dim, box=box,
                       components=_ProductComponents(m1.components, m2.components, m1.dim),
                       coord_names=names, symmetry_axes=sym,
                       name=f"product({m1.name},{m2.name})")


@dataclass(frozen=True)
class _PerturbedTorusComponents:
    """Diagonal metric 1 + amplitude * trig(next coordinate): smooth, periodic."""

    amplitudes: tuple[float, ...]

    def __call__(self, xs):
        n = len(xs)
        rows = [[0.0] * n for _ in range(n)]
        for i in range(n):
            bump = jets.sin(xs[(i + 1) % n]) if i % 2 == 0 else jets.cos(xs[(i + 1) % n])
            rows[i][i] = 1.0 + self.amplitudes[i] * bump
        return rows


def perturbed_torus(n: int, amplitude: float = 0.35, seed: int = 7) -> MetricField:
    """Curved but periodic diagonal metric on the n-torus (test fixture)."""
    if not 0.0 < amplitude < 1.0:
        raise ValueError("amplitude must be in (0, 1) to keep the metric definite")
    rng = np.random.default_rng(seed)
    amps = tuple(float(a) for a in amplitude * (0.5 + 0.5 * rng.random(n)))
    box = CoordBox(intervals=((0.0, TWO_PI),) * n, periodic=(True,) * n)
    return MetricField(dim=n, box=box, components=_PerturbedTorusComponents(amps),
                       coord_names=tuple(f"x{i}" for i in range(n)),
                       symmetry_axes=(), name=f"perturbed_torus{n}")


def catalog(name: str) -> MetricField:
    """Look up a reference metric by string name, e.g. ``flat_torus3``."""
    table = {
        "flat_torus2": lambda: flat_torus(2),
        "flat_torus3": lambda: flat_torus(3),
        "flat_torus5": lambda: flat_torus(5),
        "round_sphere2": lambda: round_sphere(2),
        "round_sphere3": lambda: round_sphere(3),
        "round_sphere5": lambda: round_sphere(5),
        "perturbed_torus3": lambda: perturbed_torus(3),
        "s2xs3": lambda: product(round_sphere(2), round_sphere(3)),
    }
    try:
        return table[name]()
    except KeyError:
        raise ValueError(f"unknown catalog metric {name!r}; "
                         f"choices: {sorted(table)}") from None


def einstein_residual(metric: MetricField, samples, constant: float) -> float:
    """Max relative residual of Ric = constant * g over the samples."""
    from .geometry import riemann

    pack = riemann(metric, np.asarray(samples, dtype=float))
    num = np.max(np.abs(pack.ricci - constant * pack.g))
    den = max(float(np.max(np.abs(constant * pack.g))), np.finfo(float).tiny)
    return float(num) / den


def positive_definite_on(metric: MetricField, samples) -> bool:
    """Leading-principal-minor positivity of g at every sample point."""
    g, _, _ = metric_jets(metric, np.asarray(samples, dtype=float))
    return leading_minors_positive(g)
