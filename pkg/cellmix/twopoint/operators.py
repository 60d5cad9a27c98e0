"""First-order differential operators of the tilted two-point equation.

Fields live on the 6D lattice with axes (x1, x2, x3, x4, y1, y2) in tilted
coordinates.  The transport operator is A = u . grad_x with

    u = (c4 s2, c3 s1, s4 c2, s3 c1)

where s1 = sin(x1 + y2), s2 = sin(x2 + y1), s3 = sin x3, s4 = sin x4 and the
c's are the matching cosines.  Every operator here is a vector of scalar
first-order operators sum_k a_k d_k; each scalar operator is a dict mapping
axis -> coefficient array that broadcasts against the lattice.  Coefficient
arrays are smooth trig products, so commutators are formed exactly from
spectral derivatives of the coefficients.
"""

from functools import lru_cache

import numpy as np
from scipy import fft

from cellmix.spectral.fields import (
    TWO_PI,
    check_grid6,
    dealias_mask6,
    inverse6,
    transform6,
    wavenumbers6,
)


X_AXES = (0, 1, 2, 3)
Y_AXES = (4, 5)

ONE = np.ones((1,) * 6)


def axis_grid(n, axis):
    """Lattice coordinates along one axis, shaped to broadcast in 6D."""
    shape = [1] * 6
    shape[axis] = n
    return (TWO_PI * np.arange(n) / n).reshape(shape)


def derivative(values, axis, order=1):
    """Spectral derivative of a (possibly broadcast) array along one axis.

    Axes of length one are constant, so the derivative there is zero.  Odd
    derivatives drop the Nyquist mode.
    """

    values = np.asarray(values, dtype=np.float64)
    n = values.shape[axis]
    if n == 1:
        return np.zeros_like(values)

    k = fft.rfftfreq(n, 1.0 / n)
    multiplier = (1j * k) ** order
    if order % 2 and n % 2 == 0:
        multiplier[-1] = 0
    shape = [1] * values.ndim
    shape[axis] = len(k)
    coeffs = fft.rfft(values, axis=axis) * multiplier.reshape(shape)
    return fft.irfft(coeffs, n=n, axis=axis)


class TrigTables(object):
    """Single-harmonic factors on the n^6 lattice.

    Attributes
    ----------
    s1, c1 : sin, cos of x1 + y2
    s2, c2 : sin, cos of x2 + y1
    s3, c3 : sin, cos of x3
    s4, c4 : sin, cos of x4
    weight : sqrt(s3^2 + s4^2), the distance-to-degeneracy weight
    """

    def __init__(self, n):
        check_grid6(n)
        x1, x2, x3, x4, y1, y2 = (axis_grid(n, axis) for axis in range(6))
        self.n = n
        self.s1, self.c1 = np.sin(x1 + y2), np.cos(x1 + y2)
        self.s2, self.c2 = np.sin(x2 + y1), np.cos(x2 + y1)
        self.s3, self.c3 = np.sin(x3), np.cos(x3)
        self.s4, self.c4 = np.sin(x4), np.cos(x4)
        self.weight = np.sqrt(self.s3 ** 2 + self.s4 ** 2)

    def __repr__(self):
        return "TrigTables(n={})".format(self.n)


@lru_cache(maxsize=4)
def trig_tables(n):
    return TrigTables(n)


class DerivativeCache(object):
    """Memoized mixed partial derivatives of one lattice field."""

    def __init__(self, values):
        self.values = np.asarray(values, dtype=np.float64)
        self.shape = self.values.shape
        self._coeffs = fft.rfftn(self.values)
        self._ik = []
        for axis, k in enumerate(wavenumbers6(self.shape[0])):
            n = self.shape[axis]
            self._ik.append(np.where(np.abs(k) < n / 2, 1j * k, 0))
        self._cache = {(): self.values}

    def d(self, *axes):
        """d_{a1} d_{a2} ... f as grid values (Nyquist dropped per factor)."""
        key = tuple(sorted(axes))
        if key not in self._cache:
            multiplier = 1
            for axis in key:
                multiplier = multiplier * self._ik[axis]
            self._cache[key] = fft.irfftn(self._coeffs * multiplier, s=self.shape)
        return self._cache[key]


def _cache(f):
    return f if isinstance(f, DerivativeCache) else DerivativeCache(f)


class FirstOrderOperator(object):
    """Vector of scalar first-order operators sum_k a_k d_k.

    Parameters
    ----------
    components : list of dict
        axis -> coefficient array (broadcastable to the lattice)
    name : str, optional
    """

    def __init__(self, components, name=None):
        self.components = [
            {axis: np.asarray(coeff, dtype=np.float64) for axis, coeff in comp.items()}
            for comp in components
        ]
        self.name = name

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return FirstOrderOperator([self.components[i]], name=self.name)

    def apply(self, f, base=()):
        """Apply to f, or to the derivative d_base f when base is given.

        Parameters
        ----------
        f : ndarray or DerivativeCache
        base : tuple of int, optional
            axes of an extra derivative applied first

        Returns
        -------
        list of ndarray, one per component
        """

        cache = _cache(f)
        out = []
        for comp in self.components:
            total = np.zeros(cache.shape)
            for axis, coeff in comp.items():
                total = total + coeff * cache.d(*base, axis)
            out.append(total)
        return out

    def map_coefficients(self, func, name=None):
        """New operator with func applied to every coefficient array."""
        return FirstOrderOperator(
            [{axis: func(coeff) for axis, coeff in comp.items()} for comp in self.components],
            name=name,
        )

    def __add__(self, other):
        return FirstOrderOperator(
            [_add(a, b) for a, b in zip(self.components, other.components)]
        )

    def __sub__(self, other):
        return self + other.map_coefficients(np.negative)

    def __repr__(self):
        return "FirstOrderOperator({}, components={})".format(self.name, len(self))


def _add(a, b, scale_b=1.0):
    out = dict(a)
    for axis, coeff in b.items():
        out[axis] = out[axis] + scale_b * coeff if axis in out else scale_b * coeff
    return out


def _scale(comp, factor):
    return {axis: factor * coeff for axis, coeff in comp.items()}


def _act(comp, coeff):
    """The scalar operator comp applied to a coefficient array."""
    total = np.zeros((1,) * 6)
    for axis, a in comp.items():
        total = total + a * derivative(coeff, axis)
    return total


def bracket(p, q):
    """[P, Q] of two scalar first-order operators: sum_k (P q_k - Q p_k) d_k."""
    out = {}
    for axis in set(p) | set(q):
        term = np.zeros((1,) * 6)
        if axis in q:
            term = term + _act(p, q[axis])
        if axis in p:
            term = term - _act(q, p[axis])
        out[axis] = term
    return out


def commutator(op, scalar):
    """Componentwise commutator [P_i, Q] with a scalar operator Q."""
    q = scalar.components[0]
    return FirstOrderOperator([bracket(p, q) for p in op.components])


def max_coefficient(op):
    return max(
        (float(np.abs(coeff).max()) for comp in op.components for coeff in comp.values()),
        default=0.0,
    )


def coefficient_residual(op, other):
    """max |a_k - b_k| over all components and axes of two operators."""
    worst = 0.0
    for comp, ref in zip(op.components, other.components):
        for axis in set(comp) | set(ref):
            a = comp.get(axis, 0.0)
            b = ref.get(axis, 0.0)
            worst = max(worst, float(np.abs(a - b).max()))
    return worst


### the operator family


def advection_operator(t):
    """A = u . grad_x as a single-component operator."""
    return FirstOrderOperator(
        [{0: t.c4 * t.s2, 1: t.c3 * t.s1, 2: t.s4 * t.c2, 3: t.s3 * t.c1}], name="A"
    )


def c1_operator(t):
    """First commutator C1 = [grad_y, A]."""
    return FirstOrderOperator(
        [
            {0: t.c4 * t.c2, 2: -t.s4 * t.s2},
            {1: t.c3 * t.c1, 3: -t.s3 * t.s1},
        ],
        name="C1",
    )


def s1_operator(t):
    """Orthogonal complement of C1."""
    return FirstOrderOperator(
        [
            {0: t.c4 * t.s2, 2: t.s4 * t.c2},
            {1: t.c3 * t.s1, 3: t.s3 * t.c1},
        ],
        name="S1",
    )


def c2_operator(t):
    """Second commutator, the principal part of [C1, A]."""
    return FirstOrderOperator(
        [
            {
                0: t.s3 * t.c1 * t.s4 * t.c2,
                2: t.s3 * t.c1 * t.c4 * t.s2,
                1: t.s4 * t.s2 * t.s3 * t.s1,
                3: -t.s4 * t.s2 * t.c3 * t.c1,
            },
            {
                0: t.s3 * t.s1 * t.s4 * t.s2,
                2: -t.s3 * t.s1 * t.c4 * t.c2,
                1: t.s4 * t.c2 * t.s3 * t.c1,
                3: t.s4 * t.c2 * t.c3 * t.s1,
            },
        ],
        name="C2",
    )


def s2_operator(t):
    """Orthogonal complement of C2."""
    return FirstOrderOperator(
        [
            {
                0: t.s3 * t.c1 * t.s4 * t.s2,
                2: -t.s3 * t.c1 * t.c4 * t.c2,
                1: -t.s4 * t.c2 * t.s3 * t.s1,
                3: t.s4 * t.c2 * t.c3 * t.c1,
            },
            {
                0: t.s3 * t.s1 * t.s4 * t.c2,
                2: t.s3 * t.s1 * t.c4 * t.s2,
                1: -t.s4 * t.s2 * t.s3 * t.c1,
                3: -t.s4 * t.s2 * t.c3 * t.s1,
            },
        ],
        name="S2",
    )


def c3_operator(t):
    """Third-order commutator, acting in the unweighted directions d1, d2."""
    return FirstOrderOperator(
        [
            {0: t.c3 * t.c1 * (t.s2 ** 2 - t.c2 ** 2), 1: -2 * t.c4 * t.c1 * t.s1 * t.s2},
            {1: t.c4 * t.c2 * (t.s1 ** 2 - t.c1 ** 2), 0: -2 * t.c3 * t.c2 * t.s1 * t.s2},
        ],
        name="C3",
    )


def m1_operator(t):
    return FirstOrderOperator([{0: t.c4}, {1: t.c3}, {2: t.s4}, {3: t.s3}], name="M1")


def m2_operator(t):
    return FirstOrderOperator([{0: t.s3}, {1: t.s4}, {2: t.s3}, {3: t.s4}], name="M2")


def grad_prime_operator(t=None):
    """The unweighted directions (d1, d2)."""
    return FirstOrderOperator([{0: ONE}, {1: ONE}], name="grad'")


def grad_x_operator(t=None):
    return FirstOrderOperator([{axis: ONE} for axis in X_AXES], name="grad_x")


def grad_y_operator(t=None):
    return FirstOrderOperator([{axis: ONE} for axis in Y_AXES], name="grad_y")


def r2_operator(t):
    """Remainder of [C1, A] - C2, controlled by C1 and S1."""
    c1 = c1_operator(t).components
    s1 = s1_operator(t).components
    return FirstOrderOperator(
        [
            _add(_scale(c1[1], t.c4 * t.c2), _scale(s1[0], t.c3 * t.s1)),
            _add(_scale(c1[0], t.c3 * t.c1), _scale(s1[1], t.c4 * t.s2)),
        ],
        name="R2",
    )


def q2_operator(t):
    """Remainder of [S1, A] - (1, -1)^T (S2)_1, a multiple of C1."""
    c1 = c1_operator(t).components
    return FirstOrderOperator(
        [
            _add(_scale(c1[0], -t.c3 * t.s1), _scale(c1[1], t.c4 * t.s2)),
            _add(_scale(c1[0], t.c3 * t.s1), _scale(c1[1], -t.c4 * t.s2)),
        ],
        name="Q2",
    )


def s2_first_doubled(t):
    """(1, -1)^T (S2)_1 as a two-component operator."""
    first = s2_operator(t).components[0]
    return FirstOrderOperator([first, _scale(first, -1.0)], name="(1,-1)S2_1")


@lru_cache(maxsize=4)
def operator_family(n):
    """All named operators on the n^6 lattice, keyed by name."""
    t = trig_tables(n)
    return {
        "A": advection_operator(t),
        "C1": c1_operator(t),
        "S1": s1_operator(t),
        "C2": c2_operator(t),
        "S2": s2_operator(t),
        "C3": c3_operator(t),
        "M1": m1_operator(t),
        "M2": m2_operator(t),
        "grad'": grad_prime_operator(t),
        "grad_x": grad_x_operator(t),
        "grad_y": grad_y_operator(t),
    }


def _apply(name, f):
    values = f.values if isinstance(f, DerivativeCache) else np.asarray(f)
    return operator_family(values.shape[0])[name].apply(f)


def apply_u_grad(f):
    """u . grad_x f on the lattice, dealiased: modes with |k_i| >= n/3 are removed."""
    values = _apply("A", f)[0]
    n = values.shape[0]
    values = np.broadcast_to(values, (n,) * 6)
    return inverse6(transform6(values) * dealias_mask6(n), n)


def apply_C1(f):
    return _apply("C1", f)


def apply_S1(f):
    return _apply("S1", f)


def apply_C2(f):
    return _apply("C2", f)


def apply_S2(f):
    return _apply("S2", f)


def apply_C3(f):
    return _apply("C3", f)


def apply_M1(f):
    return _apply("M1", f)


def apply_M2(f):
    return _apply("M2", f)


def apply_grad_prime(f):
    return _apply("grad'", f)


def pointwise_norm(components):
    """|v| at every lattice point for a list of component arrays."""
    total = 0.0
    for comp in components:
        total = total + comp ** 2
    return np.sqrt(total)
