"""Exact global Fourier coefficients of piecewise-polynomial fields.

For a degree-P field on an axis-aligned box mesh of [-pi, pi]^d, the
global Fourier coefficient at integer wavevector q of one cardinal basis
function through node j of element k factorizes as

    phi_hat[j,k,q] = |det h_k| / pi^d * e^{-i q.a_k}
                     * prod_alpha sum_p c[j_alpha, p] i^{-p} B_p(q_alpha h_alpha)

with c the Legendre coefficients of the cardinal interpolants and B_p the
spherical Bessel column. Summing phi_hat[j,k,q] u[j,k] over nodes and
elements in a fixed order gives u_hat_q with no quadrature error beyond
roundoff.

A TransformPlan caches the per-axis factors; distinct Bessel arguments are
recognized exactly through the rational element geometry, so uniform and
nested meshes share almost all columns.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .bessel import bessel_column
from .gll import GllRule, LegendreCoeffTable
from .mesh import Element, Mesh, NodalField

__all__ = [
    "WaveSet",
    "Spectrum",
    "TransformPlan",
    "build_plan",
    "phi_hat",
    "transform",
    "rms_relative_error",
    "write_spectrum_csv",
    "read_spectrum_csv",
]


@dataclass(frozen=True)
class WaveSet:
    """An ordered set of distinct integer wavevectors in Z^d."""

    d: int
    qs: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for q in self.qs:
            if len(q) != self.d:
                raise ValueError(f"wavevector {q} does not have dimension {self.d}")
            if not all(isinstance(c, int) for c in q):
                raise ValueError(f"wavevector {q} has non-integer components")
        if len(set(self.qs)) != len(self.qs):
            raise ValueError("duplicate wavevectors")

    @classmethod
    def box(cls, d: int, qmax: int) -> "WaveSet":
        """All q with |q_alpha| <= qmax, in lexicographic order."""
        if qmax < 0:
            raise ValueError("qmax must be nonnegative")
        rng = range(-qmax, qmax + 1)
        return cls(d, tuple(product(rng, repeat=d)))

    @classmethod
    def from_list(cls, qs) -> "WaveSet":
        tup = tuple(tuple(int(c) for c in q) for q in qs)
        if not tup:
            raise ValueError("empty wavevector list needs an explicit dimension")
        return cls(len(tup[0]), tup)

    def __len__(self) -> int:
        return len(self.qs)

    def index(self, q) -> int:
        return self.qs.index(tuple(q))


@dataclass(frozen=True)
class Spectrum:
    """Fourier coefficients on a WaveSet, shape (len(waves), C) complex."""

    waves: WaveSet
    values: np.ndarray

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[0] != len(self.waves):
            raise ValueError("value array does not match the wave set")
        self.values.setflags(write=False)

    @property
    def components(self) -> int:
        return self.values.shape[1]

    def get(self, q) -> np.ndarray:
        return self.values[self.waves.index(q)]

    def conjugate_symmetry_error(self) -> float:
        """Max |u_hat(-q) - conj(u_hat(q))| over pairs present in the set."""
        lookup = {q: i for i, q in enumerate(self.waves.qs)}
        worst = 0.0
        for q, i in lookup.items():
            neg = tuple(-c for c in q)
            j = lookup.get(neg)
            if j is not None:
                gap = np.max(np.abs(self.values[j] - np.conj(self.values[i])))
                worst = max(worst, float(gap))
        return worst


def ipow_neg(P: int) -> np.ndarray:
    """Vector of i^{-p} for p = 0..P (exact four-cycle)."""
    cycle = np.array([1.0 + 0.0j, -1.0j, -1.0 + 0.0j, 1.0j])
    return cycle[np.arange(P + 1) % 4]


def _axis_key(element: Element, q_t: int, t: int):
    """(memo key, float argument) for q_t times half-leg of axis t.

    Rational geometry keys on the exact Fraction q h / pi; float geometry
    keys on the float product. The tag keeps the two key spaces apart.
    """
    if element.rational:
        fr = q_t * element.h_pi[t]
        return ("r", fr), float(fr) * math.pi
    r = float(q_t) * float(element.hdiag[t])
    return ("f", r), r


def _svec(table: LegendreCoeffTable, r: float, ip: np.ndarray) -> np.ndarray:
    """Per-axis factor s[j] = sum_p c[j,p] i^{-p} B_p(r), shape (P+1,)."""
    col = bessel_column(r, table.degree)
    return np.einsum("jp,p->j", table.coeffs, ip * col)


def _wave_weight(element: Element, q, d: int) -> complex:
    """|det h| / pi^d * e^{-i q.a} with a fixed accumulation order."""
    dot = 0.0
    for t in range(d):
        dot += q[t] * element.a[t]
    return (element.det_h / math.pi ** d) * cmath.exp(-1j * dot)


def _basis_row(weight: complex, svecs: np.ndarray) -> np.ndarray:
    """weight * tensor product of per-axis factors, flattened storage order.

    Cached and from-scratch paths both come through here: vectorized
    complex products round differently from scalar ones in the last bit,
    so bitwise cache consistency needs one shared kernel.
    """
    e = svecs[0]
    for t in range(1, len(svecs)):
        e = np.multiply.outer(svecs[t], e).ravel()
    return weight * e


class TransformPlan:
    """Cached per-wave, per-element factors of the coefficient formula.

    Attributes:
        mesh, rule, table, waves: the inputs the plan was built for.
        n_bessel_args: number of distinct Bessel arguments evaluated.
    """

    def __init__(self, mesh: Mesh, rule: GllRule, table: LegendreCoeffTable,
                 waves: WaveSet):
        if rule.degree != mesh.P or table.degree != mesh.P:
            raise ValueError("rule/table degree does not match mesh degree")
        if waves.d != mesh.d:
            raise ValueError("wave set dimension does not match mesh")
        self.mesh = mesh
        self.rule = rule
        self.table = table
        self.waves = waves
        nq, K, d, n1 = len(waves), mesh.K, mesh.d, mesh.P + 1
        ip = ipow_neg(mesh.P)
        self._weight = np.empty((nq, K), dtype=complex)
        self._svecs = np.empty((nq, K, d, n1), dtype=complex)
        memo: dict = {}
        for qi, q in enumerate(waves.qs):
            for k, e in enumerate(mesh.elements):
                self._weight[qi, k] = _wave_weight(e, q, d)
                for t in range(d):
                    key, r = _axis_key(e, q[t], t)
                    s = memo.get(key)
                    if s is None:
                        s = _svec(table, r, ip)
                        memo[key] = s
                    self._svecs[qi, k, t] = s
        self.n_bessel_args = len(memo)
        self._weight.setflags(write=False)
        self._svecs.setflags(write=False)

    def basis_row(self, qi: int, k: int) -> np.ndarray:
        """phi_hat of every node of element k at wave qi, storage order."""
        return _basis_row(self._weight[qi, k], self._svecs[qi, k])

    def basis_coefficient(self, qi: int, k: int, j_flat: int) -> complex:
        return complex(self.basis_row(qi, k)[j_flat])


def build_plan(mesh: Mesh, rule: GllRule, table: LegendreCoeffTable,
               waves: WaveSet) -> TransformPlan:
    """Precompute all per-axis factors for transforming fields on ``mesh``."""
    return TransformPlan(mesh, rule, table, waves)


def phi_hat(rule: GllRule, table: LegendreCoeffTable, element: Element,
            j, q) -> complex:
    """Fourier coefficient at q of the cardinal basis through node j.

    Args:
        rule, table: basis of the element's degree.
        element: the element carrying the basis function.
        j: node multi-index (j_1, .., j_d), or an int in 1D.
        q: integer wavevector of matching dimension.

    Recomputes every factor from scratch but combines them through the
    same kernel as the cached plan, so values agree bitwise with
    ``TransformPlan.basis_row``.
    """
    d = element.d
    j_tup = (j,) if np.isscalar(j) else tuple(j)
    q_tup = (q,) if np.isscalar(q) else tuple(q)
    if len(j_tup) != d or len(q_tup) != d:
        raise ValueError("index/wavevector dimension mismatch")
    if not all(0 <= jt <= table.degree for jt in j_tup):
        raise IndexError("node index out of range")
    ip = ipow_neg(table.degree)
    svecs = np.empty((d, table.degree + 1), dtype=complex)
    for t in range(d):
        _, r = _axis_key(element, q_tup[t], t)
        svecs[t] = _svec(table, r, ip)
    row = _basis_row(_wave_weight(element, q_tup, d), svecs)
    j_flat = 0
    for t in range(d - 1, -1, -1):
        j_flat = j_flat * (table.degree + 1) + j_tup[t]
    return complex(row[j_flat])


def transform(field: NodalField, plan: TransformPlan,
              compensated: bool = False) -> Spectrum:
    """Global Fourier coefficients of a nodal field.

    Accumulation runs element-by-element in index order and node-by-node
    in storage order, so results are reproducible to the bit. With
    ``compensated=True`` every product enters an exactly rounded sum
    instead (order-insensitive, for cross-checking the plain path).

    Returns:
        Spectrum over ``plan.waves`` with the field's component count.
    """
    if field.mesh is not plan.mesh and field.mesh != plan.mesh:
        raise ValueError("field and plan use different meshes")
    nq, K, C = len(plan.waves), plan.mesh.K, field.components
    out = np.empty((nq, C), dtype=complex)
    for qi in range(nq):
        if compensated:
            prods = np.concatenate(
                [plan.basis_row(qi, k)[:, None] * field.values[k] for k in range(K)],
                axis=0,
            )
            out[qi] = [
                complex(math.fsum(prods[:, c].real), math.fsum(prods[:, c].imag))
                for c in range(C)
            ]
        else:
            acc = np.zeros(C, dtype=complex)
            for k in range(K):
                prods = plan.basis_row(qi, k)[:, None] * field.values[k]
                acc = acc + np.cumsum(prods, axis=0)[-1]
            out[qi] = acc
    return Spectrum(plan.waves, out)


def rms_relative_error(spectrum: Spectrum, exact: Spectrum) -> float:
    """||u_hat - exact||_2 / ||exact||_2 over all waves and components."""
    if spectrum.waves != exact.waves:
        raise ValueError("spectra use different wave sets")
    if spectrum.values.shape != exact.values.shape:
        raise ValueError("component count mismatch")
    den = math.sqrt(float(np.sum(np.abs(exact.values) ** 2)))
    if den == 0.0:
        raise ValueError("exact spectrum is identically zero")
    num = math.sqrt(float(np.sum(np.abs(spectrum.values - exact.values) ** 2)))
    return num / den


# ------------------------------------------------------------------ CSV --

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def spectrum_csv_text(spectrum: Spectrum, extra_col=None) -> str:
    """CSV text with columns q1..qd, component, re, im, abs.

    Rows are sorted lexicographically by wavevector then component and
    floats carry 17 significant digits, so equal spectra produce byte-equal
    text. ``extra_col=(name, value)`` appends a constant column.
    """
    d = spectrum.waves.d
    header = [f"q{t + 1}" for t in range(d)] + ["component", "re", "im", "abs"]
    if extra_col is not None:
        header.append(extra_col[0])
    order = sorted(range(len(spectrum.waves)), key=lambda i: spectrum.waves.qs[i])
    lines = [",".join(header)]
    for i in order:
        q = spectrum.waves.qs[i]
        for c in range(spectrum.components):
            v = spectrum.values[i, c]
            row = [str(int(t)) for t in q] + [
                str(c), _fmt(v.real), _fmt(v.imag), _fmt(abs(v)),
            ]
            if extra_col is not None:
                row.append(str(extra_col[1]))
            lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def write_spectrum_csv(spectrum: Spectrum, path, extra_col=None) -> None:
    """Write :func:`spectrum_csv_text` to ``path``."""
    with open(path, "w", newline="\n") as fh:
        fh.write(spectrum_csv_text(spectrum, extra_col))


def read_spectrum_csv(path) -> Spectrum:
    """Read a spectrum CSV produced by ``write_spectrum_csv``."""
    with open(path) as fh:
        rows = [line.strip() for line in fh if line.strip()]
    header = rows[0].split(",")
    d = sum(1 for name in header if name.startswith("q") and name[1:].isdigit())
    ic, ire, iim = header.index("component"), header.index("re"), header.index("im")
    data: dict[tuple, dict[int, complex]] = {}
    for line in rows[1:]:
        parts = line.split(",")
        q = tuple(int(parts[t]) for t in range(d))
        data.setdefault(q, {})[int(parts[ic])] = complex(
            float(parts[ire]), float(parts[iim])
        )
    qs = list(data.keys())
    C = max(max(comp) for comp in data.values()) + 1
    values = np.zeros((len(qs), C), dtype=complex)
    for i, q in enumerate(qs):
        for c, v in data[q].items():
            values[i, c] = v
    return Spectrum(WaveSet(d, tuple(qs)), values)
