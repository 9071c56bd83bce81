"""Pseudodifferential symbols of the inverse sub-Dirac operator and its square
at a boundary point of the collar metric (1/h(x_n)) g_dM + dx_n^2, restricted
to the unit tangential cosphere.

Symbols are Clifford-valued rational functions of the conormal variable,
carried together with their first x_n-jet at the boundary point.  Connection
data stays symbolic: antisymmetrized placeholders <nabla_w u, v> that are
eliminated only by the normal-coordinate contract (the divergence sums
vanish at the base point).  Any placeholder surviving to a final value is an
error, so the cancellation is verified, not assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple

from .clifford import Algebra, CliffordElement, Gen, Word, spin_algebra, sub_dirac_algebra
from .symbolic import (
    GR_I,
    GaussianRational,
    RationalXi,
    ScalarPoly,
    _as_poly,
    reduce_unit_norm,
)

H1 = "h1"  # h'(0), the normal metric derivative at the boundary point
TOTAL_DIM_SYMBOL = "ldim2q"  # symbolic trace dimension l~ * 2^q


def h1_poly(power: int = 1) -> ScalarPoly:
    return ScalarPoly.symbol(H1, power)


def conn(w: int, u: int, v: int) -> ScalarPoly:
    """<nabla_{e_w} e_u, e_v> as an antisymmetrized placeholder symbol."""
    if u == v:
        return ScalarPoly.zero()
    if u < v:
        return ScalarPoly.symbol(f"g_{w}_{u}_{v}")
    return -ScalarPoly.symbol(f"g_{w}_{v}_{u}")


def omega(s: int, t: int, w: int) -> ScalarPoly:
    """Frame connection matrix entry omega_{s,t}(e_w) = <nabla_w e_t, e_s>."""
    return conn(w, t, s)


class SymbolExpr:
    """Map canonical Clifford word -> rational function of the conormal variable."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: Algebra, terms=None):
        self.algebra = algebra
        self.terms: dict[Word, RationalXi] = {}
        if terms:
            for w, c in terms.items():
                if not c.is_zero():
                    self.terms[w] = c

    @classmethod
    def scalar(cls, algebra: Algebra, c: RationalXi) -> "SymbolExpr":
        return cls(algebra, {(): c})

    @classmethod
    def from_element(cls, elem: CliffordElement, xi_factor: RationalXi | None = None) -> "SymbolExpr":
        f = xi_factor if xi_factor is not None else RationalXi.const(1)
        return cls(elem.algebra, {w: f * c for w, c in elem.terms.items()})

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w, RationalXi.zero()) + c
            if s.is_zero():
                out.pop(w, None)
            else:
                out[w] = s
        return SymbolExpr(self.algebra, out)

    def __neg__(self):
        return SymbolExpr(self.algebra, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, SymbolExpr):
            out: dict[Word, RationalXi] = {}
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    sign, w = self.algebra.normalize_word(w1 + w2)
                    s = out.get(w, RationalXi.zero()) + c1 * c2 * sign
                    if s.is_zero():
                        out.pop(w, None)
                    else:
                        out[w] = s
            return SymbolExpr(self.algebra, out)
        return self.map_coeffs(lambda c: c * other)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, SymbolExpr) and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def map_coeffs(self, fn: Callable[[RationalXi], RationalXi]) -> "SymbolExpr":
        return SymbolExpr(self.algebra, {w: fn(c) for w, c in self.terms.items()})

    def dxi(self, order: int = 1) -> "SymbolExpr":
        out = self
        for _ in range(order):
            out = out.map_coeffs(lambda c: c.derivative())
        return out

    def pi_plus(self) -> "SymbolExpr":
        return self.map_coeffs(lambda c: c.pi_plus())

    def trace(self, total_dim) -> RationalXi:
        td = _as_poly(total_dim)
        c = self.terms.get((), RationalXi.zero())
        return c * td

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for w, c in sorted(self.terms.items()):
            word = "*".join(self.algebra.gen_name(g) for g in w) or "1"
            bits.append(f"[{word}] {c!r}")
        return "  +  ".join(bits)


class Jet(NamedTuple):
    """Value and first x_n-derivative of a symbol at the boundary point."""

    val: SymbolExpr
    dxn: SymbolExpr | None

    def component(self, j: int) -> SymbolExpr:
        if j == 0:
            return self.val
        if j == 1:
            if self.dxn is None:
                raise ValueError("x_n-jet not available for this symbol")
            return self.dxn
        raise ValueError("only first-order x_n-jets are carried")

    def pi_plus(self) -> "Jet":
        return Jet(self.val.pi_plus(), None if self.dxn is None else self.dxn.pi_plus())

    def dxi(self, order: int = 1) -> "Jet":
        return Jet(self.val.dxi(order), None if self.dxn is None else self.dxn.dxi(order))

    def mul(self, other: "Jet") -> "Jet":
        val = self.val * other.val
        if self.dxn is None or other.dxn is None:
            return Jet(val, None)
        return Jet(val, self.val * other.dxn + self.dxn * other.val)

    def scale(self, c) -> "Jet":
        return Jet(self.val * c, None if self.dxn is None else self.dxn * c)


def trace_product(e1: SymbolExpr, e2: SymbolExpr, total_dim) -> RationalXi:
    """trace(e1 * e2) without building the full product element."""
    td = _as_poly(total_dim)
    alg = e1.algebra
    acc = RationalXi.zero()
    for w1, c1 in e1.terms.items():
        for w2, c2 in e2.terms.items():
            sign, w = alg.normalize_word(w1 + w2)
            if w:
                continue
            acc = acc + c1 * c2 * sign
    return acc * td


# ---------------------------------------------------------------------------
# The boundary model
# ---------------------------------------------------------------------------

@dataclass
class BoundaryModel:
    """Collar-metric data at a boundary point, on the unit cosphere.

    ``tangential`` lists the n-1 tangential generators paired with their
    cosphere coordinate symbols; ``normal`` is the conormal generator.
    ``total_dim`` may be an integer or a formal symbol (ScalarPoly).
    """

    n: int
    algebra: Algebra
    tangential: list[Gen]
    coords: list[str]
    normal: Gen
    total_dim: object  # int | ScalarPoly
    gamma_n: Fraction = Fraction(5, 2)  # Gamma^n(x0) as a multiple of h'(0)
    _subs: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if len(self.tangential) != self.n - 1 or len(self.coords) != self.n - 1:
            raise ValueError("need n-1 tangential generators and coordinates")
        self._subs = self._normal_coordinate_table()

    # -- index helpers -------------------------------------------------------
    def gen_index(self, g: Gen) -> int:
        """Global frame index 0..n-1 (tangential order, then the normal)."""
        if g == self.normal:
            return self.n - 1
        return self.tangential.index(g)

    @property
    def frame(self) -> list[Gen]:
        return self.tangential + [self.normal]

    @property
    def leaf_gens(self) -> list[Gen]:
        return [g for g in self.frame if g[0] == 0]

    @property
    def perp_gens(self) -> list[Gen]:
        """c(h_*) generators, normal included (empty for the spin model)."""
        if len(self.algebra.families) == 1:
            return []
        return [g for g in self.frame if g[0] == 1]

    def hatted(self, g: Gen) -> Gen:
        return (2, g[1])

    def total_dim_poly(self) -> ScalarPoly:
        return _as_poly(self.total_dim)

    # -- normal-coordinate contract -------------------------------------------
    def _normal_coordinate_table(self) -> dict[str, ScalarPoly]:
        """Substitutions enforcing sum_w <nabla_w w, d>(x0) = 0 for all d,
        with <nabla_N N, .> = 0 (the normal coordinate is geodesic)."""
        n = self.n
        table: dict[str, ScalarPoly] = {}
        for d in range(n):
            if d != n - 1:
                # <nabla_N N, d> = 0; canonical symbol has u < v
                u, v = sorted((n - 1, d))
                table[f"g_{n - 1}_{u}_{v}"] = ScalarPoly.zero()
        for d in range(n):
            cands = [w for w in range(n - 1) if w != d]
            if not cands:
                continue
            W = max(cands)
            rest = ScalarPoly.zero()
            for w in cands:
                if w != W:
                    rest = rest + conn(w, w, d)
            # conn(W, W, d) = -rest; express via the canonical symbol
            if W < d:
                table[f"g_{W}_{W}_{d}"] = -rest
            else:
                table[f"g_{W}_{d}_{W}"] = rest
        return table

    def normal_reduce(self, poly: ScalarPoly) -> ScalarPoly:
        return poly.subs_many(self._subs)

    def reduce_coeff(self, poly: ScalarPoly) -> ScalarPoly:
        return reduce_unit_norm(self.normal_reduce(poly), self.coords)

    # -- Clifford-valued building blocks ---------------------------------------
    def gen_elem(self, g: Gen, coeff=1) -> SymbolExpr:
        return SymbolExpr(self.algebra, {(g,): RationalXi.const(1) * _as_poly(coeff)})

    def c_xi_prime(self) -> SymbolExpr:
        out = SymbolExpr(self.algebra)
        for g, name in zip(self.tangential, self.coords):
            out = out + self.gen_elem(g, ScalarPoly.symbol(name))
        return out

    def c_xi_prime_jet(self) -> Jet:
        """c(xi')(x_n): the frame rescaling gives d/dx_n = (h'(0)/2) c(xi')."""
        v = self.c_xi_prime()
        return Jet(v, v * (h1_poly() * Fraction(1, 2)))

    def c_dxn(self) -> SymbolExpr:
        return self.gen_elem(self.normal)

    def c_xi_jet(self) -> Jet:
        prime = self.c_xi_prime_jet()
        nterm = self.c_dxn() * RationalXi.xi()
        return Jet(prime.val + nterm, prime.dxn)

    def inv_norm_sq_jet(self, k: int = 1) -> Jet:
        """|xi|^{-2k} on the cosphere: d/dx_n |xi|^2 (x0) = h'(0)."""
        val = SymbolExpr.scalar(self.algebra, RationalXi.inv_norm_sq(k))
        dxn = SymbolExpr.scalar(
            self.algebra, RationalXi.inv_norm_sq(k + 1) * (-h1_poly() * k))
        return Jet(val, dxn)


def foliation_model(p: int, q: int, total_dim, gamma_n=Fraction(5, 2)) -> BoundaryModel:
    """Sub-Dirac collar model: dx_n = h_q*, tangential f_1..f_p, h_1..h_{q-1}."""
    if q < 1:
        raise ValueError("foliation model needs q >= 1 (dx_n lies in the perp factor)")
    algebra = sub_dirac_algebra(p, q)
    tang = [(0, i) for i in range(p)] + [(1, s) for s in range(q - 1)]
    coords = [f"a{i + 1}" for i in range(p)] + [f"b{u + 1}" for u in range(q - 1)]
    return BoundaryModel(p + q, algebra, tang, coords, (1, q - 1), total_dim, gamma_n)


def spin_model(n: int, total_dim, gamma_n=Fraction(5, 2)) -> BoundaryModel:
    algebra = spin_algebra(n)
    tang = [(0, i) for i in range(n - 1)]
    coords = [f"a{i + 1}" for i in range(n - 1)]
    return BoundaryModel(n, algebra, tang, coords, (0, n - 1), total_dim, gamma_n)


# ---------------------------------------------------------------------------
# Symbol builders
# ---------------------------------------------------------------------------

def sigma1_D(model: BoundaryModel) -> Jet:
    """Leading symbol i*c(xi)."""
    return model.c_xi_jet().scale(GR_I)


def sigma0_DF(model: BoundaryModel) -> SymbolExpr:
    """Zeroth-order symbol of the sub-Dirac operator with symbolic connection data.

    With no perpendicular factor (single-family model) only the first sum
    survives, which is the zeroth symbol of the spin Dirac operator.
    """
    alg = model.algebra
    leaf = model.leaf_gens
    perp = model.perp_gens
    quarter = Fraction(1, 4)
    half = Fraction(1, 2)
    out = SymbolExpr(alg)

    def idx(g):
        return model.gen_index(g)

    # -(1/4) sum_{i,k,l in F} omega_{k,l}(f_i) c(f_i) c(f_k) c(f_l)
    for fi in leaf:
        for fk in leaf:
            for fl in leaf:
                w = omega(idx(fk), idx(fl), idx(fi))
                if w.is_zero():
                    continue
                term = model.gen_elem(fi) * model.gen_elem(fk) * model.gen_elem(fl)
                out = out + term * (w * -quarter)
    # -(1/4) sum_{s,k,l} omega_{k,l}(h_s) c(f_k) c(f_l) c(h_s)
    for hs in perp:
        for fk in leaf:
            for fl in leaf:
                w = omega(idx(fk), idx(fl), idx(hs))
                if w.is_zero():
                    continue
                term = model.gen_elem(fk) * model.gen_elem(fl) * model.gen_elem(hs)
                out = out + term * (w * -quarter)
    # +(1/4) sum omega_{r,t}(f_i) c(f_i)[hc(h_r)hc(h_t) - c(h_r)c(h_t)]
    # +(1/4) sum omega_{r,t}(h_s) c(h_s)[hc(h_r)hc(h_t) - c(h_r)c(h_t)]
    for base in leaf + perp:
        for hr in perp:
            for ht in perp:
                w = omega(idx(hr), idx(ht), idx(base))
                if w.is_zero():
                    continue
                hat = (SymbolExpr(alg, {(model.hatted(hr),): RationalXi.const(1)})
                       * SymbolExpr(alg, {(model.hatted(ht),): RationalXi.const(1)}))
                reg = model.gen_elem(hr) * model.gen_elem(ht)
                out = out + (model.gen_elem(base) * (hat - reg)) * (w * quarter)
    # +(1/2) sum <nabla_{f_i} f_j, h_s> c(f_i) c(f_j) c(h_s)
    for fi in leaf:
        for fj in leaf:
            for hs in perp:
                w = conn(idx(fi), idx(fj), idx(hs))
                if w.is_zero():
                    continue
                term = model.gen_elem(fi) * model.gen_elem(fj) * model.gen_elem(hs)
                out = out + term * (w * half)
    # +(1/2) sum <nabla_{h_s} h_t, f_i> c(h_s) c(h_t) c(f_i)
    for hs in perp:
        for ht in perp:
            for fi in leaf:
                w = conn(idx(hs), idx(ht), idx(fi))
                if w.is_zero():
                    continue
                term = model.gen_elem(hs) * model.gen_elem(ht) * model.gen_elem(fi)
                out = out + term * (w * half)
    return out


def sigma_minus1_Dinv(model: BoundaryModel) -> Jet:
    """i c(xi) / |xi|^2 with its x_n-jet."""
    return model.c_xi_jet().mul(model.inv_norm_sq_jet(1)).scale(GR_I)


def sigma_minus2_Dinv(model: BoundaryModel) -> Jet:
    """Second symbol of the inverse operator at the boundary point (value only):

        c(xi) p0 c(xi)/|xi|^4
        + c(xi)/|xi|^6 * c(dx_n) [ d_{x_n}c(xi) |xi|^2 - c(xi) d_{x_n}|xi|^2 ]
    """
    cxi = model.c_xi_jet()
    p0 = sigma0_DF(model)
    N = model.c_dxn()
    inv2 = RationalXi.inv_norm_sq(2)
    inv3 = RationalXi.inv_norm_sq(3)
    main = (cxi.val * p0 * cxi.val).map_coeffs(lambda c: c * inv2)
    mid = (cxi.val * N * cxi.dxn).map_coeffs(lambda c: c * inv2)
    last = (cxi.val * N * cxi.val).map_coeffs(lambda c: c * (inv3 * h1_poly()))
    return Jet(main + mid - last, None)


def sigma_minus2_Dsq(model: BoundaryModel) -> Jet:
    """|xi|^{-2} times the identity, with its x_n-jet."""
    return model.inv_norm_sq_jet(1)


def sigma_minus3_Dsq(model: BoundaryModel) -> Jet:
    """Third symbol of the inverse square at the boundary point (value only).

    A1 = -2i h'(0) xi_n |xi|^{-6};  A2 = -i |xi|^{-4} xi_k (Gamma^k + word terms),
    Gamma^n(x0) = gamma_n * h'(0), tangential Gamma^k(x0) = 0.
    """
    alg = model.algebra
    leaf = model.leaf_gens
    perp = model.perp_gens
    idx = model.gen_index
    xi = RationalXi.xi()
    inv2 = RationalXi.inv_norm_sq(2)
    inv3 = RationalXi.inv_norm_sq(3)

    a1 = SymbolExpr.scalar(alg, xi * inv3 * (h1_poly() * GaussianRational(0, -2)))

    def word_terms(k: int) -> SymbolExpr:
        acc = SymbolExpr(alg)
        half = Fraction(1, 2)
        for fa in leaf:
            for fb in leaf:
                w = omega(idx(fa), idx(fb), k)
                if not w.is_zero():
                    acc = acc + (model.gen_elem(fa) * model.gen_elem(fb)) * (w * half)
        for hr in perp:
            for ht in perp:
                w = omega(idx(hr), idx(ht), k)
                if w.is_zero():
                    continue
                hat = (SymbolExpr(alg, {(model.hatted(hr),): RationalXi.const(1)})
                       * SymbolExpr(alg, {(model.hatted(ht),): RationalXi.const(1)}))
                reg = model.gen_elem(hr) * model.gen_elem(ht)
                acc = acc - (hat - reg) * (w * half)
        for fj in leaf:
            for hs in perp:
                w = conn(k, idx(fj), idx(hs))
                if not w.is_zero():
                    acc = acc - (model.gen_elem(fj) * model.gen_elem(hs)) * w
        return acc

    # k = n: xi_n ( Gamma^n + W_n )
    a2 = SymbolExpr.scalar(
        alg, xi * inv2 * (h1_poly() * GaussianRational(model.gamma_n)))
    a2 = a2 + word_terms(model.n - 1).map_coeffs(lambda c: c * (xi * inv2))
    # tangential k: coordinate-weighted word terms (odd on the cosphere)
    for g, name in zip(model.tangential, model.coords):
        wt = word_terms(model.gen_index(g))
        if not wt.is_zero():
            factor = inv2 * ScalarPoly.symbol(name)
            a2 = a2 + wt.map_coeffs(lambda c, f=factor: c * f)
    a2 = a2 * GaussianRational(0, -1)
    return Jet(a1 + a2, None)


def symbol_jet(model: BoundaryModel, power: int, order: int) -> Jet:
    """Symbol of D^{-power} at the given order, as a jet at the base point."""
    key = (power, order)
    builders = {
        (1, -1): sigma_minus1_Dinv,
        (1, -2): sigma_minus2_Dinv,
        (2, -2): sigma_minus2_Dsq,
        (2, -3): sigma_minus3_Dsq,
    }
    if key not in builders:
        raise KeyError(f"no symbol builder for D^-{power} at order {order}")
    return builders[key](model)


def derive(expr: Jet | SymbolExpr, which: str, order: int = 1):
    """Differentiate a symbol: 'xi' any order, 'xn' once (from the stored jet)."""
    if which == "xi":
        return expr.dxi(order)
    if which == "xn":
        if order != 1:
            raise ValueError("only first x_n-derivatives are carried")
        if not isinstance(expr, Jet):
            raise TypeError("x_n-derivative requires a jetted symbol")
        return expr.component(1)
    raise ValueError(f"unknown derivative direction {which!r}")
