"""Independent numeric oracles: adaptive quadrature for line integrals and the
half-plane projection, finite differences for jets, Monte-Carlo sphere
moments, and seeded random generators for the randomized suites.

These deliberately avoid the exact code paths they check: integrals go
through adaptive quadrature on the real line (or a shifted contour), never
through residues.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .clifford import AlgebraSignature, MatrixRep, normalize, sub_dirac_algebra
from .symbolic import GaussianRational, RationalXi
from .warped import Jet3, _eval_ast


def _quad_complex(fn, a=-math.inf, b=math.inf, limit=400):
    from scipy.integrate import quad

    kw = {"limit": limit, "epsabs": 1e-12, "epsrel": 1e-11}
    re, _ = quad(lambda t: fn(t).real, a, b, **kw)
    im, _ = quad(lambda t: fn(t).imag, a, b, **kw)
    return complex(re, im)


def numeric_line_integral(f: RationalXi) -> complex:
    """Adaptive quadrature of the rational function over the real line."""
    return _quad_complex(lambda t: f.evaluate(t))


def numeric_pi_plus(f: RationalXi, x0: float, drop: float = 0.5) -> complex:
    """Half-plane projection at a real point via a shifted-contour Cauchy
    integral: pi+f(x0) = f(x0) - (2 pi i)^{-1} * integral over Im = -drop of
    f(eta)/(eta - x0)."""
    if not 0 < drop < 1:
        raise ValueError("contour must sit strictly between the axis and the lower pole")
    shift = -1j * drop

    def integrand(t):
        eta = t + shift
        return f.evaluate(eta) / (eta - x0)

    integral = _quad_complex(integrand)
    return f.evaluate(x0) - integral / (2j * math.pi)


def fd_jet(fn, t: float, h: float = 1e-3):
    """Central finite differences for (f, f', f'', f''') with step h."""
    f_m2, f_m1, f_0, f_p1, f_p2 = (fn(t + k * h) for k in (-2, -1, 0, 1, 2))
    d1 = (f_p1 - f_m1) / (2 * h)
    d2 = (f_p1 - 2 * f_0 + f_m1) / (h * h)
    d3 = (f_p2 - 2 * f_p1 + 2 * f_m1 - f_m2) / (2 * h ** 3)
    return f_0, d1, d2, d3


def mc_sphere_moment(exponents, m: int, samples: int = 400_000, seed: int = 0) -> float:
    """Monte-Carlo estimate of the normalized sphere moment (ratio to the
    total measure)."""
    import numpy as np

    rng = np.random.default_rng(seed)
    x = rng.standard_normal((samples, m))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    vals = np.ones(samples)
    for i, e in enumerate(exponents):
        if e:
            vals = vals * x[:, i] ** e
    return float(vals.mean())


# ---------------------------------------------------------------------------
# Seeded random inputs
# ---------------------------------------------------------------------------

def random_rational_xi(rng: random.Random, min_gap: int = 2) -> RationalXi:
    """Random proper rational function with poles only at +-i."""
    while True:
        mp = rng.randint(0, 4)
        mm = rng.randint(0, 4)
        if mp + mm < min_gap:
            continue
        deg = rng.randint(0, mp + mm - min_gap)
        coeffs = [GaussianRational(Fraction(rng.randint(-5, 5)),
                                   Fraction(rng.randint(-5, 5)))
                  for _ in range(deg + 1)]
        f = RationalXi(coeffs, mp, mm)
        if not f.is_zero() and f.degree_gap() >= min_gap:
            return f


def random_signature(rng: random.Random, max_pq: int = 3) -> AlgebraSignature:
    while True:
        p = rng.randint(0, max_pq)
        q = rng.randint(0, max_pq)
        if p + q > 0:
            return AlgebraSignature(p, q)


def random_word(rng: random.Random, sig: AlgebraSignature, max_len: int = 8):
    alg = sub_dirac_algebra(sig.p, sig.q)
    gens = alg.gens()
    return alg, [rng.choice(gens) for _ in range(rng.randint(1, max_len))]


def random_warp_ast(rng: random.Random, max_depth: int = 4,
                    probes=(0.2, 0.7, 1.3)) -> tuple:
    """Random warp AST that is finite and tame at the probe points."""

    def build(depth):
        if depth <= 0 or rng.random() < 0.3:
            return rng.choice([("t",), ("num", Fraction(rng.randint(1, 4))),
                               ("num", Fraction(rng.randint(1, 9), rng.randint(1, 4)))])
        op = rng.choice(["+", "-", "*", "call", "pow", "/"])
        if op == "call":
            name = rng.choice(["sin", "cos", "exp", "sinh", "cosh", "ln"])
            arg = build(depth - 1)
            if name == "ln":
                # keep the argument positive by construction
                arg = ("+", ("*", arg, arg), ("num", Fraction(1)))
            return ("call", name, arg)
        if op == "pow":
            return ("pow", build(depth - 1), rng.randint(1, 3))
        if op == "/":
            denom = ("+", ("*", build(depth - 1), build(depth - 1)), ("num", Fraction(1)))
            return ("/", build(depth - 1), denom)
        return (op, build(depth - 1), build(depth - 1))

    def value(ast, t):
        return _eval_ast(ast, Jet3.variable(t)).value

    while True:
        ast = build(max_depth)
        try:
            ok = True
            for t in probes:
                jet = _eval_ast(ast, Jet3.variable(t))
                if not all(math.isfinite(v) and abs(v) < 1e4 for v in jet.derivatives()):
                    ok = False
                    break
                # reject functions whose finite differences are not yet in the
                # asymptotic regime at step 1e-3 (wild fifth derivatives)
                coarse = fd_jet(lambda x: value(ast, x), t, h=2e-3)
                fine = fd_jet(lambda x: value(ast, x), t, h=1e-3)
                scale = max(1.0, *(abs(v) for v in fine))
                if max(abs(a - b) for a, b in zip(coarse, fine)) > 2.5e-7 * scale:
                    ok = False
                    break
            if ok:
                return ast
        except (ValueError, OverflowError, ZeroDivisionError):
            continue


# ---------------------------------------------------------------------------
# Oracle suites (used by the command line and the tests)
# ---------------------------------------------------------------------------

def run_trace_oracle(seed: int, count: int) -> dict:
    """Random words: symbolic normal ordering against the dense matrices."""
    rng = random.Random(seed)
    failures = 0
    reps: dict[tuple[int, int], MatrixRep] = {}
    for _ in range(count):
        sig = random_signature(rng)
        alg, word = random_word(rng, sig)
        rep = reps.setdefault((sig.p, sig.q), MatrixRep(alg))
        sym = normalize(alg, word)
        if rep.element_matrix(sym) != rep.word_matrix(word):
            failures += 1
            continue
        sym_tr = sym.trace(sig.total_dim).constant_value()
        mat_tr = rep.normalized_trace(rep.word_matrix(word)) * GaussianRational(sig.total_dim)
        if sym_tr != mat_tr:
            failures += 1
    return {"name": "trace-matrix", "count": count, "failures": failures,
            "pass": failures == 0}


def run_quadrature_oracle(seed: int, count: int, rel_tol: float = 1e-8) -> dict:
    """Random proper rational functions: exact residue integral vs quadrature."""
    rng = random.Random(seed)
    worst = 0.0
    failures = 0
    for _ in range(count):
        f = random_rational_xi(rng)
        exact = complex(f.integrate_pi_coefficient().constant_value()) * math.pi
        approx = numeric_line_integral(f)
        err = abs(exact - approx) / max(abs(exact), 1e-6)
        worst = max(worst, err)
        if err > rel_tol:
            failures += 1
    return {"name": "residue-quadrature", "count": count, "failures": failures,
            "worst_rel_err": worst, "pass": failures == 0}


def run_ad_oracle(seed: int, count: int, tol: float = 1e-6) -> dict:
    """Random warp expressions: order-3 jets vs central finite differences."""
    rng = random.Random(seed)
    worst = 0.0
    failures = 0
    probes = (0.2, 0.7, 1.3)
    for _ in range(count):
        ast = random_warp_ast(rng, probes=probes)
        t = probes[rng.randrange(len(probes))]
        try:
            jet = _eval_ast(ast, Jet3.variable(t)).derivatives()
            fd = fd_jet(lambda x: _eval_ast(ast, Jet3.variable(x)).value, t)
        except (ValueError, OverflowError):
            continue
        scale = max(1.0, *(abs(v) for v in jet))
        err = max(abs(a - b) for a, b in zip(jet, fd)) / scale
        worst = max(worst, err)
        if err > tol:
            failures += 1
    return {"name": "jet-finite-difference", "count": count, "failures": failures,
            "worst_rel_err": worst, "pass": failures == 0}
