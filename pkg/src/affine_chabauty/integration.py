"""Coleman integration of logarithmic differentials on the curve families.

Ties the Frobenius-lift backend to the curve families: tiny integrals on
residue discs, global integrals between affine points, the splitting and
auxiliary-curve transport for the superelliptic family, and the two sides
of the p-adic residue theorem.

All integrals use the Iwasawa branch log(p) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .curves import (
    Cusp,
    CurveProblem,
    EvenHyperellipticCurve,
    LogDifferential,
    ResidueDisc,
    SuperellipticCurve,
)
from .errors import (
    DifferentDiscs,
    EndpointRestriction,
    PoleOnDisc,
    UnsupportedFamily,
)
from .hyperelliptic import INFINITY, HyperellipticModel, Point, loss_budget
from .numberfield import NFElement, hensel_embed
from .padics import PadicNumber, iwasawa_log, nth_root, teichmuller
from .polyutil import pderiv, peval
from .series import (
    Subordination,
    TruncatedSeries,
    formal_antiderivative,
    nth_root_series,
)

ZETA_PREC_PAD = 24


@dataclass
class IntegralValue:
    value: PadicNumber
    method: str                   # 'tiny' | 'frobenius' | 'pullback' | 'imported'
    loss: int = 0
    endpoints: tuple | None = None


@dataclass
class DiscExpansion:
    """omega restricted to a disc:  (pole_coeff / t) dt + series(t) dt."""

    pole_coeff: PadicNumber
    series: TruncatedSeries


class Integrator:
    """Per-problem integration context with cached Frobenius data."""

    def __init__(self, problem: CurveProblem, imported: dict | None = None):
        self.problem = problem
        self.curve = problem.curve
        self.p = problem.p
        self.prec = problem.prec
        self.work = problem.prec + 4
        self.imported = imported or {}
        self._models: dict = {}
        self._pair_cache: dict = {}

    # -- model access --------------------------------------------------------

    def main_model(self) -> HyperellipticModel:
        if "main" not in self._models:
            if not isinstance(self.curve, EvenHyperellipticCurve):
                raise UnsupportedFamily("main model exists for the hyperelliptic family")
            self._models["main"] = HyperellipticModel(
                [int(c) for c in self.curve.f], self.p, self.work)
        return self._models["main"]

    def w_model(self) -> HyperellipticModel:
        """Odd Weierstrass model v'^2 = u'^3 + (a^2/4 - 1) of the elliptic chart."""
        if "w" not in self._models:
            a = self.curve.a
            self._models["w"] = HyperellipticModel(
                [a * a / 4 - 1, 0, 0, Fraction(1)], self.p, self.work)
        return self._models["w"]

    def cube_roots(self) -> list[PadicNumber]:
        if "zetas" not in self._models:
            need = self._xzeta_internal() + ZETA_PREC_PAD
            roots = [PadicNumber.from_int(1, self.p, need)]
            roots += [e.root for e in hensel_embed([1, 1, 1], self.p, need)]
            self._models["zetas"] = roots
        return self._models["zetas"]

    def _xzeta_internal(self) -> int:
        return self.work + loss_budget(self.p, self.work + 6, 4) + 8

    def x_zeta_model(self, idx: int) -> HyperellipticModel:
        key = ("xz", idx)
        if key not in self._models:
            z = self.cube_roots()[idx]
            a = self.curve.a
            # t^2 = (4/a^2) [ s (1 + zeta s)^3 + (a^2/4 - 1) s^4 ], which is monic
            one = z ** 0
            q = [PadicNumber.exact_zero(self.p),
                 one * (Fraction(4) / (a * a)),
                 z * (Fraction(12) / (a * a)),
                 (z * z) * (Fraction(12) / (a * a)),
                 one]
            self._models[key] = HyperellipticModel(q, self.p, self.work)
        return self._models[key]

    # -- endpoint conversion ---------------------------------------------------

    def _to_pad(self, v, N=None) -> PadicNumber:
        if isinstance(v, PadicNumber):
            return v
        return PadicNumber.from_rational(Fraction(v), self.p, N or self._hi())

    def _hi(self) -> int:
        return self.work + 40

    def main_point(self, pt) -> Point:
        m = self.main_model()
        x, y = pt
        return m.point(self._to_pad(x, m.M), self._to_pad(y, m.M))

    # -- public: family basis integrals ------------------------------------------

    def basis_integral_vector(self, P, Q) -> list[PadicNumber]:
        """Integrals of the family basis omega_1..omega_(g+n-1) from P to Q."""
        key = self._pair_key(P, Q)
        if key in self._pair_cache:
            return self._pair_cache[key]
        got = self._imported_lookup(P, Q)
        if got is None:
            if isinstance(self.curve, EvenHyperellipticCurve):
                got = self._even_vector(P, Q)
            elif isinstance(self.curve, SuperellipticCurve):
                got = self._super_vector(P, Q)
            else:
                raise UnsupportedFamily(self.curve.family)
        self._pair_cache[key] = got
        return got

    def integral(self, omega: LogDifferential, P, Q) -> IntegralValue:
        vec = self.basis_integral_vector(P, Q)
        acc = PadicNumber.exact_zero(self.p)
        for a, v in zip(omega.coeffs, vec):
            acc = acc + v * a
        loss = max(self.prec - acc.N, 0) if not acc.is_exact_zero() else 0
        return IntegralValue(value=acc, method="frobenius", loss=loss,
                             endpoints=(P, Q))

    # spec-facing names
    def coleman_integral(self, omega: LogDifferential, P, Q) -> IntegralValue:
        """Global Coleman integral of a log differential (Iwasawa branch)."""
        return self.integral(omega, P, Q)

    def superelliptic_integral(self, j: int, P, Q) -> IntegralValue:
        """Basis integral on the superelliptic family via the splitting transport."""
        if not isinstance(self.curve, SuperellipticCurve):
            raise UnsupportedFamily("superelliptic_integral needs the superelliptic family")
        vec = self.basis_integral_vector(P, Q)
        return IntegralValue(value=vec[j], method="pullback", endpoints=(P, Q))

    def divisor_integral(self, omega: LogDifferential, divisor) -> IntegralValue:
        """Integral over a degree-zero divisor given as [(point, multiplicity)]."""
        total = sum(m for _, m in divisor)
        if total != 0:
            raise ValueError("divisor must have degree zero")
        base = divisor[0][0]
        acc = PadicNumber.exact_zero(self.p)
        for pt, mult in divisor:
            if mult == 0:
                continue
            acc = acc + self.integral(omega, base, pt).value * mult
        return IntegralValue(value=acc, method="frobenius")

    def _pair_key(self, P, Q):
        def k(pt):
            x, y = pt
            return (str(Fraction(x)) if not isinstance(x, PadicNumber) else str(x),
                    str(Fraction(y)) if not isinstance(y, PadicNumber) else str(y))
        return (k(P), k(Q))

    def _imported_lookup(self, P, Q):
        if not self.imported:
            return None
        key = self._pair_key(P, Q)
        if key in self.imported:
            return self.imported[key]
        return None

    # -- even hyperelliptic ---------------------------------------------------------

    def _even_vector(self, P, Q):
        m = self.main_model()
        vals = m.basis_integrals(self.main_point(P), self.main_point(Q))
        return vals[: self.curve.basis_size()]

    # -- superelliptic ----------------------------------------------------------------

    def _uv_coords(self, pt):
        """(u', v') on the shifted Weierstrass chart; INFINITY for x = 0."""
        x, y = pt
        a = self.curve.a
        if not isinstance(x, PadicNumber) and Fraction(x) == 0:
            return INFINITY
        xp, yp = self._to_pad(x), self._to_pad(y)
        if xp.is_zero():
            return INFINITY
        u = yp / xp
        v = xp.inverse() + a / 2
        return (u, v)

    def _check_endpoint(self, uv):
        if uv is INFINITY:
            return
        u, v = uv
        if u.v < 0:
            raise EndpointRestriction("endpoint reduces into an infinite disc of the chart")
        ub = u.residue(1)
        if pow(ub, 3, self.p) == 1:
            raise EndpointRestriction(
                "endpoint lies in a cusp residue disc or its involution image")

    def _super_vector(self, P, Q):
        w1 = self._super_omega1(P, Q)
        w2, w3 = self._super_omega23(P, Q)
        return [w1, w2, w3]

    def _super_omega1(self, P, Q):
        m = self.w_model()
        uvP, uvQ = self._uv_coords(P), self._uv_coords(Q)
        for uv in (uvP, uvQ):
            self._check_endpoint(uv)
        ptP = uvP if uvP is INFINITY else m.point(*uvP)
        ptQ = uvQ if uvQ is INFINITY else m.point(*uvQ)
        vals = m.basis_integrals(ptP, ptQ)
        return vals[0] * Fraction(-3, 2)

    def _super_omega23(self, P, Q):
        p = self.p
        zetas = self.cube_roots()
        uvP, uvQ = self._uv_coords(P), self._uv_coords(Q)
        for uv in (uvP, uvQ):
            self._check_endpoint(uv)
        # symmetric parts: pullbacks from P^1 in the coordinate w = 1/u'; the
        # residue weights sum to zero, so the value at w = infinity vanishes
        i2 = self._plus_part(uvQ, zetas, inverse_weight=True) \
            - self._plus_part(uvP, zetas, inverse_weight=True)
        i3 = self._plus_part(uvQ, zetas, inverse_weight=False) \
            - self._plus_part(uvP, zetas, inverse_weight=False)
        # antisymmetric parts through the auxiliary even models
        a = self.curve.a
        for idx, z in enumerate(zetas):
            X = self.x_zeta_model(idx)
            tauP = self._tau(uvP, z, X)
            tauQ = self._tau(uvQ, z, X)
            vals = X.basis_integrals(tauP, tauQ)
            I_z = vals[1] / 2  # s ds/(2t)
            i2 = i2 + (-z) * I_z
            i3 = i3 + (-z.inverse()) * I_z
        return i2, i3

    def _plus_part(self, uv, zetas, inverse_weight: bool) -> PadicNumber:
        """sum_zeta -1/2 zeta^(+-1) log(w - zeta) at one endpoint (w = 1/u')."""
        p = self.p
        if uv is INFINITY:
            w = PadicNumber.exact_zero(p)        # u' = infinity: w = 0
        else:
            u = uv[0]
            if u.is_exact_zero():
                return PadicNumber.exact_zero(p)  # w = infinity: weights sum to zero
            if u.is_zero():
                raise EndpointRestriction("u-coordinate indistinguishable from zero")
            w = u.inverse()
        acc = PadicNumber.exact_zero(p)
        for z in zetas:
            weight = z.inverse() if inverse_weight else z
            acc = acc + weight * iwasawa_log(w - z) * Fraction(-1, 2)
        return acc

    def _tau(self, uv, z, X: HyperellipticModel):
        """tau_zeta(u', v') = (1/(u'-z), -2 v' / (a (u'-z)^2)) with tau(infinity) = (0,0)."""
        p = self.p
        if uv is INFINITY:
            return X.point(PadicNumber.exact_zero(p), PadicNumber.exact_zero(p))
        u, v = uv
        a = self.curve.a
        s = (u - z).inverse()
        t = (-2) * v * ((u - z) ** 2).inverse() / a
        return X.point(s, t)

    # -- residue discs and expansions ------------------------------------------------

    def residue_discs(self) -> list[ResidueDisc]:
        return self.curve.residue_discs(self.p)

    def disc_center(self, disc: ResidueDisc):
        """Canonical (Teichmueller-type) center of a non-cuspidal disc."""
        p = self.p
        hi = self._hi()
        if disc.cuspidal:
            raise PoleOnDisc("cuspidal discs have no integration center")
        if isinstance(self.curve, EvenHyperellipticCurve):
            m = self.main_model()
            if disc.kind == "weierstrass":
                x0 = m._weierstrass_center_x(Point(
                    PadicNumber.from_int(disc.xbar, p, m.M), PadicNumber.from_int(p, p, m.M)))
                return (x0, PadicNumber.exact_zero(p))
            xt = PadicNumber.exact_zero(p) if disc.xbar == 0 else \
                teichmuller(PadicNumber.from_int(disc.xbar, p, hi))
            from .padics import sqrt as padic_sqrt
            y = padic_sqrt(peval(m.f, xt, p) if not xt.is_exact_zero()
                           else m.f[0], sign_hint=disc.ybar)
            return (xt, y)
        # superelliptic
        g = self._g_poly()
        if disc.kind == "weierstrass":
            x0 = self._super_ram_center(disc)
            return (x0, PadicNumber.exact_zero(p))
        xt = PadicNumber.exact_zero(p) if disc.xbar == 0 else \
            teichmuller(PadicNumber.from_int(disc.xbar, p, hi))
        gx = peval(g, xt, p) if not xt.is_exact_zero() else g[0]
        y = nth_root(gx, 3, disc.ybar)
        return (xt, y)

    def _g_poly(self):
        hi = self._hi()
        return [PadicNumber.exact_zero(self.p),
                PadicNumber.from_int(1, self.p, hi),
                PadicNumber.from_rational(self.curve.a, self.p, hi),
                PadicNumber.from_int(1, self.p, hi)]

    def _super_ram_center(self, disc):
        from .padics import hensel_lift_root
        a = int(self.curve.a)
        r = hensel_lift_root([0, 1, a, 1], disc.xbar, self.p, self._hi())
        return PadicNumber.from_int(r, self.p, self._hi())

    def disc_parametrization(self, disc: ResidueDisc, order: int | None = None):
        """Series (x(t), y(t)) around the canonical center; t runs over Zp."""
        p = self.p
        T = order or 2 * self.prec
        if disc.cuspidal and disc.kind == "infinite":
            return self._infinite_parametrization(disc, T)
        if disc.cuspidal:
            raise PoleOnDisc("no parametrization for cusp discs of the chart")
        cx, cy = self.disc_center(disc)
        if isinstance(self.curve, EvenHyperellipticCurve):
            m = self.main_model()
            return m.disc_series(Point(cx, cy), order=T)
        # superelliptic
        g = self._g_poly()
        zeros = [PadicNumber.exact_zero(p)] * (T - 2)
        if disc.kind == "affine":
            xs = TruncatedSeries(p, [cx, PadicNumber.from_int(p, p, self._hi())] + zeros,
                                 Subordination(1, 0), check=False, exact=True)
            gx = _poly_on_series(g, xs)
            ys = nth_root_series(gx, 3, disc.ybar)
            return xs, ys
        # ramification disc: y = p t, solve g(x) = y^3
        ys = TruncatedSeries(p, [PadicNumber.exact_zero(p),
                                 PadicNumber.from_int(p, p, self._hi())] + zeros,
                             Subordination(1, 0), check=False, exact=True)
        target = ys * ys * ys
        xs = TruncatedSeries(p, [cx] + [PadicNumber.exact_zero(p)] * (T - 1),
                             Subordination(1, 0), check=False, exact=True)
        for _ in range(T.bit_length() + 2):
            gx = _poly_on_series(g, xs)
            dgx = _poly_on_series(pderiv(g), xs)
            xs = xs - (gx - target) * dgx.inverse()
        xs = TruncatedSeries(p, xs.coeffs, Subordination(1, 0), check=False)
        return xs, ys

    def _infinite_parametrization(self, disc, T):
        """w = 1/x = p t chart at an infinite disc of the even model."""
        m = self.main_model()
        p = self.p
        zeros = [PadicNumber.exact_zero(p)] * (T - 2)
        ws = TruncatedSeries(p, [PadicNumber.exact_zero(p),
                                 PadicNumber.from_int(p, p, m.M)] + zeros,
                             Subordination(1, 0), check=False, exact=True)
        frev = list(reversed(m.f))  # w^(2g+2) f(1/w)
        fw = _poly_on_series(frev, ws)
        sign = 1 if disc.label == "inf+" else -1
        from .series import sqrt_series
        sq = sqrt_series(fw, sign_hint=int(sign * int(self.curve.sqrt_lead)) % p)
        return ws, sq

    def expand_differential_on_disc(self, omega: LogDifferential,
                                    disc: ResidueDisc,
                                    order: int | None = None) -> DiscExpansion:
        """omega|disc = (pole/t) dt + series dt in the disc parameter."""
        p = self.p
        T = order or 2 * self.prec
        if disc.kind == "cuspidal":
            raise PoleOnDisc("omega has a pole inside a cusp disc")
        if disc.kind == "infinite":
            return self._expand_infinite(omega, disc, T)
        xs, ys = self.disc_parametrization(disc, T)
        dx = xs.derivative()
        if isinstance(self.curve, EvenHyperellipticCurve):
            if disc.kind == "weierstrass":
                shifted = _shift_down(dx, 1)
                base = shifted.scale(Fraction(1, p))       # dx/y with y = p t
            else:
                base = dx * ys.inverse()
            series = None
            xpow = base
            for j, a in enumerate(omega.coeffs):
                if j > 0:
                    xpow = xpow * xs
                term = xpow.scale(a)
                series = term if series is None else series + term
            return DiscExpansion(PadicNumber.exact_zero(p), series)
        # superelliptic: components 1/y^2, x/y^2, 1/y
        if disc.kind == "weierstrass":
            # y = p t; x' is divisible by t^2
            s2 = _shift_down(dx, 2).scale(Fraction(1, p * p))   # dx/y^2
            s1 = _shift_down(dx, 1).scale(Fraction(1, p))       # dx/y
            comps = [s2, s2 * xs, s1]
        else:
            inv_y = ys.inverse()
            inv_y2 = inv_y * inv_y
            comps = [dx * inv_y2, (dx * inv_y2) * xs, dx * inv_y]
        series = None
        for a, comp in zip(omega.coeffs, comps):
            term = comp.scale(a)
            series = term if series is None else series + term
        return DiscExpansion(PadicNumber.exact_zero(p), series)

    def _expand_infinite(self, omega, disc, T):
        """Expansion on an infinite disc of the even model (log pole allowed)."""
        p = self.p
        g = self.curve.genus
        ws, sq = self._infinite_parametrization(disc, T)
        inv_sq = sq.inverse()
        series = None
        pole = PadicNumber.exact_zero(p)
        sign = Fraction(-1)  # omega_j = -w^(g-1-j) p / sqrt(fw) dt - see chart computation
        for j, a in enumerate(omega.coeffs):
            if isinstance(a, Fraction) and a == 0:
                continue
            if j < g:
                wpow = inv_sq
                for _ in range(g - 1 - j):
                    wpow = wpow * ws
                term = wpow.scale(sign * p).scale(a)
                series = term if series is None else series + term
            else:
                # log element: -(1/sqrt(fw)) dt/t
                h = inv_sq.scale(sign)
                pole = pole + h[0] * a
                rest = _shift_down(h - h[0], 1).scale(a)
                series = rest if series is None else series + rest
        if series is None:
            series = TruncatedSeries(p, [PadicNumber.unknown_zero(p, self.work)] * T,
                                     Subordination(1, 0), check=False)
        return DiscExpansion(pole, series)

    # -- tiny integrals ------------------------------------------------------------

    def tiny_integral(self, omega: LogDifferential, P, Q) -> IntegralValue:
        """Integral between two points of one non-cuspidal residue disc."""
        p = self.p
        disc = self._disc_of(P)
        discQ = self._disc_of(Q)
        if (disc.xbar, disc.ybar, disc.kind) != (discQ.xbar, discQ.ybar, discQ.kind):
            raise DifferentDiscs(f"{disc} vs {discQ}")
        exp = self.expand_differential_on_disc(omega, disc)
        if not exp.pole_coeff.is_zero():
            raise PoleOnDisc("differential has a pole in the disc interior")
        F = formal_antiderivative(exp.series)
        tP = self._param_in_disc(P, disc)
        tQ = self._param_in_disc(Q, disc)
        return IntegralValue(value=F.evaluate(tQ) - F.evaluate(tP), method="tiny")

    def _disc_of(self, pt) -> ResidueDisc:
        x, y = pt
        xp, yp = self._to_pad(x), self._to_pad(y)
        if xp.v < 0 or yp.v < 0:
            raise EndpointRestriction("point is not p-integral")
        xb = xp.residue(1)
        yb = yp.residue(1)
        kind = "affine" if yb != 0 else "weierstrass"
        return ResidueDisc(self.curve, self.p, xb, yb, kind)

    def _param_in_disc(self, pt, disc) -> PadicNumber:
        x, y = pt
        xp, yp = self._to_pad(x), self._to_pad(y)
        if disc.kind == "weierstrass":
            return yp / self.p
        cx, cy = self.disc_center(disc)
        return (xp - cx) / self.p

    # -- residue theorem -------------------------------------------------------------

    def residue_theorem_check(self, divisor, cusp_values: dict,
                              omega: LogDifferential):
        """(lhs, rhs) of the residue identity for div(f) and omega.

        divisor: [(point, multiplicity)] supported in Y;
        cusp_values: cusp id -> f(Q) as an element of k(Q) (nonzero).
        """
        lhs = self.divisor_integral(omega, divisor).value
        rhs = PadicNumber.exact_zero(self.p)
        for cusp in self.curve.cusps:
            val = cusp_values[cusp.id]
            if not isinstance(val, NFElement):
                val = cusp.nfield(val)
            for phi in self.problem.embeddings(cusp):
                r = omega.embedded_residue(cusp, phi)
                if r.is_zero():
                    continue
                rhs = rhs + r * iwasawa_log(phi(val))
        return lhs, rhs


def frobenius_matrix(f_coeffs, p: int, prec: int):
    """Frobenius data for y^2 = f(x); the spec-level entry point."""
    return HyperellipticModel(f_coeffs, p, prec).frobenius_data()


def _poly_on_series(coeffs, xs: TruncatedSeries) -> TruncatedSeries:
    p = xs.p
    top = coeffs[-1]
    acc = TruncatedSeries(p, [top] + [PadicNumber.exact_zero(p)] * (xs.order - 1),
                          Subordination(1, min(0, top.v if not top.is_zero() else 0)),
                          check=False, exact=True)
    for c in reversed(coeffs[:-1]):
        acc = acc * xs + c
    return acc


def _shift_down(f: TruncatedSeries, k: int) -> TruncatedSeries:
    """Divide by t^k; the dropped low coefficients must be zero classes."""
    p = f.p
    for c in f.coeffs[:k]:
        if not c.is_zero():
            raise PoleOnDisc("series has a genuine pole: cannot shift down")
    bound = f.bound
    if bound is not None:
        bound = Subordination(bound.slope, bound.offset + k * bound.slope)
    return TruncatedSeries(p, f.coeffs[k:], bound, check=False, exact=f.exact)
