import random
from fractions import Fraction

import pytest

from affine_chabauty.errors import (
    DivergentSubstitution,
    IndistinguishableFromZero,
    PrecisionLoss,
)
from affine_chabauty.padics import PadicNumber
from affine_chabauty.series import (
    Subordination,
    TruncatedSeries,
    compose,
    formal_antiderivative,
    polynomial,
    sqrt_series,
    nth_root_series,
    strassmann_roots,
)

P = 7
N = 12


def poly(vals, p=P, n=N):
    return polynomial(vals, p, n, slope=0)


def test_access_beyond_truncation_is_error():
    f = poly([1, 2, 3])
    with pytest.raises(IndexError):
        f[3]


def test_compose_identity_and_scaling():
    g = poly([0, 7, 0, 0])  # g = 7t
    ident = poly([0, 1, 0, 0])
    got = compose(ident, g)
    assert got[1].compare(7) == "equal"
    sq = poly([0, 0, 1, 0])  # t^2
    got2 = compose(sq, g)
    assert got2[2].compare(49) == "equal"
    assert got2[1].is_zero() or got2[1].is_exact_zero()


def test_compose_requires_small_constant_term():
    with pytest.raises(DivergentSubstitution):
        compose(poly([0, 1]), poly([1, 1]))


def test_compose_associative():
    rng = random.Random(5)
    for _ in range(10):
        f = poly([rng.randint(-20, 20) for _ in range(6)])
        g = poly([7 * rng.randint(-3, 3)] + [rng.randint(-20, 20) for _ in range(5)])
        h = poly([7 * rng.randint(-3, 3)] + [7 * rng.randint(-5, 5) for _ in range(5)])
        lhs = compose(compose(f, g), h)
        rhs = compose(f, compose(g, h))
        for n in range(6):
            assert lhs[n].compare(rhs[n]) != "distinct"


def test_antiderivative_basics():
    f = poly([1])
    F = formal_antiderivative(f)
    assert F[0].is_zero() or F[0].is_exact_zero()
    # t^(p-1) integrates to t^p/p with one digit of precision lost
    g = TruncatedSeries(P, [PadicNumber.exact_zero(P)] * 6 +
                        [PadicNumber.from_int(1, P, 10)] + [PadicNumber.exact_zero(P)],
                        Subordination(0, 0), check=False)
    G = formal_antiderivative(g)
    assert G[7].valuation() == -1
    assert G[7].precision() == 9


def test_derivative_inverts_antiderivative():
    rng = random.Random(6)
    vals = [rng.randint(-50, 50) for _ in range(10)]
    f = poly(vals)
    back = formal_antiderivative(f).derivative()
    for n in range(9):
        assert back[n].compare(f[n]) != "distinct"


def test_sqrt_series_squares_back():
    # y = sqrt(9 + 7t + t^2) with y(0) = 3
    f = poly([9, 7, 1, 0, 0, 0, 0, 0])
    y = sqrt_series(f, sign_hint=3)
    y2 = y * y
    for n in range(8):
        assert y2[n].compare(f[n]) != "distinct"
    assert y[0].residue(1) == 3


def test_nth_root_series_cubes_back():
    f = poly([1, 7, 14, 0, 0, 0])
    y = nth_root_series(f, 3, residue_hint=1)
    y3 = (y * y) * y
    for n in range(6):
        assert y3[n].compare(f[n]) != "distinct"


def test_series_inverse():
    f = poly([3, 7, 2, 5, 0, 0])
    g = f.inverse()
    prod = f * g
    assert prod[0].compare(1) == "equal"
    for n in range(1, 6):
        assert prod[n].is_zero() or prod[n].is_exact_zero()


def test_evaluate_with_certificate():
    # truncated geometric series with a slope-1 certificate, evaluated at a unit
    cs = [PadicNumber.from_rational(Fraction(7) ** n, P, 20) for n in range(8)]
    f = TruncatedSeries(P, cs, Subordination(1, 0))
    t = PadicNumber.from_int(3, P, 20)
    got = f.evaluate(t)
    exact = sum(Fraction(7) ** n * 3 ** n for n in range(30))  # geometric tail negligible
    want = PadicNumber.from_rational(Fraction(1, 1 - 21), P, got.precision())
    assert got.compare(want) != "distinct"
    assert got.precision() >= 8


def test_strassmann_paper_shape():
    # valuation pattern (inf, 1, 2, 3, 4, 6, 7): unique root t = 0
    vals = [0, 7, 7 ** 2, 7 ** 3, 7 ** 4, 7 ** 6, 7 ** 7]
    f = polynomial(vals, P, 14, slope=1)
    res = strassmann_roots(f)
    assert res.bound == 1
    assert len(res.roots) == 1
    root, mult = res.roots[0]
    assert mult == 1 and root.is_zero()


def test_strassmann_t_times_t_minus_1():
    f = polynomial([0, -1, 1, 0, 0, 0, 0, 0], P, N, slope=0)
    res = strassmann_roots(f)
    assert res.bound == 2
    got = sorted(r.residue(1) for r, _ in res.roots)
    assert got == [0, 1]


def test_strassmann_congruent_roots_split():
    # roots 3 and 3+7 are congruent mod 7; the shift recursion separates them
    f = polynomial([30, -13, 1, 0, 0, 0, 0], P, N, slope=0)
    res = strassmann_roots(f)
    vals = sorted((r - 3).valuation() == 0 or True for r, _ in res.roots)
    assert len(res.roots) == 2
    lifts = sorted(r.residue(3) for r, _ in res.roots)
    assert lifts == [3, 10]


def test_strassmann_all_zero_raises():
    f = TruncatedSeries(P, [PadicNumber.unknown_zero(P, 3)] * 4,
                        Subordination(1, 0), check=False)
    with pytest.raises(IndistinguishableFromZero):
        strassmann_roots(f)


def test_strassmann_double_root_raises():
    f = polynomial([0, 0, 1, 0, 0], P, 8, slope=0)  # t^2
    with pytest.raises(PrecisionLoss):
        strassmann_roots(f)


def _brute_roots(coeffs, p, k):
    """Residues mod p^k surviving levelwise refinement f(r) = 0 mod p^j."""
    survivors = [0]
    current = [r for r in range(p) if _ev(coeffs, r, p) == 0]
    for j in range(2, k + 1):
        m = p ** j
        nxt = []
        for r in current:
            for d in range(p):
                cand = r + d * p ** (j - 1)
                if _ev(coeffs, cand, m) == 0:
                    nxt.append(cand)
        current = nxt
    return current


def _ev(cs, t, m):
    acc = 0
    for c in reversed(cs):
        acc = (acc * t + c) % m
    return acc


def test_strassmann_vs_bruteforce_random_cubics():
    rng = random.Random(7)
    trials = 0
    while trials < 25:
        roots = rng.sample(range(-40, 40), 3)
        lead = rng.choice([1, 2, 3])
        cs = [lead]
        for r in roots:
            cs = [c for c in cs]  # expand (x - r)
            new = [0] * (len(cs) + 1)
            for i, c in enumerate(cs):
                new[i] += c * (-r)
                new[i + 1] += c
            cs = new
        cs.reverse()  # ascending order
        if any(c % 7 == 0 for c in [lead]):
            continue
        trials += 1
        f = polynomial(cs + [0, 0], P, 10, slope=0)
        got = sorted(r.residue(6) for r, _ in strassmann_roots(f).roots)
        # brute force over residue towers, refined to mod 7^8 then reduced
        deep = _brute_roots(cs, 7, 8)
        want = sorted(set(r % 7 ** 6 for r in deep))
        assert got == want


def test_binomial_compose_matches_sqrt_series():
    # sqrt(1+z) as a binomial series, substituted z = f(-1+7t) - 1, matches
    # the direct square-root expansion of f(x(t)) on the fixture curve
    from affine_chabauty.series import sqrt_series

    fcs = [9, 20, 2, -18, -7, 2, 1]
    P_, N_, T_ = 7, 14, 10
    xt = polynomial([-1, 7] + [0] * (T_ - 2), P_, N_)
    fx = polynomial([fcs[-1]] + [0] * (T_ - 1), P_, N_)
    for c in reversed(fcs[:-1]):
        fx = fx * xt + Fraction(c)
    z = fx - 1  # constant term f(-1) - 1 = 0
    binom_vals = []
    acc = Fraction(1)
    for k in range(T_):
        binom_vals.append(acc)
        acc *= (Fraction(1, 2) - k) / (k + 1)
    binom = polynomial(binom_vals, P_, N_, slope=0)
    y_composed = compose(binom, z)
    y_direct = sqrt_series(fx, sign_hint=1)
    for n in range(T_):
        assert y_composed[n].compare(y_direct[n]) != "distinct"
    # oracle: y(t)^2 - f(x(t)) vanishes term by term
    resid = y_direct * y_direct - fx
    for c in resid.coeffs:
        assert c.is_zero() or c.is_exact_zero()
