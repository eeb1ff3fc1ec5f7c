"""S-integral points on affine curves via p-adic integrals of log differentials."""

from .curves import CurveProblem, EvenHyperellipticCurve, SuperellipticCurve, make_curve
from .engine import Engine
from .padics import PadicNumber, iwasawa_log, parse_padic, render_padic, teichmuller
from .problem import build_engine, load_problem

__all__ = [
    "CurveProblem",
    "Engine",
    "EvenHyperellipticCurve",
    "PadicNumber",
    "SuperellipticCurve",
    "build_engine",
    "iwasawa_log",
    "load_problem",
    "make_curve",
    "parse_padic",
    "render_padic",
    "teichmuller",
]
