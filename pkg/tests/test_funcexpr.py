"""Expression language: parser round trips, symbolic derivatives against a
finite difference oracle, and the documented error conditions."""

import math

import numpy as np
import pytest

from morseflow import funcexpr
from morseflow.errors import (
    DimensionError,
    DomainError,
    ExprSyntaxError,
    UnknownIdentifierError,
)

# expressions chosen to cover every node type and nesting pattern
CASES = [
    ("cos(2*pi*x1) + cos(2*pi*x2)", 2),
    ("sin(x1)*cos(x2) - x1^2/4 + 3", 2),
    ("exp(-x1^2 - x2^2) * (x1 + 2*x2)", 2),
    ("(1*x2^2 + 2*x3^2) / (x1^2 + x2^2 + x3^2)", 3),
    ("x1^3 - 2*x1*x2 + x2^-2", 2),
    ("sqrt(x1^2 + 1) + log(x2^2 + 2)", 2),
    ("-x1 + -(x2 * pi)", 2),
    ("2^3 * x1", 1),
]


def fd_gradient(f, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def fd_hessian(f, x, h=1e-4):
    x = np.asarray(x, dtype=float)
    n = len(x)
    H = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            ei = np.zeros(n); ei[i] = h
            ej = np.zeros(n); ej[j] = h
            H[i, j] = (f(x + ei + ej) - f(x + ei - ej)
                       - f(x - ei + ej) + f(x - ei - ej)) / (4 * h * h)
    return H


@pytest.mark.parametrize("text,dim", CASES)
def test_roundtrip(text, dim):
    e = funcexpr.parse(text, dim)
    assert funcexpr.parse(funcexpr.to_string(e), dim) == e


@pytest.mark.parametrize("text,dim", CASES)
def test_gradient_matches_finite_differences(text, dim):
    field = funcexpr.ScalarField.from_text(text, dim)
    rng = np.random.default_rng(11)
    for _ in range(5):
        x = rng.uniform(0.3, 1.2, size=dim)  # keep clear of poles
        g = np.asarray(field.gradient(tuple(x)))
        g_fd = fd_gradient(lambda y: field.value(tuple(y)), x)
        assert np.allclose(g, g_fd, rtol=1e-6, atol=1e-6)


@pytest.mark.parametrize("text,dim", CASES)
def test_hessian_matches_finite_differences(text, dim):
    field = funcexpr.ScalarField.from_text(text, dim)
    rng = np.random.default_rng(12)
    for _ in range(3):
        x = rng.uniform(0.3, 1.2, size=dim)
        H = np.asarray(field.hessian(tuple(x)))
        H_fd = fd_hessian(lambda y: field.value(tuple(y)), x)
        assert np.allclose(H, H_fd, rtol=2e-4, atol=2e-4)
        assert np.allclose(H, H.T)


def test_eval_golden_values():
    assert funcexpr.ScalarField.from_text("cos(2*pi*x1)", 1).value((0.0,)) == 1.0
    assert funcexpr.ScalarField.from_text("x1^2 + x2", 2).value((3.0, 4.0)) == 13.0
    f = funcexpr.ScalarField.from_text("cos(2*pi*x1) + cos(2*pi*x2)", 2)
    assert f.value((0.0, 0.0)) == 2.0
    assert f.value((0.5, 0.5)) == -2.0


def test_differentiate_linearity():
    # d/dx1 of f + g equals df + dg, evaluated pointwise
    f = funcexpr.parse("sin(x1)*x2", 2)
    g = funcexpr.parse("x1^3", 2)
    s = funcexpr.parse("sin(x1)*x2 + x1^3", 2)
    x = (0.7, -1.3)
    lhs = funcexpr.eval_expr(funcexpr.differentiate(s, 0), x)
    rhs = (funcexpr.eval_expr(funcexpr.differentiate(f, 0), x)
           + funcexpr.eval_expr(funcexpr.differentiate(g, 0), x))
    assert math.isclose(lhs, rhs, rel_tol=1e-12)


def test_second_derivatives_commute():
    f = funcexpr.parse("exp(x1*x2) + sin(x1 + 2*x2)", 2)
    d12 = funcexpr.differentiate(funcexpr.differentiate(f, 0), 1)
    d21 = funcexpr.differentiate(funcexpr.differentiate(f, 1), 0)
    for x in [(0.1, 0.2), (1.0, -0.5), (0.33, 0.77)]:
        assert math.isclose(funcexpr.eval_expr(d12, x), funcexpr.eval_expr(d21, x),
                            rel_tol=1e-12)


def test_syntax_error_carries_offset():
    with pytest.raises(ExprSyntaxError) as ei:
        funcexpr.parse("x1 +", 1)
    assert ei.value.position == 4

    with pytest.raises(ExprSyntaxError):
        funcexpr.parse("(x1", 1)
    with pytest.raises(ExprSyntaxError):
        funcexpr.parse("x1 ** 2", 1)
    with pytest.raises(ExprSyntaxError):
        funcexpr.parse("", 1)


def test_exponent_must_be_integer_literal():
    with pytest.raises(ExprSyntaxError):
        funcexpr.parse("x1^x2", 2)
    with pytest.raises(ExprSyntaxError):
        funcexpr.parse("x1^1.5", 1)
    assert funcexpr.eval_expr(funcexpr.parse("x1^-2", 1), (2.0,)) == 0.25


def test_unknown_identifiers():
    with pytest.raises(UnknownIdentifierError):
        funcexpr.parse("x0", 2)
    with pytest.raises(UnknownIdentifierError):
        funcexpr.parse("foo(x1)", 1)
    with pytest.raises(UnknownIdentifierError):
        funcexpr.parse("y + 1", 1)


def test_dimension_check():
    with pytest.raises(DimensionError):
        funcexpr.parse("x3", 2)
    funcexpr.parse("x3", 3)  # fine


def test_domain_errors_at_evaluation():
    f = funcexpr.ScalarField.from_text("1/x1", 1)
    with pytest.raises(DomainError):
        f.value((0.0,))
    g = funcexpr.ScalarField.from_text("log(x1)", 1)
    with pytest.raises(DomainError):
        g.value((-1.0,))
    h = funcexpr.ScalarField.from_text("sqrt(x1)", 1)
    with pytest.raises(DomainError):
        h.value((-4.0,))
