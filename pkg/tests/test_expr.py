import numpy as np
import pytest

from rjd.expr import ExpressionError, compile_expression


@pytest.mark.parametrize(
    "body,x,expected",
    [
        ("-2", 3.0, -2.0),
        ("x", 1.5, 1.5),
        ("abs(x - 1)", 0.25, 0.75),
        ("exp(-x) + x^2", 1.0, np.exp(-1.0) + 1.0),
        ("min(x, 2, 5)", 3.0, 2.0),
        ("max(0, x - 1)", 0.5, 0.0),
        ("log(x) / 2", np.e, 0.5),
        ("1 / (1 + x)", 1.0, 0.5),
    ],
)
def test_expression_values(body, x, expected):
    fn = compile_expression(body)
    assert fn(x) == pytest.approx(expected, rel=1e-12)


def test_vectorized_evaluation():
    fn = compile_expression("abs(x - 1) + 2")
    xs = np.array([0.0, 1.0, 3.5])
    np.testing.assert_allclose(fn(xs), [3.0, 2.0, 4.5])
    assert isinstance(fn(1.0), float)


def test_constant_broadcasts_over_arrays():
    fn = compile_expression("-2")
    assert fn(np.zeros(4)).shape == (4,)


@pytest.mark.parametrize(
    "body",
    [
        "y + 1",            # unknown variable
        "sin(x)",           # unknown function
        "x // 2",           # unsupported operator
        "__import__('os')", # not even close
        "min(x)",           # arity
        "x +",              # syntax error
    ],
)
def test_rejects_bad_expressions(body):
    with pytest.raises(ExpressionError):
        compile_expression(body)
