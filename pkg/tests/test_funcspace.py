import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chordlab.diagram import make_diagram
from chordlab.expr import (EvaluationDomainError, ExpressionSyntaxError, UnknownFunction,
                           compile_numpy, evaluate, parse_expr, to_source)
from chordlab.funcspace import (ExactnessViolation, InvalidDimension,
                                PreconditionViolation, basis_from_spec, codimension_in,
                                eval_matrix, load_basis, parse_basis, polynomial_space,
                                random_nonresonant_diagram, verify_prop1)
from oracles import eval_rows, fraction_rank


def test_parse_polynomial_basis():
    b = parse_basis("x, x^2, x^3")
    assert b.exact and b.N == 3


def test_parse_transcendental_basis():
    b = parse_basis("sin(x), x*exp(x)")
    assert not b.exact and b.N == 2


@pytest.mark.parametrize("text,offset", [("x +", 3), ("x, (x", 5), ("x $ 2", 2),
                                         ("x, x^", 5), ("2 x", 2)])
def test_syntax_error_offsets(text, offset):
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_basis(text)
    assert info.value.offset == offset


def test_unknown_function_and_symbol():
    with pytest.raises(UnknownFunction):
        parse_basis("tan(x)")
    with pytest.raises(ExpressionSyntaxError):
        parse_basis("y + 1")


def test_comments_newlines_and_nested_commas(tmp_path):
    text = "# a test space\nx   # first\nx^2, abs(x)\n"
    b = parse_basis(text)
    assert b.sources == ("x", "x^2", "abs(x)")
    assert b.exact  # abs maps rationals to rationals
    p = tmp_path / "space.txt"
    p.write_text(text)
    assert load_basis(p).N == 3 and load_basis(p).name == "space"
    assert basis_from_spec(str(p)).N == 3
    assert basis_from_spec("pp:3").name == "PP^3"
    assert basis_from_spec("expr:x, x^3").N == 2


def test_power_alias_and_negative_exponent():
    assert evaluate(parse_expr("x**3"), Fraction(2)) == 8
    assert evaluate(parse_expr("x^-2"), Fraction(2)) == Fraction(1, 4)
    assert evaluate(parse_expr("-x^2"), Fraction(3)) == -9


def test_domain_errors():
    with pytest.raises(EvaluationDomainError):
        evaluate(parse_expr("log(x)"), -1.0)
    with pytest.raises(EvaluationDomainError):
        evaluate(parse_expr("1/x"), Fraction(0))
    b = parse_basis("x, log(x)")
    with pytest.raises(EvaluationDomainError):
        eval_matrix(make_diagram([(-1, 2)]), b, "float")


def test_polynomial_space():
    assert polynomial_space(2).sources == ("x", "x^2")
    assert polynomial_space(5).N == 5
    with pytest.raises(InvalidDimension):
        polynomial_space(0)


def test_eval_matrix_examples():
    pp2 = polynomial_space(2)
    assert eval_matrix(make_diagram([(-1, 1)]), pp2).rows == ((2, 0),)
    assert eval_matrix(make_diagram([]), pp2).shape == (0, 2)
    rows = eval_matrix(make_diagram([(0, 2), (-1, 3)]), pp2).rows
    assert sorted(rows) == [(2, 4), (4, 8)]


def test_exactness_violations():
    with pytest.raises(ExactnessViolation):
        eval_matrix(make_diagram([(0, 1)]), parse_basis("sin(x)"), "exact")
    with pytest.raises(ExactnessViolation):
        eval_matrix(make_diagram([(0.5, 1.0)]), polynomial_space(2), "exact")


def test_codimension_examples():
    assert codimension_in(make_diagram([(-1, 1), (-2, 2)]), polynomial_space(2)) == 1
    d = make_diagram([(-1, 1), (-2, 2), (-3, 3)])
    assert codimension_in(d, polynomial_space(4)) == 2
    assert codimension_in(d, polynomial_space(4), "float") == 2


def test_nonresonant_three_diagrams_in_pp5():
    rng = random.Random(3)
    for _ in range(100):
        d = random_nonresonant_diagram(rng, 3)
        assert codimension_in(d, polynomial_space(5)) == 3


rational = st.fractions(min_value=-6, max_value=6, max_denominator=8)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(rational, rational).filter(lambda p: p[0] != p[1]),
                min_size=1, max_size=4, unique_by=lambda p: frozenset(p)),
       st.integers(1, 6))
def test_rank_matches_independent_evaluation(pairs, N):
    d = make_diagram(pairs)
    assert codimension_in(d, polynomial_space(N)) == fraction_rank(eval_rows(pairs, N))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=6))
def test_numpy_compiler_agrees_with_interpreter(xs):
    for src in ("x^3 - 2*x + 1/3", "sin(x)*exp(-x^2)", "abs(x) - x^2/3", "cos(2*x)"):
        node = parse_expr(src)
        f = compile_numpy(node)
        got = f(np.array(xs))
        want = [evaluate(node, float(x)) for x in xs]
        assert np.allclose(got, want, rtol=1e-12, atol=1e-12)
        # the printed form parses back to the same function
        assert evaluate(parse_expr(to_source(node)), 0.7) == pytest.approx(
            evaluate(node, 0.7))


@pytest.mark.parametrize("n,N", [(3, 5), (2, 3), (4, 7)])
def test_verify_prop1(n, N):
    rep = verify_prop1(n, N, 300, seed=11)
    assert rep.ok and rep.counts["trials"] == 300


def test_verify_prop1_precondition():
    with pytest.raises(PreconditionViolation):
        verify_prop1(3, 4, 10, seed=0)
