import pytest

from helpers import rand_cyc, rand_jet, rand_nilpotent_field, rand_series, rng_for
from jetgroups import linalg
from jetgroups.coeff import I, SQRT2, Z8, CycRational
from jetgroups.diffeo import JetDiffeo
from jetgroups.errors import MismatchError, ParseError
from jetgroups.parsing import parse, parse_value, tokenize
from jetgroups.render import render, render_diffeo, render_field, render_matrix, render_scalar, render_series
from jetgroups.series import TruncSeries


def test_error_position():
    with pytest.raises(ParseError) as info:
        parse_value("x +", "series", 1, 4)
    assert (info.value.line, info.value.col) == (1, 4)
    assert str(info.value).startswith("1:4:")
    assert info.value.expected


@pytest.mark.parametrize(
    "src, col",
    [("(x", 3), ("2**x", 3), ("x^", 3), ("x $ y", 3), ("d/dq", 1)],
)
def test_error_columns(src, col):
    with pytest.raises(ParseError) as info:
        parse_value(src, "any", 1, 4)
    assert info.value.col == col


def test_error_on_second_line():
    with pytest.raises(ParseError) as info:
        parse_value("(x +\n * y, y)", "diffeo", 2, 3)
    assert (info.value.line, info.value.col) == (2, 2)


def test_kind_mismatches():
    with pytest.raises(ParseError):
        parse_value("x", "scalar")
    with pytest.raises(ParseError):
        parse_value("(x^2)*d/dx", "series")
    with pytest.raises(ParseError):
        parse_value("[[1, 0], [0, 1]]", "diffeo", 2, 3)
    with pytest.raises(MismatchError):
        parse_value("(x, y)", "diffeo", 3, 3)
    with pytest.raises(ParseError):
        parse_value("[[1, 2], [3]]", "matrix")


def test_precedence():
    x = TruncSeries.variable(1, 4, 0)
    assert parse_value("-x^2", "series") == -(x * x)
    assert parse_value("2*x^2/4", "series") == (x * x).scale(CycRational(1) / 2)
    assert parse_value("x - x - x", "series") == -x
    assert parse_value("(1 + x)^2", "series") == TruncSeries.one(1, 4) + x.scale(2) + x * x


def test_constants_and_names():
    assert parse_value("i^2", "scalar") == -1
    assert parse_value("sqrt2^2", "scalar") == 2
    assert parse_value("z8", "scalar") == Z8 and parse_value("zeta8^4", "scalar") == -1
    assert parse_value("x1 + x2", "series", 2, 2) == parse_value("x + y", "series", 2, 2)
    assert parse_value("sqrt2 * i", "scalar") == SQRT2 * I


def test_series_division_and_fields():
    assert parse_value("x/(1 - x)", "series", 1, 3) == parse_value("x + x^2 + x^3", "series", 1, 3)
    X = parse_value("(x^2)*d/dx + x*y*d/dy", "field", 2, 3)
    assert X.components[1] == parse_value("x*y", "series", 2, 3)
    assert parse_value("0", "field", 2, 3).is_zero()


def test_matrices():
    M = parse_value("[[1, 1/2], [i, 0]]", "matrix")
    assert M == linalg.matrix(((1, CycRational(1) / 2), (I, 0)))
    assert parse_value("[[2, 1], [1, 1]]^-1", "matrix") == linalg.inverse(linalg.matrix(((2, 1), (1, 1))))
    assert parse_value("[[1, 1], [0, 1]] * [[1, 0], [1, 1]]", "matrix") == ((2, 1), (1, 1))
    assert parse_value(render_matrix(M), "matrix") == M


def test_bare_series_is_one_variable_jet():
    assert parse_value("x + x^2", "diffeo", 1, 3) == parse_value("(x + x^2)", "diffeo", 1, 3)


def test_round_trip_500_values():
    rng = rng_for(0)
    for j in range(500):
        n, K = rng.randint(1, 3), rng.randint(1, 4)
        kind = j % 4
        if kind == 0:
            c = rand_cyc(rng)
            assert parse_value(render_scalar(c), "scalar") == c
        elif kind == 1:
            f = rand_series(rng, n, K)
            assert parse_value(render_series(f), "series", n, K) == f
        elif kind == 2:
            phi = rand_jet(rng, n, K, rational=False)
            assert parse_value(render_diffeo(phi), "diffeo", n, K) == phi
        else:
            X = rand_nilpotent_field(rng, n, K, rational=False)
            assert parse_value(render_field(X), "field", n, K) == X


def test_parser_is_deterministic():
    src = "(x + 1/3*x*y - i*y^2, y + z8*x^2)"
    assert parse(src) == parse(src)
    a, b = parse_value(src, "diffeo", 2, 3), parse_value(src, "diffeo", 2, 3)
    assert a == b and render(a) == render(b)
    assert [t.kind for t in tokenize(src)] == [t.kind for t in tokenize(src)]


def test_identity_render():
    assert render(JetDiffeo.identity(2, 3)) == "(x, y)"
