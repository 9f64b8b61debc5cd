import math

import pytest
from hypothesis import given, strategies as st

from pmelab import (
    ExponentInputs,
    InvalidArgument,
    aniso_exponents,
    averaging_exponents,
    corollary_exponents,
    exponent_table,
    isotropic_pme_exponents,
    pme_limit_inputs,
    write_exponent_echo,
)
from pmelab.exponents import ECHO_COLUMNS
from pmelab.utils import read_csv

exponents = st.floats(1.05, 8.0)


@given(exponents)
def test_pme_limit(m):
    theta, s_star, p_star = averaging_exponents(pme_limit_inputs(m))
    assert theta == pytest.approx(1.0 / m)
    assert s_star == pytest.approx(2.0 / m)
    assert p_star == pytest.approx(m)


@given(exponents)
def test_white_noise_loses_half_a_derivative(m):
    result = averaging_exponents(pme_limit_inputs(m, eta=0.5))
    assert result.s_star == pytest.approx(3.0 / (2.0 * m))
    assert result.p_star == pytest.approx(m)


@given(st.floats(0.1, 10.0), st.floats(0.1, 5.0), st.floats(0.0, 1.0))
def test_corollary(alpha, beta, lam):
    theta, s_star, p_star = corollary_exponents(alpha, beta, lam)
    assert theta == pytest.approx(alpha / (alpha + 1.0))
    assert s_star == pytest.approx(alpha * (beta - lam) / (alpha + 1.0))
    assert p_star == pytest.approx((2.0 * alpha + 2.0) / (2.0 * alpha + 1.0))


def test_corollary_unit_case():
    assert corollary_exponents(1.0, 2.0) == pytest.approx((0.5, 1.0, 4.0 / 3.0))


def test_isotropic_reduces_to_limit():
    assert isotropic_pme_exponents(3.0, 1.0) == pytest.approx(averaging_exponents(pme_limit_inputs(3.0)))
    smaller = isotropic_pme_exponents(3.0, 0.5)
    assert smaller.s_star < 2.0 / 3.0
    with pytest.raises(InvalidArgument):
        isotropic_pme_exponents(3.0, 1.5)


def test_aniso():
    s_star, p_star = aniso_exponents([2.0, 3.0])
    assert s_star == pytest.approx(1.0 / 3.0)
    assert p_star == pytest.approx(1.5)
    assert aniso_exponents([2.0, 2.0]) == pytest.approx((1.0, 4.0 / 3.0))
    assert aniso_exponents([3.0, 3.0], [1.0, 1.0])[0] == 0.0


@pytest.mark.parametrize('m_list', [[], [0.5, 2.0], [1.0, 1.0]])
def test_aniso_rejects(m_list):
    with pytest.raises(InvalidArgument):
        aniso_exponents(m_list)


@pytest.mark.parametrize('kwargs', [
    dict(alpha=0.0, beta=1.0),
    dict(alpha=1.0, beta=-1.0),
    dict(alpha=1.0, beta=1.0, mu=1.5),
    dict(alpha=1.0, beta=1.0, lam=-0.1),
    dict(alpha=1.0, beta=1.0, q=3.0, p=2.0),
    dict(alpha=1.0, beta=1.0, r=3.0, p=2.0),
])
def test_inputs_validation(kwargs):
    with pytest.raises(InvalidArgument):
        averaging_exponents(ExponentInputs(**kwargs))


def test_infinite_p_star():
    result = averaging_exponents(ExponentInputs(1.0, 1.0, q=math.inf, p=math.inf, r=1.0))
    assert math.isinf(result.p_star)


def test_exponent_table():
    rows = exponent_table([2.0, 4.0])
    assert rows == [(2.0, 1.0, 2.0, 2.0 / 3.0), (4.0, 0.5, 4.0, 0.4)]
    assert all(row[1] > row[3] for row in rows)
    with pytest.raises(InvalidArgument):
        exponent_table([1.0])


def test_echo(tmp_path):
    inputs = pme_limit_inputs(2.0)
    path = tmp_path / 'echo.csv'
    write_exponent_echo(path, [(inputs, averaging_exponents(inputs))])
    rows = read_csv(path)
    assert tuple(rows[0]) == ECHO_COLUMNS
    assert float(rows[0]['s_star']) == 1.0
    assert rows[0]['p'] == 'inf'
