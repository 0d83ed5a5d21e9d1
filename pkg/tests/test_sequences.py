import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import hustab as hs
from hustab.errors import EmptyPeriod, PastEnd, UnknownExample, ZeroCoefficient
from hustab.sequences import coeff_full, spec_from_json, spec_to_json


def test_period3_entry_lookup():
    spec = hs.builtin_example("period3_2_i_third")
    assert hs.coeff_at(spec, 1) == (2 + 0j, 5 + 0j)
    assert hs.coeff_at(spec, 2) == (1j, 5 + 0j)
    assert hs.coeff_at(spec, 3) == (1 / 3 + 0j, 5 + 0j)
    assert hs.coeff_at(spec, 5) == hs.coeff_at(spec, 2)


def test_constant_identity_map():
    spec = hs.builtin_example("constant", a=1, b=0)
    assert hs.coeff_at(spec, 7) == (1 + 0j, 0j)


def test_alternating_fourth_index():
    spec = hs.builtin_example("alternating_2_half")
    assert hs.coeff_at(spec, 4) == (0.5 + 0j, 5 + 0j)
    assert hs.coeff_at(spec, 3) == (2 + 0j, 5 + 0j)


def test_near_parabolic_limit_is_translation_by_minus_two():
    spec = hs.builtin_example("near_parabolic", alpha=0.0)
    a, b = hs.coeff_at(spec, 10**6)
    assert abs(a - 1) < 1e-11
    assert abs(b + 2) < 1e-11
    # each map sends z to a_n (z - 2), so b_n = -2 a_n at every index
    a5, b5 = hs.coeff_at(spec, 5)
    assert b5 == -2 * a5


def test_near_parabolic_rotation():
    spec = hs.builtin_example("near_parabolic", alpha=0.25)
    a, _ = hs.coeff_at(spec, 1000)
    assert a.real == pytest.approx(0.0, abs=1e-9)
    assert a.imag == pytest.approx(1.0, rel=1e-5)


def test_sparse3_squares_values():
    spec = hs.builtin_example("sparse3_squares")
    assert hs.coeff_at(spec, 1)[0] == 3  # 1 = 1^2
    assert hs.coeff_at(spec, 4)[0] == 3  # 4 = 2^2
    assert hs.coeff_at(spec, 5)[0] == 1
    assert hs.coeff_at(spec, 9)[0] == 3
    assert all(hs.coeff_at(spec, n)[1] == 5 for n in (1, 4, 5))


def test_sparse3_periodic_layout():
    spec = hs.builtin_example("sparse3_periodic", p=4)
    assert [hs.coeff_at(spec, n)[0] for n in range(1, 9)] == [1, 1, 1, 3, 1, 1, 1, 3]
    every = hs.builtin_example("sparse3_periodic", p=1)
    assert hs.coeff_at(every, 17)[0] == 3


def test_validate_rejects_zero_coefficient():
    with pytest.raises(ZeroCoefficient):
        hs.periodic_spec([(0.0, 1.0)])
    with pytest.raises(ZeroCoefficient):
        hs.constant_spec(0.0, 1.0)


def test_validate_accepts_alternating_pairs():
    spec = hs.periodic_spec([(2, 5), (0.5, 5)])
    assert hs.validate(spec) is spec


def test_empty_table_and_period_rejected():
    with pytest.raises(EmptyPeriod):
        hs.table_spec([])
    with pytest.raises(EmptyPeriod):
        hs.periodic_spec([])


def test_table_tail_rules():
    spec = hs.table_spec([(2, 1), (3, 1)], tail="error")
    assert hs.coeff_at(spec, 2) == (3 + 0j, 1 + 0j)
    with pytest.raises(PastEnd):
        hs.coeff_at(spec, 3)
    rep = hs.table_spec([(2, 1), (3, 1)], tail="repeat")
    assert hs.coeff_at(rep, 10) == (3 + 0j, 1 + 0j)


def test_unknown_builtin():
    with pytest.raises(UnknownExample):
        hs.builtin_example("no_such_family")


@settings(max_examples=40, deadline=None)
@given(
    entries=st.lists(
        st.tuples(
            st.complex_numbers(min_magnitude=0.1, max_magnitude=8, allow_nan=False, allow_infinity=False),
            st.complex_numbers(max_magnitude=8, allow_nan=False, allow_infinity=False),
        ),
        min_size=1,
        max_size=9,
    ),
    n=st.integers(min_value=1, max_value=500),
)
def test_periodicity_is_exact(entries, n):
    spec = hs.periodic_spec(entries)
    p = spec.period_length
    assert hs.coeff_at(spec, n + p) == hs.coeff_at(spec, n)


def _all_builtins():
    return [
        hs.builtin_example("near_parabolic", alpha=0.0),
        hs.builtin_example("near_parabolic", alpha=1 / 3),
        hs.builtin_example("alternating_2_half"),
        hs.builtin_example("period3_2_i_third"),
        hs.builtin_example("sparse3_periodic", p=3),
        hs.builtin_example("sparse3_squares"),
        hs.builtin_example("constant", a=2, b=5),
    ]


def test_builtins_never_produce_zero_a():
    probes = list(range(1, 2001)) + [10**4, 10**5, 10**6, 999983]
    for spec in _all_builtins():
        for n in probes:
            a, _ = hs.coeff_at(spec, n)
            assert a != 0


def test_near_parabolic_magnitude_sum_bound():
    # sum | |a_n| - 1 | <= sum 3/n^2, checkable per term: |a_n| - 1 = 2/n^2 + 1/n^4
    spec = hs.builtin_example("near_parabolic", alpha=0.7)
    lhs = 0.0
    rhs = 0.0
    for n in range(1, 1001):
        a, _ = hs.coeff_at(spec, n)
        term = abs(abs(a) - 1.0)
        assert term <= 3.0 / n**2 + 1e-15
        lhs += term
        rhs += 3.0 / n**2
    assert lhs <= rhs


def test_exact_log_channel_matches_linear():
    for spec in _all_builtins():
        for n in (1, 2, 17, 100, 9999):
            a, _, la, ang = coeff_full(spec, n)
            assert la == pytest.approx(math.log(abs(a)), abs=1e-14)
            assert math.cos(ang) == pytest.approx((a / abs(a)).real, abs=1e-12)


def test_json_round_trip_all_builtins():
    for spec in _all_builtins():
        doc = json.loads(json.dumps(spec_to_json(spec)))
        back = spec_from_json(doc)
        for n in range(1, 1001):
            assert hs.coeff_at(back, n) == hs.coeff_at(spec, n)


def test_json_round_trip_table():
    spec = hs.table_spec([(2 + 1j, -1), (0.5, 3j)], tail="repeat")
    back = spec_from_json(json.loads(json.dumps(spec_to_json(spec))))
    assert back.tail == "repeat"
    for n in (1, 2, 3, 50):
        assert hs.coeff_at(back, n) == hs.coeff_at(spec, n)
