"""Fixed-point arithmetic: known bit patterns, properties, big-int oracle."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radarkat.fixedpoint import (
    Q0_23,
    Q8_8,
    Q12_4,
    Fixed,
    QFormat,
    decode_word,
    encode_word,
    quantize,
    rne_shift,
    sat_add,
    sat_mul,
    sat_sub,
    to_real,
)


def test_format_widths():
    assert Q12_4.width == 16
    assert Q0_23.width == 24
    assert Q8_8.width == 16
    assert Q12_4.raw_min == -0x8000
    assert Q0_23.raw_max == 0x7FFFFF


def test_bad_formats_rejected():
    with pytest.raises(ValueError):
        QFormat(-1, 4)
    with pytest.raises(ValueError):
        QFormat(20, 20)


def test_quantize_known_patterns():
    assert quantize(1.0, Q12_4).raw == 0x0010
    neg = quantize(-453.0, Q12_4)
    assert neg.raw == -7248
    assert encode_word(neg.raw, 16) == 0xE3B0
    assert quantize(4096.0, Q12_4).raw == 0x7FFF  # positive clamp
    assert quantize(-4096.0, Q12_4).raw == -0x8000


def test_quantize_nan_rejected():
    with pytest.raises(ValueError):
        quantize(float("nan"), Q12_4)


def test_to_real_known_patterns():
    assert to_real(Fixed(0x0010, Q12_4)) == 1.0
    assert to_real(Fixed(decode_word(0xE3B0, 16), Q12_4)) == -453.0
    # 24-bit pattern FF8174 decodes to -32396
    raw = decode_word(0xFF8174, 24)
    assert raw == -32396
    assert to_real(Fixed(raw, Q0_23)) == -32396 / 2**23
    assert to_real(Fixed(raw, Q0_23)) == pytest.approx(-3.862e-3, abs=1e-6)


def test_sat_add_examples():
    a = Fixed(0x7FFF, Q12_4)
    one = Fixed(0x0001, Q12_4)
    assert sat_add(a, one).raw == 0x7FFF
    assert sat_add(Fixed(16, Q12_4), Fixed(-16, Q12_4)).raw == 0
    assert sat_sub(Fixed(-0x8000, Q12_4), one).raw == -0x8000


def test_sat_add_format_mismatch():
    with pytest.raises(ValueError):
        sat_add(Fixed(0, Q12_4), Fixed(0, Q0_23))


def test_sat_mul_examples():
    half = quantize(0.5, Q0_23)
    assert sat_mul(half, half, Q0_23).raw == 0x200000
    neg1 = Fixed(-0x800000, Q0_23)
    assert sat_mul(neg1, neg1, Q0_23).raw == 0x7FFFFF  # +1.0 unrepresentable
    # 0.5 * 3 LSB = 1.5 LSB, round-to-even gives 2
    assert sat_mul(Fixed(0x400000, Q0_23), Fixed(0x000003, Q0_23), Q0_23).raw == 2


def test_rne_shift_ties_to_even():
    assert rne_shift(3, 1) == 2
    assert rne_shift(5, 1) == 2
    assert rne_shift(-3, 1) == -2
    assert rne_shift(-5, 1) == -2
    assert rne_shift(7, 2) == 2
    assert rne_shift(6, 2) == 2


@given(st.integers(min_value=Q12_4.raw_min, max_value=Q12_4.raw_max))
def test_round_trip_representable(raw):
    x = raw / Q12_4.scale
    assert quantize(x, Q12_4).raw == raw
    assert to_real(quantize(x, Q12_4)) == x


@given(st.floats(min_value=-2047.0, max_value=2047.0, allow_nan=False))
def test_quantization_bound(x):
    err = abs(to_real(quantize(x, Q12_4)) - x)
    assert err <= 2.0 ** (-Q12_4.frac_bits - 1)


@given(
    st.integers(min_value=Q0_23.raw_min, max_value=Q0_23.raw_max),
    st.integers(min_value=Q0_23.raw_min, max_value=Q0_23.raw_max),
)
def test_sat_add_commutes_and_never_wraps(a, b):
    fa, fb = Fixed(a, Q0_23), Fixed(b, Q0_23)
    r1 = sat_add(fa, fb)
    r2 = sat_add(fb, fa)
    assert r1 == r2
    assert Q0_23.raw_min <= r1.raw <= Q0_23.raw_max
    # saturation, never wrap: result has the sign of the exact sum
    exact = a + b
    if exact != 0:
        assert (r1.raw >= 0) == (exact > 0) or r1.raw == 0


def _oracle_sat_mul(a_raw, b_raw, in_frac_sum, out_fmt):
    scaled = Fraction(a_raw * b_raw, 1 << (in_frac_sum - out_fmt.frac_bits))
    rounded = round(scaled)  # Fraction round is half-even
    return max(out_fmt.raw_min, min(out_fmt.raw_max, rounded))


@settings(max_examples=300)
@given(
    st.integers(min_value=Q0_23.raw_min, max_value=Q0_23.raw_max),
    st.integers(min_value=Q0_23.raw_min, max_value=Q0_23.raw_max),
)
def test_sat_mul_matches_fraction_oracle(a, b):
    got = sat_mul(Fixed(a, Q0_23), Fixed(b, Q0_23), Q0_23).raw
    assert got == _oracle_sat_mul(a, b, 46, Q0_23)


def test_sat_mul_random_sweep_against_oracle():
    rng = np.random.default_rng(42)
    count = 100_000
    a = rng.integers(Q0_23.raw_min, Q0_23.raw_max + 1, size=count)
    b = rng.integers(Q0_23.raw_min, Q0_23.raw_max + 1, size=count)
    for ar, br in zip(a.tolist(), b.tolist()):
        assert sat_mul(Fixed(ar, Q0_23), Fixed(br, Q0_23), Q0_23).raw == _oracle_sat_mul(
            ar, br, 46, Q0_23
        )


def test_mixed_format_mul():
    # Q0.23 x Q8.8 -> Q0.23: the CFAR threshold scaling path
    mean = quantize(0.01, Q0_23)
    alpha = Fixed(0x0400, Q8_8)  # 4.0
    thr = sat_mul(mean, alpha, Q0_23)
    assert to_real(thr) == pytest.approx(0.04, abs=2e-7)


def test_encode_decode_inverse():
    for width in (16, 24):
        lo = -(1 << (width - 1))
        hi = (1 << (width - 1)) - 1
        for raw in (lo, -1, 0, 1, hi):
            assert decode_word(encode_word(raw, width), width) == raw
