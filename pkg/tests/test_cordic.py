"""CORDIC vectoring against the transcendental oracle."""

import math

import numpy as np

from radarkat.chain import cordic_vectoring
from radarkat.kernels import PI_Q21, Q23_MAX, cordic_vectoring_arr, phase_delta_q21

SCALE = 2.0 ** 23
PHASE_SCALE = 2.0 ** 21
MAG_REL_TOL = 2.0 ** -13
PHASE_TOL_RAD = 2.0 ** -13


def phase_err(actual_raw, expected_rad):
    expected_raw = int(round(expected_rad * PHASE_SCALE))
    return abs(phase_delta_q21(actual_raw, expected_raw)) / PHASE_SCALE


def test_zero_input_defined():
    assert cordic_vectoring(0, 0) == (0, 0)


def test_near_full_scale_on_axis():
    mag, ph = cordic_vectoring(Q23_MAX, 0)
    assert abs(mag - Q23_MAX) <= 2
    assert phase_err(ph, 0.0) <= PHASE_TOL_RAD


def test_three_four_five_triangle_saturates():
    x = round(0.6 * SCALE)
    y = round(0.8 * SCALE)
    mag, ph = cordic_vectoring(x, y)
    assert mag == Q23_MAX  # 1.0 is unrepresentable
    assert phase_err(ph, math.atan2(0.8, 0.6)) <= PHASE_TOL_RAD
    assert abs(ph / PHASE_SCALE - 0.9273) < 1e-3


def test_negative_x_axis_quadrant_correction():
    mag, ph = cordic_vectoring(round(-0.5 * SCALE), 0)
    assert abs(mag - round(0.5 * SCALE)) <= 2
    assert phase_err(ph, math.pi) <= PHASE_TOL_RAD


def test_phase_stays_in_principal_range():
    rng = np.random.default_rng(5)
    ang = rng.uniform(-math.pi, math.pi, size=2000)
    r = rng.uniform(0.01, 0.99, size=2000)
    x = np.round(r * np.cos(ang) * SCALE).astype(np.int64)
    y = np.round(r * np.sin(ang) * SCALE).astype(np.int64)
    _, ph = cordic_vectoring_arr(x, y)
    assert (ph <= PI_Q21).all() and (ph >= -PI_Q21).all()


def test_oracle_sweep():
    rng = np.random.default_rng(123)
    count = 20000
    ang = rng.uniform(-math.pi, math.pi, size=count)
    r = np.sqrt(rng.uniform(0.0, 1.0, size=count)) * (1 - 2.0 ** -9)
    x = np.round(r * np.cos(ang) * SCALE).astype(np.int64)
    y = np.round(r * np.sin(ang) * SCALE).astype(np.int64)
    mag, ph = cordic_vectoring_arr(x, y)

    true_mag = np.hypot(x / SCALE, y / SCALE)
    true_ph = np.arctan2(y / SCALE, x / SCALE)
    nz = (x != 0) | (y != 0)

    strong = nz & (true_mag >= 2.0 ** -10)
    rel = np.abs(mag[strong] / SCALE - true_mag[strong]) / true_mag[strong]
    assert rel.max() <= MAG_REL_TOL

    deltas = np.array(
        [
            abs(phase_delta_q21(int(p), int(round(t * PHASE_SCALE))))
            for p, t in zip(ph[nz], true_ph[nz])
        ]
    )
    assert deltas.max() / PHASE_SCALE <= PHASE_TOL_RAD


def test_quadrants():
    for xs, ys in ((1, 1), (-1, 1), (-1, -1), (1, -1)):
        x = xs * round(0.3 * SCALE)
        y = ys * round(0.4 * SCALE)
        mag, ph = cordic_vectoring(x, y)
        assert abs(mag / SCALE - 0.5) < 1e-4
        assert phase_err(ph, math.atan2(y, x)) <= PHASE_TOL_RAD


def test_tiny_inputs_do_not_blow_up():
    for x, y in ((1, 0), (0, 1), (-1, 0), (0, -1), (1, -1)):
        mag, ph = cordic_vectoring(x, y)
        assert 0 <= mag <= 3
        assert -PI_Q21 <= ph <= PI_Q21
