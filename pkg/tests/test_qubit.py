import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qclvol import qubit
from qclvol.errors import InvalidArgumentError
from qclvol.qubit import ONE, ZERO, CircuitParams, QubitState

from oracles import ry_np, rz_np, u_np

angles = st.floats(-20.0, 20.0, allow_nan=False)


def close_u(u, arr, tol=1e-12):
    return np.max(np.abs(u.as_array() - arr)) < tol


def test_ry_zero_is_identity():
    assert qubit.ry(0.0) == qubit.IDENTITY


def test_ry_half_turn_flips():
    s = qubit.apply(qubit.ry(math.pi), ZERO)
    assert qubit.prob0(s) == pytest.approx(0.0, abs=1e-30)
    assert abs(abs(s.a1) - 1) < 1e-15


def test_ry_quarter_turn():
    s = qubit.apply(qubit.ry(math.pi / 2), ZERO)
    ref = ry_np(math.pi / 2) @ np.array([1, 0])
    assert abs(s.a0 - ref[0]) < 1e-15 and abs(s.a1 - ref[1]) < 1e-15
    assert s.a0 == pytest.approx(1 / math.sqrt(2)) and s.a1 == pytest.approx(1 / math.sqrt(2))
    assert qubit.prob0(s) == pytest.approx(0.5, abs=1e-15)


@given(angles)
def test_rz_keeps_zero_state(a):
    assert qubit.prob0(qubit.apply(qubit.rz(a), ZERO)) == pytest.approx(1.0, abs=1e-15)


def test_rz_entries():
    u = qubit.rz(math.pi / 3)
    assert abs(u.u00 - complex(math.sqrt(3) / 2, -0.5)) < 1e-15
    assert abs(u.u11 - complex(math.sqrt(3) / 2, 0.5)) < 1e-15
    assert u.u01 == 0 and u.u10 == 0
    assert qubit.rz(0.0) == qubit.IDENTITY


def test_u_gate_special_cases():
    assert qubit.u_gate(CircuitParams(0, 0, 0)) == qubit.IDENTITY
    assert qubit.prob0(qubit.apply(qubit.u_gate(CircuitParams(math.pi, 0, 0)), ZERO)) < 1e-30


@given(angles, angles, angles)
def test_u_gate_matches_matrix(t, l, p):
    assert close_u(qubit.u_gate(CircuitParams(t, l, p)), u_np(t, l, p), 1e-14)


def test_u_gate_unitary_on_random_params():
    rng = np.random.default_rng(11)
    for t, l, p in rng.uniform(-10, 10, (1000, 3)):
        assert qubit.u_gate(CircuitParams(t, l, p)).unitarity_error() < 1e-12


@given(angles)
def test_rotations_match_matrices(a):
    assert close_u(qubit.ry(a), ry_np(a))
    assert close_u(qubit.rz(a), rz_np(a))


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_non_finite_angles_rejected(bad):
    with pytest.raises(InvalidArgumentError):
        qubit.ry(bad)
    with pytest.raises(InvalidArgumentError):
        qubit.rz(bad)
    with pytest.raises(InvalidArgumentError):
        qubit.u_gate(CircuitParams(0.0, bad, 0.0))


def test_prob0_basis_states():
    assert qubit.prob0(ZERO) == 1.0
    assert qubit.prob0(ONE) == 0.0
    plus = QubitState(1 / math.sqrt(2), 1 / math.sqrt(2))
    assert qubit.prob0(plus) == pytest.approx(0.5, abs=1e-15)


def test_unnormalized_state_rejected():
    with pytest.raises(InvalidArgumentError):
        QubitState(1.0, 1.0)


def test_apply_identity():
    s = QubitState(0.6, 0.8j)
    assert qubit.apply(qubit.IDENTITY, s) == s


@settings(max_examples=200)
@given(st.lists(st.tuples(st.sampled_from("yzu"), angles, angles, angles), min_size=1, max_size=12))
def test_norm_preserved_over_gate_sequences(seq):
    s = ZERO
    for kind, a, b, c in seq:
        g = {"y": lambda: qubit.ry(a), "z": lambda: qubit.rz(a),
             "u": lambda: qubit.u_gate(CircuitParams(a, b, c))}[kind]()
        s = qubit.apply(g, s)
        assert abs(s.norm2 - 1) < 1e-12
    assert abs(qubit.prob0(s) + abs(s.a1) ** 2 - 1) < 1e-12


@given(angles, angles, angles, angles)
def test_composition(a, b, c, d):
    A = qubit.ry(a) @ qubit.rz(b)
    B = qubit.u_gate(CircuitParams(b, c, d))
    s = qubit.apply(qubit.ry(c), ZERO)
    lhs = qubit.apply(B, qubit.apply(A, s))
    rhs = qubit.apply(B @ A, s)
    assert abs(lhs.a0 - rhs.a0) < 1e-12 and abs(lhs.a1 - rhs.a1) < 1e-12


def test_canonical_params():
    p = CircuitParams(-0.5, 7.0, 2 * math.pi).canonical()
    assert all(0 <= a < 2 * math.pi for a in p)
    assert p.theta == pytest.approx(2 * math.pi - 0.5)
    assert p.lam == pytest.approx(7.0 - 2 * math.pi)


def test_apply_batch_matches_scalar():
    rng = np.random.default_rng(3)
    amps = rng.normal(size=(20, 2)) + 1j * rng.normal(size=(20, 2))
    amps /= np.linalg.norm(amps, axis=1, keepdims=True)
    u = qubit.u_gate(CircuitParams(0.3, 1.2, -0.7))
    out = qubit.apply_batch(u, amps)
    for row, o in zip(amps, out):
        s = qubit.apply(u, QubitState(row[0], row[1]))
        assert abs(s.a0 - o[0]) < 1e-14 and abs(s.a1 - o[1]) < 1e-14
