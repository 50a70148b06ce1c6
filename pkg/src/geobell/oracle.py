"""Dense linear-algebra ground truth for GHZ correlations.

Everything here is brute force on the full d**N amplitude vector. It is slow
on purpose: the closed-form kernels are checked against it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import ScenarioError, _check_d, real_outcome_values

IMAG_TOL = 1e-12


class ConsistencyError(RuntimeError):
    """A quantity that must be real came out with a non-negligible imaginary part."""


@dataclass(frozen=True)
class DenseState:
    amplitudes: np.ndarray
    n: int
    d: int

    def __post_init__(self):
        if self.amplitudes.shape != (self.d ** self.n,):
            raise ValueError("amplitude vector does not match (N, d)")
        norm = np.vdot(self.amplitudes, self.amplitudes).real
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state not normalised (|psi|^2 = {norm})")

    @property
    def dims(self):
        return (self.n, self.d)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.d,) * self.n)


def fourier_matrix(d: int) -> np.ndarray:
    _check_d(d)
    m = np.arange(d)
    return np.exp(2j * np.pi * np.outer(m, m) / d) / np.sqrt(d)


def setting_unitary(d: int, alpha: float) -> np.ndarray:
    """U(alpha) = Diag(1, e^{i alpha}, ..., e^{(d-1) i alpha}) F."""
    phases = np.exp(1j * alpha * np.arange(d))
    return phases[:, None] * fourier_matrix(d)


def real_observable(d: int, alpha: float) -> np.ndarray:
    u = setting_unitary(d, alpha)
    return (u * real_outcome_values(d)) @ u.conj().T


def complex_observable(d: int, alpha: float) -> np.ndarray:
    """U(alpha) Diag(omega^0, ..., omega^{d-1}) U(alpha)^dagger.

    Measuring it and multiplying the results across parties gives omega to the
    power of the label sum.
    """
    u = setting_unitary(d, alpha)
    roots = np.exp(2j * np.pi * np.arange(d) / d)
    return (u * roots) @ u.conj().T


def ghz_state(n: int, d: int, biased: bool = False) -> DenseState:
    _check_d(d)
    if n < 2:
        raise ScenarioError(f"N must be >= 2, got {n}")
    if biased and d < 3:
        raise ScenarioError("biased GHZ state needs d >= 3")
    amps = np.zeros(d ** n, dtype=complex)
    # |j>^{(x)N} sits at flat index j * (1 + d + ... + d^{N-1})
    stride = sum(d ** k for k in range(n))
    start = 1 if biased else 0
    amps[np.arange(start, d) * stride] = 1.0 / np.sqrt(d - start)
    return DenseState(amps, n, d)


def _check_angles(state, angles):
    if len(angles) != state.n:
        raise ValueError(f"expected {state.n} angles, got {len(angles)}")


def apply_local(state: DenseState, ops) -> np.ndarray:
    """(op_1 (x) ... (x) op_N)|state>, returned as an N-index tensor."""
    psi = state.tensor()
    for axis, op in enumerate(ops):
        psi = np.moveaxis(np.tensordot(op, psi, axes=([1], [axis])), 0, axis)
    return psi


def expectation(state: DenseState, ops) -> complex:
    return complex(np.vdot(state.tensor(), apply_local(state, ops)))


def expectation_real(state: DenseState, angles) -> float:
    _check_angles(state, angles)
    val = expectation(state, [real_observable(state.d, a) for a in angles])
    if abs(val.imag) > IMAG_TOL:
        raise ConsistencyError(f"Hermitian expectation has imaginary part {val.imag}")
    return val.real


def expectation_complex(state: DenseState, angles) -> complex:
    _check_angles(state, angles)
    return expectation(state, [complex_observable(state.d, a) for a in angles])


def joint_outcome_distribution(state: DenseState, angles) -> np.ndarray:
    """Born-rule probabilities P[a_1, ..., a_N] for measuring in the columns of U(alpha_i)."""
    _check_angles(state, angles)
    # amplitude <u_a1|...<u_aN|psi> = (U_1^dag (x) ... (x) U_N^dag) psi
    amps = apply_local(state, [setting_unitary(state.d, a).conj().T for a in angles])
    return np.abs(amps) ** 2
