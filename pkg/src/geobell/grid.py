"""Settings grid, correlation tensors over it, and the geometric scalar product.

Observer i measures at the dL angles ``offset_i + 2 pi t / (dL)``, t = 0..dL-1.
Grid index t encodes basis k = t mod L and detector relabeling j = t // L, so
``alpha(j, k) = 2 pi (k/L + j) / d``. Tensors are stored as numpy arrays with
one axis per observer (plus a trailing component axis for vector entries).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import oracle
from .kernels import quantum_kernel
from .scenario import (
    OffsetConvention,
    Scenario,
    ScenarioError,
    Strategy,
    dichotomic_values,
    vector_outcomes,
)

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class SettingsGrid:
    angles: np.ndarray  # (N, dL), not reduced mod 2 pi
    step: float
    offsets: np.ndarray  # (N,)

    @property
    def size(self) -> int:
        return self.angles.shape[1]


def observer_offsets(scenario: Scenario) -> np.ndarray:
    offsets = np.zeros(scenario.n)
    if scenario.n % 2 == 0:
        if scenario.offset is OffsetConvention.HALF_GRID_STEP:
            offsets[0] = np.pi / scenario.grid_size
        elif scenario.offset is OffsetConvention.LITERAL:
            offsets[0] = 1.0 / (2 * scenario.d)
    return offsets


def build_grid(scenario: Scenario) -> SettingsGrid:
    if not scenario.finite:
        raise ScenarioError("settings grid needs finite L")
    size = scenario.grid_size
    step = TWO_PI / size
    offsets = observer_offsets(scenario)
    angles = offsets[:, None] + step * np.arange(size)[None, :]
    return SettingsGrid(angles, step, offsets)


def aggregate_angles(scenario: Scenario) -> np.ndarray:
    """alpha' for each total grid index T = sum_i t_i mod dL."""
    size = scenario.grid_size
    return observer_offsets(scenario).sum() + TWO_PI * np.arange(size) / size


def quantum_profile(scenario: Scenario) -> np.ndarray:
    """Kernel values indexed by the total grid index T; shape (dL,) or (dL, d-1)."""
    return quantum_kernel(
        scenario.strategy, scenario.d, scenario.n, scenario.biased, aggregate_angles(scenario)
    )


@dataclass
class CorrelationTensor:
    scenario: Scenario
    values: np.ndarray

    @property
    def kind(self) -> str:
        if self.scenario.strategy is Strategy.VECTOR:
            return "vector"
        if self.scenario.strategy is Strategy.COMPLEX:
            return "complex"
        return "real"

    @property
    def grid_shape(self) -> tuple:
        return (self.scenario.grid_size,) * self.scenario.n


def _total_index(n, size):
    idx = np.indices((size,) * n).sum(axis=0)
    return idx % size


def quantum_tensor(scenario: Scenario, use_oracle: bool = False) -> CorrelationTensor:
    """Quantum correlation tensor over the full (dL)^N grid.

    With ``use_oracle`` every entry comes from a dense expectation value instead
    of a kernel; only sensible for small scenarios.
    """
    if not use_oracle:
        values = quantum_profile(scenario)[_total_index(scenario.n, scenario.grid_size)]
        return CorrelationTensor(scenario, values)

    grid = build_grid(scenario)
    state = oracle.ghz_state(scenario.n, scenario.d, scenario.biased)
    shape = (grid.size,) * scenario.n
    strat = scenario.strategy
    if strat is Strategy.VECTOR:
        values = np.zeros(shape + (scenario.d - 1,))
    else:
        values = np.zeros(shape, dtype=complex if strat is Strategy.COMPLEX else float)
    d = scenario.d
    sums = np.indices((d,) * scenario.n).sum(axis=0) % d
    class_values = {
        Strategy.DICHOTOMIC: dichotomic_values(d),
        Strategy.VECTOR: vector_outcomes(d),
    }
    for idx in itertools.product(range(grid.size), repeat=scenario.n):
        angles = [grid.angles[i, t] for i, t in enumerate(idx)]
        if strat is Strategy.REAL:
            values[idx] = oracle.expectation_real(state, angles)
        elif strat is Strategy.COMPLEX:
            values[idx] = oracle.expectation_complex(state, angles)
        else:
            probs = oracle.joint_outcome_distribution(state, angles)
            per_class = np.bincount(sums.ravel(), weights=probs.ravel(), minlength=d)
            values[idx] = per_class @ class_values[strat]
    return CorrelationTensor(scenario, values)


def dot_product(a: CorrelationTensor, b: CorrelationTensor) -> float:
    """Geometric scalar product a . b with unit weights.

    For complex entries the second argument (the LHV side) is conjugated and
    the real part taken.
    """
    if a.values.shape != b.values.shape or a.kind != b.kind:
        raise ValueError("tensors have different shapes or entry kinds")
    if a.kind == "complex":
        return float(np.real(np.vdot(b.values, a.values)))
    return float(np.sum(a.values * b.values))


def complex_overlap(a: CorrelationTensor, b: CorrelationTensor) -> complex:
    """sum conj(b) * a without taking the real part."""
    if a.values.shape != b.values.shape:
        raise ValueError("tensors have different shapes")
    return complex(np.vdot(b.values, a.values))


def quantum_norm(scenario: Scenario) -> float:
    """E_QM . E_QM, using that each total index T occurs (dL)^(N-1) times."""
    prof = quantum_profile(scenario)
    sq = np.abs(prof) ** 2
    if sq.ndim == 2:
        sq = sq.sum(axis=1)
    return float(sq.sum() * scenario.grid_size ** (scenario.n - 1))


def dump_tensor(tensor: CorrelationTensor, stream) -> None:
    """Write one line per grid entry: index tuple, alpha', value."""
    grid = build_grid(tensor.scenario)
    stream.write("# index\talpha_prime\tvalue\n")
    for idx in np.ndindex(*tensor.grid_shape):
        alpha = sum(grid.angles[i, t] for i, t in enumerate(idx))
        val = tensor.values[idx]
        if tensor.kind == "vector":
            text = " ".join(f"{x:.15g}" for x in val)
        elif tensor.kind == "complex":
            text = f"{val.real:.15g}{val.imag:+.15g}j"
        else:
            text = f"{val:.15g}"
        stream.write(f"{','.join(map(str, idx))}\t{alpha:.15g}\t{text}\n")
