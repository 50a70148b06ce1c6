"""Deterministic local hidden variable models and the search for the best one.

A model fixes, for every observer i and basis k, an offset c in Z_d; the
detector label at grid point (j, k) is then ``(c - j) mod d``. Shifting an
angle by 2 pi / d therefore lowers the label by one, so the relabeling
constraint holds for every model by construction.

The LHV overlap with the quantum tensor is evaluated without materialising
either tensor. Writing the strategy's outcome function of the label sum in
its Fourier series turns every strategy into a sum of "channels"

    z = sum_c sum_t A_c[T(t)] prod_i phi_c(a_i(t_i)),   T(t) = sum_i t_i mod dL,

which is a chain of cyclic convolutions over the grid. With all observers but
one fixed, z is linear in that observer's per-basis choices, which gives an
exact coordinate step.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
from dataclasses import dataclass

import numpy as np

from .grid import CorrelationTensor, build_grid, quantum_norm, quantum_profile
from .kernels import quantum_kernel
from .scenario import (
    Scenario,
    ScenarioError,
    Strategy,
    complex_outcome_value,
    dichotomic_values,
    real_outcome_values,
    vector_outcomes,
)

log = logging.getLogger(__name__)

EXHAUSTIVE_CAP = 10 ** 7
DEFAULT_RESTARTS = 64
REL_TOL = 1e-11

EXHAUSTIVE = "exhaustive"
ASCENT = "ascent"
PACKED = "packed"
AUTO = "auto"

# how the complex-strategy overlap is turned into a number to maximise
MODULUS = "modulus"
REAL_PART = "real-part"


class InfeasibleError(RuntimeError):
    """Exhaustive search would enumerate more models than the cap allows."""


@dataclass(frozen=True)
class LhvModel:
    offsets: np.ndarray  # (N, L) integers in Z_d

    def __post_init__(self):
        object.__setattr__(self, "offsets", np.asarray(self.offsets, dtype=int))

    @property
    def n(self):
        return self.offsets.shape[0]

    def labels(self, d: int) -> np.ndarray:
        """Detector label for each observer and grid index, shape (N, dL)."""
        l = self.offsets.shape[1]
        t = np.arange(d * l)
        return (self.offsets[:, t % l] - t // l) % d

    def to_list(self):
        return self.offsets.tolist()


@dataclass
class ViolationReport:
    scenario: Scenario
    quantum_norm: float
    lhv_max: float
    ratio: float
    best_model: LhvModel
    optimizer: str
    restarts_used: int = 0
    seed: int | None = None
    overlap: complex = 0j
    objective: str = REAL_PART

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.to_record(),
            "quantum_norm": self.quantum_norm,
            "lhv_max": self.lhv_max,
            "ratio": self.ratio,
            "best_model": self.best_model.to_list(),
            "optimizer": self.optimizer,
            "restarts": self.restarts_used,
            "seed": self.seed,
            "objective": self.objective,
            "overlap": [self.overlap.real, self.overlap.imag],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    csv_header = "n,d,l,state,strategy,optimizer,ratio"

    def csv_row(self) -> str:
        s = self.scenario
        return f"{s.n},{s.d},{s.l},{s.state.value},{s.strategy.value},{self.optimizer},{self.ratio:.3f}"


def _roots(d):
    return np.array([complex_outcome_value(d, a) for a in range(d)])


def lhv_tensor(model: LhvModel, scenario: Scenario) -> CorrelationTensor:
    """Full LHV correlation tensor; entries are products or functions of the label sum."""
    d, n = scenario.d, scenario.n
    if model.offsets.shape != (n, scenario.l):
        raise ValueError(f"model shape {model.offsets.shape} does not match N={n}, L={scenario.l}")
    labels = model.labels(d)
    size = scenario.grid_size
    strat = scenario.strategy
    if strat is Strategy.REAL:
        vals = real_outcome_values(d)[labels]
        out = vals[0]
        for i in range(1, n):
            out = np.multiply.outer(out, vals[i])
        return CorrelationTensor(scenario, out)
    # label sum over the whole grid, mod d
    total = labels[0]
    for i in range(1, n):
        total = np.add.outer(total, labels[i])
    total = total % d
    if strat is Strategy.COMPLEX:
        out = _roots(d)[total]
    elif strat is Strategy.DICHOTOMIC:
        out = dichotomic_values(d)[total]
    else:
        out = vector_outcomes(d)[total]
    assert out.shape[:n] == (size,) * n
    return CorrelationTensor(scenario, out)


class Objective:
    """Channel form of the overlap between a scenario's quantum tensor and LHV models."""

    def __init__(self, scenario: Scenario, complex_objective: str = MODULUS):
        if not scenario.finite:
            raise ScenarioError("LHV optimisation needs finite L")
        self.scenario = scenario
        d, l = scenario.d, scenario.l
        self.d, self.l, self.n = d, l, scenario.n
        self.size = d * l
        prof = quantum_profile(scenario)
        strat = scenario.strategy
        if strat is Strategy.REAL:
            amps = np.asarray(prof, dtype=complex)[None, :]
            phis = real_outcome_values(d)[None, :].astype(complex)
        else:
            # h[T, s]: inner product of the quantum entry at T with the LHV outcome for sum s
            if strat is Strategy.COMPLEX:
                h = prof[:, None] * _roots(d).conj()[None, :]
            elif strat is Strategy.DICHOTOMIC:
                h = prof[:, None] * dichotomic_values(d)[None, :]
            else:
                h = prof @ vector_outcomes(d).T
            # h[T, s] = sum_q hat[T, q] omega^{q s}
            hat = np.fft.fft(h, axis=1) / d
            scale = np.abs(hat).max()
            keep = [q for q in range(d) if np.abs(hat[:, q]).max() > 1e-13 * scale]
            amps = hat[:, keep].T
            roots = _roots(d)
            phis = np.array([roots[(q * np.arange(d)) % d] for q in keep])
        self.amps = amps  # (C, dL)
        self.phis = phis  # (C, d)
        self.mode = MODULUS if (strat is Strategy.COMPLEX and complex_objective == MODULUS) else REAL_PART
        t = np.arange(self.size)
        # circ[c, t, u] = amps[c, (t + u) mod dL]
        self.circ = amps[:, (t[:, None] + t[None, :]) % self.size]
        cv = np.arange(d)
        # phi_by_offset[c, v, j] = phi_c((v - j) mod d)
        self.phi_by_offset = phis[:, (cv[:, None] - cv[None, :]) % d]
        self._t_basis = t % l
        self._t_shift = t // l

    # local factors -----------------------------------------------------
    def local(self, offsets: np.ndarray) -> np.ndarray:
        """phi_c(label) over the grid for one or many offset vectors: (..., C, dL)."""
        offsets = np.asarray(offsets)
        labels = (offsets[..., self._t_basis] - self._t_shift) % self.d
        return np.moveaxis(self.phis[:, labels], 0, -2)

    @staticmethod
    def convolve(x, y):
        return np.fft.ifft(np.fft.fft(x, axis=-1) * np.fft.fft(y, axis=-1), axis=-1)

    def _product(self, locals_):
        out = locals_[0]
        for y in locals_[1:]:
            out = self.convolve(out, y)
        return out

    # evaluation --------------------------------------------------------
    def overlap(self, offsets) -> complex:
        """sum over the grid of conj(E_LR) * E_QM (real for all but the complex strategy)."""
        offsets = np.asarray(offsets)
        total = self._product([self.local(o) for o in offsets])
        return complex(np.sum(self.amps * total))

    def score(self, z):
        return np.abs(z) if self.mode == MODULUS else np.real(z)

    def value(self, offsets) -> float:
        return float(self.score(self.overlap(offsets)))

    def _choice_table(self, others):
        """W[..., k, v]: overlap contribution of basis k when the free observer picks offset v."""
        bvec = np.einsum("ctu,...cu->...ct", self.circ, others)
        bk = bvec.reshape(bvec.shape[:-1] + (self.d, self.l))
        return np.einsum("cvj,...cjk->...kv", self.phi_by_offset, bk)

    def best_response(self, others):
        """Exact optimum for one observer given the convolution of all others.

        ``others`` has shape (..., C, dL); returns (offsets (..., L), overlap (...)).
        """
        w = self._choice_table(others)
        if self.mode == MODULUS:
            return max_modulus_choice(w)
        re = w.real
        best = re.max(axis=-1, keepdims=True)
        tol = REL_TOL * max(1.0, float(np.abs(re).max()))
        choice = np.argmax(re >= best - tol, axis=-1)
        z = np.take_along_axis(w, choice[..., None], axis=-1)[..., 0].sum(axis=-1)
        return choice, z


def max_modulus_choice(w: np.ndarray):
    """Pick one column per row of w (..., L, d) maximising |sum of picked entries|.

    The maximiser of Re(e^{-i theta} sum) only changes where two entries of a
    row tie in direction theta, so sweeping one direction per arc between those
    breakpoints covers every candidate.
    """
    batch = w.shape[:-2]
    l, d = w.shape[-2:]
    iu, ju = np.triu_indices(d, 1)
    diffs = (w[..., iu] - w[..., ju]).reshape(batch + (-1,))
    base = np.angle(diffs)
    br = np.concatenate([base + np.pi / 2, base - np.pi / 2, np.zeros(batch + (1,))], axis=-1)
    br = np.sort(np.mod(br, 2 * np.pi), axis=-1)
    gaps = np.diff(np.concatenate([br, br[..., :1] + 2 * np.pi], axis=-1), axis=-1)
    mids = br + gaps / 2  # (..., P)
    rot = np.exp(-1j * mids)
    proj = np.real(rot[..., :, None, None] * w[..., None, :, :])  # (..., P, L, d)
    pick = np.argmax(proj, axis=-1)  # (..., P, L)
    picked = np.take_along_axis(np.broadcast_to(w[..., None, :, :], proj.shape), pick[..., None], axis=-1)[..., 0]
    sums = picked.sum(axis=-1)  # (..., P)
    best = np.argmax(np.abs(sums), axis=-1)
    choice = np.take_along_axis(pick, best[..., None, None], axis=-2)[..., 0, :]
    z = np.take_along_axis(sums, best[..., None], axis=-1)[..., 0]
    return choice, z


def _sum_symmetric(scenario):
    # outcome depends on labels only through their sum: moving +1 from observer 0
    # to the last observer leaves every entry unchanged
    return scenario.strategy is not Strategy.REAL


def _better(val, best):
    if best == -math.inf:
        return True
    return val > best + REL_TOL * max(1.0, abs(best))


def _finish(scenario, objective, offsets, optimizer, restarts=0, seed=None) -> ViolationReport:
    z = objective.overlap(offsets)
    lhv_max = float(objective.score(z))
    qn = quantum_norm(scenario)
    # the kernels peak at alpha' = 0; anything below rounding of that scale is zero
    peak = float(np.linalg.norm(np.atleast_1d(_kernel_peak(scenario))))
    if lhv_max <= 1e-12 * peak * scenario.grid_size ** scenario.n:
        log.warning("non-positive LHV maximum %.3g for %s; reporting infinite ratio", lhv_max, scenario)
        ratio = math.inf
    else:
        ratio = qn / lhv_max
    return ViolationReport(
        scenario=scenario,
        quantum_norm=qn,
        lhv_max=lhv_max,
        ratio=ratio,
        best_model=LhvModel(offsets),
        optimizer=optimizer,
        restarts_used=restarts,
        seed=seed,
        overlap=z,
        objective=objective.mode,
    )


def _kernel_peak(scenario: Scenario):
    return quantum_kernel(scenario.strategy, scenario.d, scenario.n, scenario.biased, 0.0)


def exhaustive_count(scenario: Scenario) -> int:
    """Models enumerated by exhaustive search (the last observer is solved exactly)."""
    count = scenario.d ** (scenario.l * (scenario.n - 1))
    if _sum_symmetric(scenario):
        count //= scenario.d
    return count


def _offset_block(d, l, start, stop):
    idx = np.arange(start, stop)
    return np.stack(np.unravel_index(idx, (d,) * l), axis=-1) if l else np.zeros((len(idx), 0), int)


def exhaustive_max(
    scenario: Scenario,
    cap: int = EXHAUSTIVE_CAP,
    complex_objective: str = MODULUS,
    chunk: int = 2048,
) -> ViolationReport:
    """Global optimum over all models.

    Observers 0..N-2 are enumerated in lexicographic order and the last one is
    set to its exact best response. Ties keep the first model found, i.e. the
    lexicographically smallest offsets (for the complex modulus objective, the
    smallest among the candidates the breakpoint sweep visits).
    """
    count = exhaustive_count(scenario)
    if count > cap:
        raise InfeasibleError(
            f"exhaustive search needs {count} models (cap {cap}); use alternating ascent"
        )
    obj = Objective(scenario, complex_objective)
    d, l, n = scenario.d, scenario.l, scenario.n
    per_observer = d ** l
    first_range = per_observer // d if _sum_symmetric(scenario) else per_observer

    best_val, best_offsets = -math.inf, None
    outer_ranges = [range(first_range)] + [range(per_observer)] * (n - 3)
    batch_range = first_range if n == 2 else per_observer
    for outer in itertools.product(*outer_ranges) if n > 2 else [()]:
        outer_offsets = [_offset_block(d, l, m, m + 1)[0] for m in outer]
        prefix = obj._product([obj.local(o) for o in outer_offsets]) if outer_offsets else None
        for start in range(0, batch_range, chunk):
            stop = min(start + chunk, batch_range)
            block = _offset_block(d, l, start, stop)
            y = obj.local(block)
            if prefix is not None:
                y = obj.convolve(prefix[None], y)
            choice, z = obj.best_response(y)
            vals = obj.score(z)
            i = int(np.argmax(vals))
            if _better(float(vals[i]), best_val):
                best_val = float(vals[i])
                best_offsets = np.array(outer_offsets + [block[i], choice[i]])
    return _finish(scenario, obj, best_offsets, EXHAUSTIVE)


def packed_model(scenario: Scenario) -> LhvModel:
    """Label 0 on every grid angle in [-pi/d, pi/d) (mod 2 pi), per observer."""
    grid = build_grid(scenario)
    l = scenario.l
    size = grid.size
    # angle in units of the grid step; the interval is [-L/2, L/2)
    pos = np.arange(size)[None, :] + grid.offsets[:, None] / grid.step
    inside = np.mod(pos + l / 2, size) < l
    offsets = np.zeros((scenario.n, l), dtype=int)
    t = np.arange(size)
    for i in range(scenario.n):
        for k in range(l):
            js = t[(t % l == k) & inside[i]] // l
            assert len(js) == 1
            offsets[i, k] = js[0]  # label (c - j) mod d is 0 at j = c
    return LhvModel(offsets)


def packed_report(scenario: Scenario, complex_objective: str = MODULUS) -> ViolationReport:
    obj = Objective(scenario, complex_objective)
    return _finish(scenario, obj, packed_model(scenario).offsets, PACKED)


def alternating_ascent(
    scenario: Scenario,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    complex_objective: str = MODULUS,
    trace: list | None = None,
) -> ViolationReport:
    """Best of ``restarts`` coordinate-ascent runs.

    The first run starts from the packed model, the rest from uniformly random
    models drawn from ``numpy.random.default_rng(seed)``. Each step replaces one
    observer's offsets by its exact best response, and a run stops once a full
    sweep brings no strict improvement. If ``trace`` is a list, one list per
    run is appended to it holding the objective after every coordinate step.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    obj = Objective(scenario, complex_objective)
    d, l, n = scenario.d, scenario.l, scenario.n
    rng = np.random.default_rng(seed)
    best_val, best_offsets = -math.inf, None
    for r in range(restarts):
        offsets = packed_model(scenario).offsets.copy() if r == 0 else rng.integers(0, d, size=(n, l))
        locals_ = [obj.local(o) for o in offsets]
        val = float(obj.score(obj.overlap(offsets)))
        if trace is not None:
            trace.append([val])
        improved = True
        while improved:
            improved = False
            for i in range(n):
                others = obj._product([locals_[j] for j in range(n) if j != i])
                choice, z = obj.best_response(others)
                new = float(obj.score(z))
                if new < val - REL_TOL * max(1.0, abs(val)):
                    raise AssertionError(f"coordinate step decreased objective: {val} -> {new}")
                if _better(new, val):
                    offsets[i] = choice
                    locals_[i] = obj.local(choice)
                    val = new
                    improved = True
                if trace is not None:
                    trace[-1].append(val)
        if _better(val, best_val):
            best_val, best_offsets = val, offsets.copy()
    return _finish(scenario, obj, best_offsets, ASCENT, restarts=restarts, seed=seed)


def violation_ratio(
    scenario: Scenario,
    method: str = AUTO,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    cap: int = EXHAUSTIVE_CAP,
    complex_objective: str = MODULUS,
    auto_limit: int = 20000,
) -> ViolationReport:
    """quantum norm / max LHV overlap.

    ``auto`` runs exhaustive search when it enumerates at most ``auto_limit``
    models and alternating ascent otherwise.
    """
    if not scenario.finite:
        raise ScenarioError("finite-L ratio requested for infinite L; see asymptotics")
    if method == AUTO:
        method = EXHAUSTIVE if exhaustive_count(scenario) <= min(cap, auto_limit) else ASCENT
    if method == EXHAUSTIVE:
        return exhaustive_max(scenario, cap=cap, complex_objective=complex_objective)
    if method == ASCENT:
        return alternating_ascent(scenario, restarts, seed, complex_objective)
    if method == PACKED:
        return packed_report(scenario, complex_objective)
    raise ValueError(f"unknown method {method!r}")
