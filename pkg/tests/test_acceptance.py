"""Acceptance criteria, one test each, at their stated tolerances.

Each test prints a single PASS/FAIL line (also repeated in the terminal
summary). Run ``pytest tests/test_acceptance.py -s`` to see them inline.
"""

import itertools
import math
import time

import numpy as np

from conftest import ACCEPTANCE_LINES
from geobell import asymptotics as asy
from geobell import kernels, oracle
from geobell.grid import quantum_tensor
from geobell.lhv import alternating_ascent, exhaustive_count, exhaustive_max, violation_ratio
from geobell.scenario import INFINITE, OffsetConvention, Scenario, dichotomic_values, vector_outcomes
from geobell.tables import TABLES, compute_table, round3

TOL = 0.001
SLACK = 1e-12  # float noise on top of the stated tolerances


def report(number, title, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}" + (f" ({detail})" if detail else "")
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def table_mismatches(cells, skip=()):
    bad = []
    for c in cells:
        if c.reference is None or (c.d, c.col) in skip:
            continue
        if abs(c.value - c.reference) > TOL + SLACK:
            col = "inf" if c.col == INFINITE else c.col
            bad.append(f"d={c.d},{col}: {c.value:.5f} vs {c.reference}")
    return bad


def _checked(cells):
    return sum(c.reference is not None for c in cells)


def test_01_table1_two_party_real():
    start = time.perf_counter()
    cells = compute_table("1")
    elapsed = time.perf_counter() - start
    bad = table_mismatches(cells)
    # d = 2..6 by L = 2..6 is 25 reference cells
    ok = not bad and _checked(cells) == 25 and elapsed < 120
    report(1, "two-party real-outcome table, every cell within 0.001, < 2 min", ok,
           f"{elapsed:.1f} s; " + ("; ".join(bad) if bad else "all cells match"))


def test_02_table2_three_party_real():
    cells = compute_table("2")
    bad = table_mismatches(cells)
    by = {(c.d, c.col): c.value for c in cells}
    mermin = abs(by[(2, 2)] - 2.0) < 1e-9
    no_dip = [d for d in TABLES["2"].rows if not (by[(d, 3)] < by[(d, 2)] and by[(d, 3)] < by[(d, 4)])]
    ok = not bad and _checked(cells) == 25 and mermin and not no_dip
    detail = [f"d=L=2 -> {by[(2, 2)]:.12f}"]
    detail += bad
    if no_dip:
        detail.append(f"no L=3 dip in rows {no_dip}")
    report(2, "three-party real-outcome table, Mermin value and L=3 dip", ok, "; ".join(detail))


def test_03_table2a_offset_convention():
    results = {}
    for conv in OffsetConvention:
        spec = TABLES["2a"]
        cells = []
        for d in spec.rows:
            for l in spec.cols:
                if (d, l) in spec.reference:
                    sc = Scenario(4, d, l, "unbiased", "real", conv)
                    cells.append((d, l, violation_ratio(sc).ratio, spec.reference[(d, l)]))
        results[conv] = cells
    reproducing = [c for c, cells in results.items() if all(abs(v - p) <= TOL + SLACK for _, _, v, p in cells)]
    default = Scenario(4, 2, 2).offset
    anchor = next(v for d, l, v, _ in results[default] if (d, l) == (2, 2))
    ok = reproducing == [default] and round3(anchor) == "2.828" and len(results[default]) == 18
    worst = {c.value: max(abs(v - p) for _, _, v, p in cells) for c, cells in results.items()}
    report(3, "four-party table under exactly one even-N offset convention", ok,
           f"reproducing: {[c.value for c in reproducing]}; default {default.value}; "
           f"max deviation {', '.join(f'{k}={v:.4f}' for k, v in worst.items())}; d=L=2 -> {anchor:.4f}")


def test_04_tables3_4_complex_outcomes():
    flagged = (3, 4)
    bad, inf_bad, note = [], [], ""
    for tid in ("3", "4"):
        spec = TABLES[tid]
        cells = compute_table(tid)
        finite = [c for c in cells if c.col != INFINITE]
        bad += [f"T{tid} " + b for b in table_mismatches(finite, skip=[flagged] if tid == "3" else [])]
        for c in cells:
            if c.col == INFINITE and c.reference is not None:
                if abs(asy.limit_ratio_complex(c.d, spec.n) - c.reference) > TOL + SLACK:
                    inf_bad.append(f"T{tid} d={c.d},inf: {c.value:.5f} vs {c.reference}")
            if tid == "3" and (c.d, c.col) == flagged:
                note = f"flagged d=3,L=4 computed {c.value:.5f}, printed {c.reference}"
    ok = not bad and not inf_bad
    detail = "; ".join([note] + bad + inf_bad)
    report(4, "complex-outcome tables, finite cells and limit column within 0.001", ok, detail)


def test_05_table6_biased_dichotomic():
    cells = compute_table("6")
    bad = table_mismatches(cells)
    by = {(c.d, c.col): c.value for c in cells}
    n3_violating = sorted(d for d in range(3, 9) if by[(d, 3)] > 1)
    n2_violating = sorted(d for d in range(3, 9) if by[(d, 2)] >= 1)
    ok = not bad and _checked(cells) == 12 and n3_violating == [5, 6, 7, 8] and not n2_violating
    report(5, "biased-state table, 12 cells; violation only for d >= 5 at N=3", ok,
           f"N=3 violating d={n3_violating}; N=2 violating d={n2_violating}" + ("; " + "; ".join(bad) if bad else ""))


def test_06_limit_formulas_and_growth():
    pi8 = asy.limit_ratio_real_unbiased(2, 2)
    ok = abs(pi8 - math.pi ** 2 / 8) <= 1e-12
    expected = {2: math.pi / 2, 3: 2 * math.pi / (3 * math.sqrt(3)), 4: math.pi / (2 * math.sqrt(2)), 6: math.pi / 3}
    parts = [f"pi^2/8 gap {abs(pi8 - math.pi ** 2 / 8):.1e}"]
    for d, want in expected.items():
        # observed per-party factor of the limit ratio at large N, and its closed form
        observed = math.exp(asy.log_limit_ratio_real_unbiased(d, 501) - asy.log_limit_ratio_real_unbiased(d, 500))
        gap = max(abs(observed - want), abs(asy.growth_factor(d) - want))
        ok &= gap <= 1e-6
        parts.append(f"d={d} gap {gap:.1e}")
    report(6, "two-qubit limit pi^2/8 and per-party growth factors", ok, "; ".join(parts))


def test_07_complex_threshold_slope():
    slopes = {n: asy.complex_violation_threshold(n) / n for n in (10, 20, 50, 100)}
    bad = {n: s for n, s in slopes.items() if not 1.59 <= s <= 1.69}
    report(7, "complex-outcome threshold d*/N within [1.59, 1.69]", not bad,
           ", ".join(f"N={n}: {asy.complex_violation_threshold(n)}/{n}={s:.3f}" for n, s in slopes.items()))


def test_08_biased_surface_shape():
    ds = range(3, 21)

    def slice_(n):
        return np.array([asy.log_limit_ratio_biased(d, n) for d in ds])

    six, three, eight = slice_(6), slice_(3), slice_(8)
    argmin = list(ds)[int(np.argmin(six))]
    inc = bool(np.all(np.diff(three) > 0))
    dec = bool(np.all(np.diff(eight) < 0))
    report(8, "biased limit surface: N=6 minimum at d=7, N=3 rising, N=8 falling", argmin == 7 and inc and dec,
           f"N=6 argmin d={argmin}; N=3 increasing={inc}; N=8 decreasing={dec}")


def test_09_oracle_equivalence():
    rng = np.random.default_rng(2024)
    worst_k, worst_norm, worst_class, cases = 0.0, 0.0, 0.0, 0
    for d, n in itertools.product(range(2, 6), range(2, 5)):
        for biased in (False, True):
            if biased and d < 3:
                continue
            cases += 1
            psi = oracle.ghz_state(n, d, biased)
            sums = np.indices((d,) * n).sum(axis=0) % d
            for _ in range(200):
                alpha = rng.uniform(-2 * np.pi, 2 * np.pi, size=n)
                ap = alpha.sum()
                if biased:
                    real_k, cplx_k = kernels.kernel_real_biased(d, n, ap), kernels.kernel_complex_biased(d, ap)
                else:
                    real_k, cplx_k = kernels.kernel_real_unbiased(d, n, ap), kernels.kernel_complex_unbiased(d, ap)
                probs = oracle.joint_outcome_distribution(psi, alpha)
                per_class = np.bincount(sums.ravel(), weights=probs.ravel(), minlength=d)
                moved = np.zeros(n)
                moved[0] = ap
                worst_k = max(
                    worst_k,
                    abs(oracle.expectation_real(psi, alpha) - real_k),
                    abs(oracle.expectation_complex(psi, alpha) - cplx_k),
                    abs(per_class @ dichotomic_values(d) - kernels.kernel_dichotomic(d, n, biased, ap)),
                    float(np.abs(per_class @ vector_outcomes(d) - kernels.kernel_vector(d, n, biased, ap)).max()),
                )
                worst_norm = max(worst_norm, abs(probs.sum() - 1))
                worst_class = max(
                    worst_class,
                    float(np.abs(kernels.sum_class_probabilities(d, biased, ap) - per_class).max()),
                    float(np.abs(oracle.joint_outcome_distribution(psi, moved) - probs).max()),
                )
    ok = worst_k <= 1e-10 and worst_norm <= 1e-12 and worst_class <= 1e-10
    report(9, "closed-form kernels equal the dense oracle", ok,
           f"{cases} cases x 200 angle tuples; kernel {worst_k:.1e}, normalisation {worst_norm:.1e}, "
           f"sum-class reduction {worst_class:.1e}")


def test_10_strategy_equivalence():
    spread_unb = 0.0
    count = 0
    for tid in ("1", "2", "2a"):
        spec = TABLES[tid]
        for d, l in itertools.product(spec.rows, spec.cols):
            ratios = [violation_ratio(Scenario(spec.n, d, l, "unbiased", s)).ratio for s in ("real", "vector", "dichotomic")]
            spread_unb = max(spread_unb, max(ratios) - min(ratios))
            count += 1
    spread_b = 0.0
    for d, n in itertools.product(range(3, 9), (2, 3)):
        a = violation_ratio(Scenario(n, d, 6, "biased", "vector")).ratio
        b = violation_ratio(Scenario(n, d, 6, "biased", "dichotomic")).ratio
        spread_b = max(spread_b, abs(a - b))
    ok = spread_unb <= 1e-9 and spread_b <= 1e-9
    report(10, "real/vector/dichotomic strategies give equal ratios", ok,
           f"{count} unbiased scenarios, spread {spread_unb:.1e}; biased vector vs dichotomic at L=6, spread {spread_b:.1e}")


def _feasible_scenarios():
    for n, d, l in itertools.product((2, 3), (2, 3, 4), (1, 2, 3)):
        if d == 2 and l == 1 and n % 2 == 0:
            continue  # identically zero quantum tensor
        for state in ("unbiased", "biased"):
            if state == "biased" and d < 3:
                continue
            for strat in ("real", "complex", "vector", "dichotomic"):
                sc = Scenario(n, d, l, state, strat)
                if exhaustive_count(sc) <= 50000:
                    yield sc


def test_11_optimizer_soundness():
    scenarios = list(_feasible_scenarios())
    mismatches, non_monotone = [], 0
    covered = set()
    for sc in scenarios:
        trace = []
        ex = exhaustive_max(sc)
        asc = alternating_ascent(sc, restarts=16, seed=0, trace=trace)
        if abs(asc.lhv_max - ex.lhv_max) > 1e-9 * max(1.0, abs(ex.lhv_max)):
            mismatches.append(f"{sc.n},{sc.d},{sc.l},{sc.state.value},{sc.strategy.value}")
        non_monotone += sum(any(b < a for a, b in zip(run, run[1:])) for run in trace)
        covered.add((sc.state.value, sc.strategy.value))
    ok = len(scenarios) >= 50 and not mismatches and non_monotone == 0 and len(covered) == 8
    report(11, "alternating ascent equals exhaustive search; steps never decrease", ok,
           f"{len(scenarios)} scenarios, {len(covered)} state/strategy pairs, "
           f"{len(mismatches)} mismatches, {non_monotone} non-monotone runs" + (f": {mismatches}" if mismatches else ""))


def test_12_biased_complex_never_violates():
    worst_ratio, worst_mod, count, above = 0.0, 0.0, 0, []
    for d, l, n in itertools.product(range(3, 7), range(2, 5), range(2, 5)):
        sc = Scenario(n, d, l, "biased", "complex")
        ratio = violation_ratio(sc).ratio
        if ratio > 1 + SLACK:
            above.append(f"d={d},L={l},N={n}: {ratio:.5f}")
        worst_ratio = max(worst_ratio, ratio)
        vals = quantum_tensor(sc).values
        worst_mod = max(worst_mod, float(np.abs(np.abs(vals) - (d - 2) / (d - 1)).max()))
        count += 1
    # a dense cross-check of the constant modulus on one small grid
    sc = Scenario(2, 4, 2, "biased", "complex")
    dense = quantum_tensor(sc, use_oracle=True).values
    worst_mod = max(worst_mod, float(np.abs(np.abs(dense) - 2 / 3).max()))
    ok = worst_ratio <= 1 + SLACK and worst_mod <= 1e-10
    report(12, "biased state with complex outcomes shows no violation", ok,
           f"{count} scenarios, max ratio {worst_ratio:.6f}, |E| deviation {worst_mod:.1e}"
           + (f"; above 1: {', '.join(above)}" if above else ""))
