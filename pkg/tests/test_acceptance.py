"""The fourteen acceptance criteria, one test each.

Every test records a one-line PASS/FAIL (or SOFT-FAIL for the reported-only
comparison) that is printed in the terminal summary. Tolerances are the
contract values; nothing is loosened to make a criterion pass.
"""
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from nodal_atlas.coeffs import shortsum, twisted_shortsum
from nodal_atlas.nodal import components, cusp_region_report, delta_zero_census, sign_grid
from nodal_atlas.randomwave import ek_density, expected_zero_count, s_sum
from nodal_atlas.restriction import mellin_check, poincare_functional, sign_changes_on_horocycle, unfolding_direct
from nodal_atlas.specfun import (airy_zero, bessel_k_oracle, bessel_k_scaled, bessel_k_zero,
                                 bessel_product_closed_form, bessel_product_integral, h_xi)
from nodal_atlas.windows import BumpWindow

from conftest import ACCEPTANCE, EVEN_PATH, ODD_PATH

T_STRUCT = 830.42904848


def record(k, ok, detail, soft=False):
    ACCEPTANCE[k] = ("PASS" if ok else ("SOFT-FAIL" if soft else "FAIL"), detail)
    print(f"criterion {k}: {ACCEPTANCE[k][0]} {detail}")
    if not soft:
        assert ok, detail


@pytest.fixture(scope="module")
def census_grids(even):
    out = {}
    for res in (8, 12):
        g = sign_grid(even, 0.85, None, res)
        out[res] = (g, components(g))
    return out


def test_c01_airy_zeros():
    t0 = time.time()
    ref = (-2.33811, -4.08795, -5.52056)
    got = [airy_zero(j) for j in (1, 2, 3)]
    dt = time.time() - t0
    err = max(abs(a - b) for a, b in zip(got, ref))
    record(1, err <= 5e-5 and dt < 1, f"max |a_j - ref| = {err:.2e} (tol 5e-5), {dt:.2f}s")


def test_c02_structure_constants():
    t0 = time.time()
    k1 = bessel_k_zero(T_STRUCT, 1) / (2 * math.pi)
    k2 = bessel_k_zero(T_STRUCT, 2) / (2 * math.pi)
    ys = [T_STRUCT / (2 * math.pi * l) for l in (1, 2, 3)]
    dt = time.time() - t0
    ok = (abs(k1 - 129.40) <= 0.02 and abs(k2 - 127.36) <= 0.02 and abs(ys[0] - 132.167) <= 1e-3
          and abs(ys[1] - 66.08) <= 1e-2 and abs(ys[2] - 44.05) <= 1e-2 and dt < 1)
    record(2, ok, f"k1/2pi = {k1:.4f}, k2/2pi = {k2:.4f}, y = {ys[0]:.4f}, {ys[1]:.4f}, {ys[2]:.4f}, {dt:.2f}s")


def _regime_samples(r, n=200):
    c = r ** (1 / 3)
    band = 1.5 * c
    # top of the decay regime: rH = 30 (beyond it the value is reported as 0)
    lo, hi = 1.0, 50.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if r * h_xi(mid) < 30 else (lo, mid)
    return {"oscillatory": np.linspace(0.05 * r, r - band, n, endpoint=False),
            "transitional": np.linspace(r - band, r + band, n),
            "decay": np.linspace(r + band, lo * r, n + 1)[1:]}


def test_c03_uniform_asymptotics():
    t0 = time.time()
    worst_rel, worst_abs, fails, total = 0.0, 0.0, [], 0
    for r in (20.0, 50.0, 100.0):
        core = 2 * r ** (1 / 3)
        for regime, us in _regime_samples(r).items():
            for u in us:
                rep = bessel_k_scaled(r, float(u))
                exact = float(bessel_k_oracle(r, float(u)))
                total += 1
                if abs(u - r) <= core:
                    e = abs(rep.value - exact)
                    worst_abs = max(worst_abs, e * r ** (2 / 3))
                    good = e <= 5 * r ** (-2 / 3)
                else:
                    e = abs(rep.value - exact) / abs(exact)
                    worst_rel = max(worst_rel, e)
                    good = e <= max(3 * rep.est_rel_error, 0.02)
                if not good:
                    fails.append((r, regime, float(u)))
    dt = time.time() - t0
    record(3, not fails and dt < 120,
           f"{total} samples, {len(fails)} outside tolerance, worst core error = {worst_abs:.3f} r^(-2/3) (tol 5), "
           f"{dt:.1f}s")


def test_c04_product_identity():
    t0 = time.time()
    rng = np.random.default_rng(20241015)
    worst = 0.0
    for r in (10.0, 20.0, 40.0):
        for _ in range(20):
            u, v = rng.uniform(0.5, 4 * math.pi, 2)
            c = rng.uniform(0.0, 6.0)
            a = bessel_product_integral(u, v, c, r)
            b = bessel_product_closed_form(u, v, c, r)
            worst = max(worst, abs(a - b) / abs(b))
    dt = time.time() - t0
    record(4, worst <= 1e-3 and dt < 120, f"worst relative disagreement {worst:.2e} over 60 triples (tol 1e-3), {dt:.1f}s")


def test_c05_fixture_generation():
    from nodal_atlas.collocation import solve_collocation
    from nodal_atlas.waveform import automorphy_residual

    t0 = time.time()
    parts, ok = [], True
    for window, parity in (((13.5, 14.0), "even"), ((9.0, 9.9), "odd")):
        f = solve_collocation(window, parity, n_coeffs=60)
        raw = np.asarray(f.info["lambda_raw"])  # lambda(1..M) before any Hecke completion
        res = automorphy_residual(f)
        m6 = abs(raw[5] - raw[1] * raw[2])
        m4 = abs(raw[1] ** 2 - raw[3] - 1)
        good = window[0] < f.t < window[1] and res <= 1e-5 and m6 <= 1e-5 and m4 <= 1e-5
        ok = ok and good
        parts.append(f"{parity} t = {f.t:.8f}, residual {res:.1e}, |l6 - l2 l3| = {m6:.1e}, |l2^2 - l4 - 1| = {m4:.1e}")
    dt = time.time() - t0
    record(5, ok and dt < 600, "; ".join(parts) + f"; {dt:.0f}s")


def test_c06_short_sums(even, odd):
    t0 = time.time()
    ratios, twisted = [], []
    for f in (even, odd):
        for w in (0.25, 0.5, 1.0, 2.0):
            ratios.append(shortsum(f.coeffs, w) / (w * f.t))
            twisted += [twisted_shortsum(f.coeffs, a, q, w) for a, q in ((1, 3), (1, 4), (3, 8))]
    dt = time.time() - t0
    ok = all(0.01 <= q <= 100 for q in ratios) and all(v > 0 for v in twisted) and dt < 10
    record(6, ok, f"shortsum/(omega t) in [{min(ratios):.3f}, {max(ratios):.3f}], min twisted {min(twisted):.3f}, {dt:.2f}s")


def test_c07_unfolding(even):
    t0 = time.time()
    errs = []
    for g in (BumpWindow(1.2, 0.4, "smooth"), BumpWindow(1.5, 0.5, "C2")):
        a = poincare_functional(even, 0, g)
        b = unfolding_direct(even, g)
        errs.append(abs(a - b) / abs(b))
    dt = time.time() - t0
    record(7, max(errs) <= 1e-3 and dt < 300, f"relative differences {errs[0]:.1e}, {errs[1]:.1e} (tol 1e-3), {dt:.1f}s")


def test_c08_mellin(even):
    t0 = time.time()
    errs = [mellin_check(even, tp, sigma=1.5).rel_error for tp in (0.0, 1.0, 2.0, 3.0, 4.0)]
    dt = time.time() - t0
    record(8, max(errs) <= 1e-3 and dt < 300, f"max relative discrepancy {max(errs):.1e} at 5 probes (tol 1e-3), {dt:.1f}s")


def test_c09_horocycle_zeros(even):
    t0 = time.time()
    lam = even.coeffs.lam
    parts, ok = [], True
    for l in (1, 2, 3):
        if abs(lam[l]) < 0.5:
            parts.append(f"l={l} skipped (|lambda| = {abs(lam[l]):.3f})")
            continue
        cl = sign_changes_on_horocycle(even, even.t / (2 * math.pi * l))
        targets = [(2 * k + 1) / (4 * l) for k in range(-2 * l, 2 * l)]
        off = max((min(abs(x - c) for c in targets) for x in cl.params), default=math.inf)
        good = len(cl) == 2 * l and off <= 1e-2
        ok = ok and good
        parts.append(f"l={l}: {len(cl)} crossings (want {2 * l}), max offset {off:.4f} (tol 0.01)")
    dt = time.time() - t0
    record(9, ok and dt < 60, "; ".join(parts) + f"; {dt:.1f}s")


def test_c10_nodal_coherence(even, census_grids):
    t0 = time.time()
    d8, d12 = census_grids[8][1], census_grids[12][1]
    census = delta_zero_census(even)
    t = even.t
    part = d8.N == d8.R + 2 * d8.S_split and d12.N == d12.R + 2 * d12.S_split
    thm = census.n / 2 + 1 <= d8.R <= census.m
    weyl = d8.N <= 1.2 * (t * t + 0.25) / 24
    stable = abs(d12.N - d8.N) <= 0.05 * d8.N
    record(10, part and thm and weyl and stable,
           f"N = {d8.N} (res 8), {d12.N} (res 12), R = {d8.R}, S = {d8.S_split}, m = {census.m}, n = {census.n}, "
           f"bound 1.2 (t^2 + 1/4)/24 = {1.2 * (t * t + 0.25) / 24:.2f}, {time.time() - t0:.1f}s")


def test_c11_percolation_comparison(even, census_grids):
    N = census_grids[8][1].N
    pred = 0.124868 * (even.t ** 2 + 0.25) / 24
    ratio = N / pred
    record(11, 1 / 3 <= ratio <= 3,
           f"N = {N} vs {pred:.3f} (ratio {ratio:.2f}, want within 3x); agreement needs t near 125, "
           "out of desk scope for full grids; exit status unaffected", soft=True)


def test_c12_random_wave(even, odd):
    t0 = time.time()
    xs = np.linspace(0.05, 0.45, 81)
    dens = ek_density(100.0, 1.0, xs) / (100 / math.pi)
    ys0 = s_sum(100.0, 1.0, 0.0) / (math.pi / 4)
    measured = sign_changes_on_horocycle(even, 1.0).sign_changes_total
    expected = expected_zero_count(even.t, 1.0).expected_count
    a = bool(np.all(np.abs(dens - 1) <= 0.10))
    b = abs(ys0 - 1) <= 0.15
    c = abs(measured - expected) <= 0.25 * expected
    note = f"odd fixture t = {odd.t:.2f} is below the model's r >= 10"
    record(12, a and b and c,
           f"density/(r/pi) in [{dens.min():.3f}, {dens.max():.3f}] (want 0.9..1.1); Y S(0)/(pi/4) = {ys0:.4f} "
           f"(want 0.85..1.15); even fixture {measured} crossings vs {expected:.2f} expected (25%); {note}; "
           f"{time.time() - t0:.1f}s")


def test_c13_near_cusp(even):
    t0 = time.time()
    rep = cusp_region_report(even)
    # far above the transition as well, where the profile is evaluated with mpmath ratios
    far = [sign_changes_on_horocycle(even, Y).params for Y in (2 * rep.y_cusp, 10 * even.t, 100 * even.t)]
    off = max([rep.max_offset] + [abs(abs(x) - 0.25) for xs in far for x in xs])
    record(13, off <= 1e-3 and dt_ok(t0, 60), f"max |x| - 1/4 offset {off:.1e} above y = {rep.y_cusp:.3f} (tol 1e-3), "
           f"{time.time() - t0:.1f}s")


def dt_ok(t0, limit):
    return time.time() - t0 < limit


def test_c14_determinism(tmp_path):
    out = []
    for threads in ("1", "8"):
        env = dict(os.environ, NODAL_ATLAS_THREADS=threads)
        summary = tmp_path / f"verify_{threads}.txt"
        proc = subprocess.run([sys.executable, "-m", "nodal_atlas.cli", "--summary", str(summary), "verify", "all",
                               "--form", str(EVEN_PATH), "--form", str(ODD_PATH)],
                              capture_output=True, env=env)
        out.append((proc.returncode, proc.stdout, summary.read_bytes()))
    same = out[0][1] == out[1][1] and out[0][2] == out[1][2]
    record(14, same and out[0][0] == 0 and out[1][0] == 0,
           f"exit codes {out[0][0]}, {out[1][0]}; summaries byte-identical: {same} ({len(out[0][2])} bytes)")
