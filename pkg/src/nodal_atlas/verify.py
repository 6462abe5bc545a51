"""Invariant suite behind `nodal-atlas verify`.

Every check returns (name, passed, detail). Model comparisons that are
expected to be loose at desk-scale t are reported as results, not checks.
"""
from __future__ import annotations

import math
from math import gcd

import numpy as np

from .coeffs import shortsum, twisted_shortsum, verify_ramanujan
from .fileio import fmt
from .nodal import (classify_inert_split, components, courant_bound, cusp_region_report, delta_zero_census,
                    sign_grid, theorem21_check)
from .randomwave import ek_density, expected_zero_count, gram, gram_scale, s_sum
from .restriction import (cusp_mass, fundamental_domain_mass_below, mellin_check, offdiag_G, poincare_functional,
                          restriction_norm_horocycle, restriction_norm_horocycle_parseval, sign_changes_on_delta,
                          sign_changes_on_horocycle, unfolding_direct)
from .specfun import (airy_zero, bessel_k_oracle, bessel_k_scaled, bessel_k_zero, bessel_product_closed_form,
                      bessel_product_integral)
from .waveform import automorphy_residual, l2_norm_sq
from .windows import BumpWindow

MODULES = ("specfun", "coeffs", "waveform", "restriction_que", "nodal", "randomwave")
T_STRUCT = 830.42904848


def _chk(name, ok, value=None, bound=None):
    detail = ""
    if value is not None:
        detail = f"value={fmt(value)}" + (f" bound={fmt(bound)}" if bound is not None else "")
    return (name, bool(ok), detail)


# ---------------------------------------------------------------- form-free
def check_specfun(results: dict) -> list:
    out = []
    ref = [-2.338107410459767, -4.087949444130971, -5.520559828095551]
    err = max(abs(airy_zero(j) - ref[j - 1]) for j in (1, 2, 3))
    out.append(_chk("specfun.airy_zeros", err <= 5e-5, err, 5e-5))
    k1 = bessel_k_zero(T_STRUCT, 1) / (2 * math.pi)
    k2 = bessel_k_zero(T_STRUCT, 2) / (2 * math.pi)
    results["specfun.k1_over_2pi"] = k1
    results["specfun.k2_over_2pi"] = k2
    out.append(_chk("specfun.k1", abs(k1 - 129.40) <= 0.02, k1))
    out.append(_chk("specfun.k2", abs(k2 - 127.36) <= 0.02, k2))
    ys = [T_STRUCT / (2 * math.pi * l) for l in (1, 2, 3)]
    out.append(_chk("specfun.y_levels", abs(ys[0] - 132.167) <= 1e-3 and abs(ys[1] - 66.08) <= 1e-2
                    and abs(ys[2] - 44.05) <= 1e-2, ys[0]))
    # uniform asymptotics against the big-float oracle at a few points
    r = 20.0
    worst = 0.0
    ok = True
    for u in (3.0, 9.0, 15.0, 18.5, 20.0, 21.5, 25.0, 32.0):
        rep = bessel_k_scaled(r, u)
        exact = float(bessel_k_oracle(r, u))
        if abs(u - r) <= 2 * r ** (1 / 3):
            good = abs(rep.value - exact) <= 5 * r ** (-2 / 3)
        else:
            tol = max(3 * rep.est_rel_error, 0.02)
            rel = abs(rep.value - exact) / abs(exact) if exact else abs(rep.value)
            worst = max(worst, rel)
            good = rel <= tol
        ok = ok and good
    out.append(_chk("specfun.uniform_asymptotic", ok, worst))
    u, v, c = 1.3, 0.8, 0.4
    a = bessel_product_integral(u, v, c, 10.0)
    b = bessel_product_closed_form(u, v, c, 10.0)
    out.append(_chk("specfun.product_identity", abs(a - b) <= 1e-3 * abs(a), abs(a - b) / abs(a), 1e-3))
    return out


def check_randomwave(results: dict) -> list:
    out = []
    xs = np.linspace(0.0, 0.5, 101)
    vv, vd, dd = gram(100.0, 1.0, xs)
    det = vv * dd - vd * vd
    rel = float(np.min(det)) / gram_scale(100.0, 1.0)
    out.append(_chk("randomwave.gram_nonnegative", rel >= -1e-9, rel, -1e-9))
    S = s_sum(100.0, 1.0, xs)
    out.append(_chk("randomwave.S0_max", bool(np.all(S <= S[0] + 1e-12 * abs(S[0]))), float(S[0])))
    out.append(_chk("randomwave.S1_at_0", s_sum(100.0, 1.0, 0.0, 1) == 0.0, s_sum(100.0, 1.0, 0.0, 1)))
    results["randomwave.Y_S0_over_pi4"] = s_sum(100.0, 1.0, 0.0) / (math.pi / 4)
    results["randomwave.density_x0.2_over_r_pi"] = ek_density(100.0, 1.0, 0.2) / (100 / math.pi)
    pred = expected_zero_count(100.0, 1.0)
    results["randomwave.expected_count_r100_Y1"] = pred.expected_count
    results["randomwave.leading_term_r100_Y1"] = pred.leading_term
    return out


def check_offdiag(results: dict) -> list:
    w = BumpWindow(1.0, 0.25)
    a = offdiag_G(1, 1, w, 20.0)
    b = offdiag_G(1, 1, w, 20.0, route="legendre")
    results["restriction_que.G11_r20"] = a
    return [_chk("restriction_que.offdiag_dual_route", abs(a - b) <= 1e-3 * abs(a), abs(a - b) / abs(a), 1e-3),
            _chk("restriction_que.offdiag_symmetry", offdiag_G(2, 3, w, 20.0) == offdiag_G(3, 2, w, 20.0))]


# ---------------------------------------------------------------- per form
def check_coeffs(form, tag: str, results: dict) -> list:
    data = form.coeffs
    lam = data.lam
    n_max = min(data.max_n, 400)
    worst = 0.0
    for m in range(2, 21):
        for n in range(2, n_max // m + 1):
            if gcd(m, n) == 1:
                worst = max(worst, abs(lam[m * n] - lam[m] * lam[n]))
    out = [_chk(f"{tag}.coeffs.multiplicative", worst <= 1e-9, worst, 1e-9)]
    rec = max(abs(lam[p] ** 2 - lam[p * p] - 1) for p in (2, 3, 5, 7) if p * p <= data.max_n)
    out.append(_chk(f"{tag}.coeffs.hecke_recursion", rec <= 1e-9, rec, 1e-9))
    bad = verify_ramanujan(data)
    out.append(_chk(f"{tag}.coeffs.ramanujan_bound", not bad, float(len(bad))))
    if data.rho1_scaled is not None:
        ratios = [shortsum(data, w) / (w * data.t) for w in (0.25, 0.5, 1.0, 2.0)]
        out.append(_chk(f"{tag}.coeffs.shortsum_ratio", all(0.01 <= q <= 100 for q in ratios), min(ratios)))
        tw = [twisted_shortsum(data, a, q, 1.0) for a, q in ((1, 3), (1, 4), (3, 8))]
        out.append(_chk(f"{tag}.coeffs.twisted_positive", all(v > 0 for v in tw), min(tw)))
    return out


def check_waveform(form, tag: str, results: dict) -> list:
    res = automorphy_residual(form, 50, seed=0)
    results[f"{tag}.automorphy_residual"] = res
    out = [_chk(f"{tag}.waveform.automorphy", res <= 1e-5, res, 1e-5)]
    if form.coeffs.rho1_scaled is not None:
        nrm = l2_norm_sq(form)
        out.append(_chk(f"{tag}.waveform.l2_norm", abs(nrm - 1) <= 1e-6, nrm))
    q = restriction_norm_horocycle(form, 1.0)
    p = restriction_norm_horocycle_parseval(form, 1.0)
    out.append(_chk(f"{tag}.waveform.parseval_horocycle", abs(q - p) <= 1e-9 * abs(p), abs(q - p)))
    return out


def _crossing_ok(cl) -> bool:
    locs = [c.location for c in cl.crossings]
    inc = all(b > a for a, b in zip(locs, locs[1:]))
    res = all(c.residual <= 1e-9 for c in cl.crossings if c.refined and not c.tangential)
    return inc and res and cl.sign_changes_total <= cl.zeros_total


def check_restriction(form, tag: str, results: dict) -> list:
    t = form.t
    out = []
    cls = [sign_changes_on_horocycle(form, Y) for Y in (0.5, 1.0, 2.0)]
    out.append(_chk(f"{tag}.restriction.crossing_invariants", all(_crossing_ok(c) for c in cls)))
    results[f"{tag}.horocycle_count_Y1"] = cls[1].sign_changes_total
    if form.parity == "odd":
        ok = all(any(abs(x) < 1e-9 for x in c.params) and any(abs(x - 0.5) < 1e-9 for x in c.params) for c in cls)
        out.append(_chk(f"{tag}.restriction.odd_symmetry_zeros", ok))
        d1 = sign_changes_on_delta(form, "delta1", (t / 100, t))
        out.append(_chk(f"{tag}.restriction.odd_normal_derivative_delta1", d1.sign_changes_total > 0,
                        float(d1.sign_changes_total)))
    else:
        # Theorem 5.4 range: l <= t^(1/6 - 0.05)
        l_max = int(math.floor(t ** (1 / 6 - 0.05)))
        for l in range(1, l_max + 1):
            if abs(form.coeffs.lam[l]) < 0.5:
                continue
            cl = sign_changes_on_horocycle(form, t / (2 * math.pi * l))
            offs = [abs(4 * l * x - round((4 * l * x - 1) / 2) * 2 - 1) / (4 * l) for x in cl.params]
            ok = cl.sign_changes_total == 2 * l and max(offs, default=1) <= 1e-2
            out.append(_chk(f"{tag}.restriction.horocycle_Yl_shape_l{l}", ok, max(offs, default=1.0), 1e-2))
        probes = (0.0, 1.0, 2.0, 3.0, 4.0)
        errs = [mellin_check(form, tp).rel_error for tp in probes]
        out.append(_chk(f"{tag}.restriction.mellin", max(errs) <= 1e-3, max(errs), 1e-3))
        d1 = sign_changes_on_delta(form, "delta1", (t / 100, t))
        out.append(_chk(f"{tag}.restriction.delta1_sign_changes", d1.sign_changes_total >= 0.005 * t,
                        float(d1.sign_changes_total)))
    g = BumpWindow(1.2, 0.4, "smooth")
    p = poincare_functional(form, 0, g)
    u = unfolding_direct(form, g)
    out.append(_chk(f"{tag}.restriction.unfolding", abs(p - u) <= 1e-3 * abs(p), abs(p - u) / abs(p), 1e-3))
    if form.coeffs.rho1_scaled is not None:
        total = cusp_mass(form, 1.5)[0] + fundamental_domain_mass_below(form, 1.5)
        out.append(_chk(f"{tag}.restriction.total_mass", abs(total - 1) <= 1e-3, total))
        results[f"{tag}.cusp_mass_Y2"] = cusp_mass(form, 2.0)[0]
    return out


def check_nodal(form, tag: str, results: dict) -> list:
    out = []
    g8 = sign_grid(form, 0.85, 6.0, 8)
    d8 = components(g8)
    d12 = components(sign_grid(form, 0.85, 6.0, 12))
    out.append(_chk(f"{tag}.nodal.partition", d8.consistent and d12.consistent, float(d8.N)))
    results[f"{tag}.nodal.N"] = d8.N
    results[f"{tag}.nodal.R"] = d8.R
    results[f"{tag}.nodal.S_split"] = d8.S_split
    results[f"{tag}.nodal.grid_digest"] = g8.digest()
    out.append(_chk(f"{tag}.nodal.refinement", abs(d12.N - d8.N) <= 0.05 * d8.N, float(d12.N)))
    if form.parity == "even":
        classify_inert_split(d8)
        census = delta_zero_census(form)
        rep = theorem21_check(d8, census)
        results[f"{tag}.nodal.m"] = census.m
        results[f"{tag}.nodal.n"] = census.n
        out.append(_chk(f"{tag}.nodal.n_even", census.n % 2 == 0, float(census.n)))
        out.append(_chk(f"{tag}.nodal.theorem21", rep.ok, float(rep.R)))
        out.append(_chk(f"{tag}.nodal.courant", d8.N <= 1.2 * courant_bound(form.t), float(d8.N),
                        1.2 * courant_bound(form.t)))
        cr = cusp_region_report(form, d8, g8)
        out.append(_chk(f"{tag}.nodal.near_cusp_localization", cr.localized, cr.max_offset, 1e-3))
        out.append(_chk(f"{tag}.nodal.inert_high", cr.inert_high >= cr.inert_target, float(cr.inert_high)))
    else:
        out.append(_chk(f"{tag}.nodal.odd_all_split", d8.R == 0, float(d8.R)))
    return out


def run_verify(module: str, forms: dict) -> tuple:
    """Run the suite for `module` ("all" or a module name) on named forms.

    Returns (checks, results). Forms are processed in sorted-name order.
    """
    if module != "all" and module not in MODULES:
        raise ValueError(f"unknown module {module!r}; choose all or one of {', '.join(MODULES)}")
    want = (lambda m: True) if module == "all" else (lambda m: m == module)  # noqa: E731
    checks, results = [], {}
    if want("specfun"):
        checks += check_specfun(results)
    if want("randomwave"):
        checks += check_randomwave(results)
    if want("restriction_que"):
        checks += check_offdiag(results)
    for tag in sorted(forms):
        form = forms[tag]
        if want("coeffs"):
            checks += check_coeffs(form, tag, results)
        if want("waveform"):
            checks += check_waveform(form, tag, results)
        if want("restriction_que"):
            checks += check_restriction(form, tag, results)
        if want("nodal"):
            checks += check_nodal(form, tag, results)
        if want("randomwave") and form.parity == "even" and form.t >= 10:
            results[f"{tag}.rw_expected_count_Y1"] = expected_zero_count(form.t, 1.0).expected_count
    return checks, results
