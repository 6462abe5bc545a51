"""Sign grids over the fundamental domain, nodal-domain labelling with the
modular gluing, inert/split classification and census comparisons.

Grid conventions: columns sit at x_i = -1/2 + i/n (i = 0..n-1, n even), so
column 0 is the line x = -1/2 (identified with x = 1/2, i.e. delta2) and
column n/2 is x = 0 (delta1). The reflection sigma(x + iy) = -x + iy maps
column i to column (n - i) mod n. Cells with x^2 + y^2 < 1 lie outside the
fundamental domain and are masked. The lowest valid cell of column i
borders the arc |z| = 1, where S(z) = -1/z identifies it with the lowest
valid cell of column n - i.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from scipy.cluster.hierarchy import DisjointSet

from .errors import ConsistencyError, DomainError, ResourceError
from .parallel import pmap
from .restriction import Crossing, scan_crossings, delta_top, sign_changes_on_horocycle
from .specfun import bessel_k_zero
from .waveform import MaassForm, eval_direct, eval_phi_x, eval_phi_y

BS_CONSTANT = 2.0 / math.pi * (3 * math.sqrt(3) - 5)
ZERO_THRESHOLD = 1e-9
MAX_CELLS = 8_000_000
_FOUR = ndimage.generate_binary_structure(2, 1)


@dataclass
class SignGrid:
    """Signs of a function on a rectangular grid clipped to the fundamental domain.

    `signs[j, i]` is the sign at (x[i], y[j]); masked cells hold 0 and have
    `valid` False. `bottom[i]` is the row of the lowest valid cell of
    column i (the cell touching the arc).
    """

    x: np.ndarray
    y: np.ndarray
    step_x: float
    step_y: float
    signs: np.ndarray
    valid: np.ndarray
    bottom: np.ndarray
    parity: str = "even"
    t: float = 0.0
    resolution: float = 8.0
    gluing: tuple = ("T: x=-1/2 ~ x=1/2", "S: arc z ~ -1/z", "sigma: x ~ -x (classification)")

    @property
    def n_cols(self) -> int:
        return self.x.size

    def sigma_columns(self) -> np.ndarray:
        n = self.n_cols
        return (n - np.arange(n)) % n

    def digest(self) -> str:
        import hashlib

        return hashlib.sha256(self.signs.astype(np.int8).tobytes()).hexdigest()[:16]


def grid_step(t: float, resolution: float) -> float:
    """Step giving `resolution` samples per wavelength 2 pi y/t at y = sqrt(3)/2."""
    return 2 * math.pi * (math.sqrt(3) / 2) / (t * resolution)


def grid_from_function(f, t: float, y_lo: float, y_hi: float, resolution: float = 8.0,
                       parity: str = "even", max_cells: int = MAX_CELLS) -> SignGrid:
    """Sign grid of a vectorised f(x, y) (used for forms and synthetic tests)."""
    if y_lo < 0.85:
        raise DomainError("y_lo must be at least 0.85")
    if y_hi <= max(y_lo, 1.0):
        raise DomainError("y_hi must exceed max(y_lo, 1)")
    h = grid_step(t, resolution)
    n = 2 * int(math.ceil(1.0 / (2 * h)))
    hx = 1.0 / n
    rows = int(math.floor((y_hi - y_lo) / hx)) + 1
    if rows * n > max_cells:
        factor = resolution * math.sqrt(max_cells / (rows * n))
        raise ResourceError(f"grid needs {rows * n} cells (> {max_cells}); "
                            f"try a resolution factor below {factor:.1f} or a smaller y range")
    x = -0.5 + hx * np.arange(n)
    y = y_lo + hx * np.arange(rows)
    valid = (x[None, :] ** 2 + y[:, None] ** 2) >= 1.0

    def block(js):
        yy = np.repeat(y[js], n)
        xx = np.tile(x, len(js))
        return np.asarray(f(xx, yy), dtype=float).reshape(len(js), n)

    blocks = [np.arange(s, min(s + 64, rows)) for s in range(0, rows, 64)]
    vals = np.vstack(pmap(block, blocks))
    vals[~valid] = 0.0
    # zero threshold relative to the amplitude over nearby rows (the local
    # noise scale; rows cut short by the arc alone can be unrepresentative)
    amp = ndimage.maximum_filter1d(np.max(np.abs(vals), axis=1), size=17, mode="nearest")[:, None]
    signs = np.where(np.abs(vals) < ZERO_THRESHOLD * amp, 0, np.sign(vals)).astype(np.int8)
    signs[~valid] = 0
    if parity == "odd":
        # odd functions vanish identically on the sigma-fixed lines
        signs[:, [0, n // 2]] = 0
    bottom = np.argmax(valid, axis=0)
    bottom[~valid.any(axis=0)] = -1
    return SignGrid(x, y, hx, hx, signs, valid, bottom, parity, float(t), float(resolution))


def sign_grid(form: MaassForm, y_lo: float = 0.85, y_hi: float | None = None,
              resolution: float = 8.0, max_cells: int = MAX_CELLS) -> SignGrid:
    """Signs of phi over the fundamental domain between heights y_lo and y_hi.

    The uniform step satisfies the resolution rule (>= `resolution` samples
    per hyperbolic wavelength 2 pi/t) at the lowest point of the domain, and
    hence everywhere above it.
    """
    if y_hi is None:
        y_hi = max(delta_top(form), 2.0)
    return grid_from_function(lambda x, y: eval_direct(form, x, y), form.t, y_lo, y_hi,
                              resolution, form.parity, max_cells)


@dataclass(frozen=True)
class Component:
    label: int
    sign: int
    cells: int
    area: float
    y_min: float
    y_max: float
    touches_delta: bool
    touches_top: bool
    partner: int  # label of the sigma image (== label when sigma-invariant, 0 if ambiguous)


@dataclass
class NodalDecomposition:
    labels: np.ndarray
    components: list
    N: int
    R: int
    S_split: int
    anomalies: list = field(default_factory=list)
    census: tuple | None = None

    @property
    def consistent(self) -> bool:
        return not self.anomalies and self.N == self.R + 2 * self.S_split


def _label(grid: SignGrid) -> np.ndarray:
    signs = grid.signs
    lab = np.zeros(signs.shape, dtype=np.int64)
    offset = 0
    for s in (1, -1):
        l_s, k = ndimage.label(signs == s, structure=_FOUR)
        lab[l_s > 0] = l_s[l_s > 0] + offset
        offset += k
    ds = DisjointSet(range(1, offset + 1))
    n = grid.n_cols
    # T: column 0 (x = -1/2) borders column n-1 (x = 1/2 - 1/n)
    both = (lab[:, 0] > 0) & (lab[:, n - 1] > 0) & (signs[:, 0] == signs[:, n - 1])
    for a, b in zip(lab[both, 0], lab[both, n - 1]):
        ds.merge(int(a), int(b))
    # S: arc cell of column i ~ arc cell of column n - i
    for i in range(n):
        k = (n - i) % n
        j1, j2 = grid.bottom[i], grid.bottom[k]
        if j1 < 0 or j2 < 0:
            continue
        a, b = lab[j1, i], lab[j2, k]
        if a > 0 and b > 0 and signs[j1, i] == signs[j2, k]:
            ds.merge(int(a), int(b))
    # canonical labels in raster order of first appearance
    roots = np.zeros(offset + 1, dtype=np.int64)
    for v in range(1, offset + 1):
        roots[v] = ds[v]
    merged = roots[lab]
    nz = merged.ravel()[merged.ravel() > 0]
    uniq, first = np.unique(nz, return_index=True)
    remap = np.zeros(offset + 1, dtype=np.int64)
    remap[uniq[np.argsort(first)]] = np.arange(1, uniq.size + 1)
    return remap[merged]


def components(grid: SignGrid) -> NodalDecomposition:
    """Label nodal domains (4-connectivity, glued by T and S) and classify them."""
    labels = _label(grid)
    N = int(labels.max())
    n = grid.n_cols
    sig = grid.sigma_columns()
    img = labels[:, sig]
    cell_area = grid.step_x * grid.step_y / grid.y ** 2
    fixed_cols = np.zeros(n, dtype=bool)
    fixed_cols[[0, n // 2]] = True
    arc = np.zeros_like(labels, dtype=bool)
    for i in range(n):
        if grid.bottom[i] >= 0:
            arc[grid.bottom[i], i] = True
    on_delta = fixed_cols[None, :] & grid.valid
    if grid.parity == "even":
        on_delta = on_delta | arc
    flat = labels.ravel()
    areas = np.bincount(flat, weights=np.broadcast_to(cell_area[:, None], labels.shape).ravel(), minlength=N + 1)
    cells = np.bincount(flat, minlength=N + 1)
    touch = np.bincount(flat[on_delta.ravel()], minlength=N + 1) > 0
    top = np.zeros(N + 1, dtype=bool)
    top[np.unique(labels[-1])] = True
    rows = np.broadcast_to(np.arange(labels.shape[0])[:, None], labels.shape).ravel()
    ymin = np.full(N + 1, np.inf)
    ymax = np.full(N + 1, -np.inf)
    np.minimum.at(ymin, flat, grid.y[rows])
    np.maximum.at(ymax, flat, grid.y[rows])
    partners = {}
    mask = (labels > 0) & (img > 0)
    pairs = np.unique(np.stack([labels[mask], img[mask]], axis=1), axis=0)
    for a, b in pairs:
        partners.setdefault(int(a), set()).add(int(b))
    comps = []
    for c in range(1, N + 1):
        ps = partners.get(c, set())
        p = next(iter(ps)) if len(ps) == 1 else 0
        j = np.argmax(flat == c)
        comps.append(Component(c, int(grid.signs.ravel()[j]), int(cells[c]), float(areas[c]),
                               float(ymin[c]), float(ymax[c]), bool(touch[c]), bool(top[c]), p))
    R, S, anomalies = _classify(comps)
    return NodalDecomposition(labels, comps, N, R, S, anomalies)


def _classify(comps):
    anomalies = []
    R = 0
    split = 0
    by_label = {c.label: c for c in comps}
    for c in comps:
        if c.touches_delta:
            R += 1
            if c.partner != c.label:
                anomalies.append(f"component {c.label} meets delta but is not sigma-invariant")
        else:
            split += 1
            if c.partner == 0 or c.partner == c.label:
                anomalies.append(f"component {c.label} has no distinct sigma image")
            elif by_label[c.partner].partner != c.label or by_label[c.partner].touches_delta:
                anomalies.append(f"component {c.label} is not paired with its sigma image")
    if split % 2:
        anomalies.append("odd number of split components")
    return R, split // 2, anomalies


def classify_inert_split(decomp: NodalDecomposition, strict: bool = True):
    """(R, S_split): inert domains meet delta, split ones pair off under sigma."""
    if strict and decomp.anomalies:
        raise ConsistencyError("; ".join(decomp.anomalies[:5]) + " (refine the grid)")
    return decomp.R, decomp.S_split


# ---------------------------------------------------------------- delta census
@dataclass(frozen=True)
class DeltaCensus:
    """Zeros (m) and sign changes (n) of phi on the closed loop delta.

    The loop runs from the cusp down delta2 to rho, along the arc to i and
    up delta1 back to the cusp. The cusp is a zero of every cusp form and
    counts in m; it counts in n when phi has opposite signs at the two ends
    of the loop (always so for even forms, by the n = 1 term).
    """

    m: int
    n: int
    crossings: tuple  # (branch, parameter, Crossing)
    cusp_sign_change: bool
    spw: float


def _loop(form: MaassForm, top: float):
    odd = form.parity == "odd"
    L2 = math.log(top / (math.sqrt(3) / 2))
    L3 = math.log(math.sqrt(3))  # arclength of the arc from rho to i
    L1 = math.log(top)
    t6 = math.tan(math.pi / 6)

    def where(s):
        s = np.asarray(s, dtype=float)
        seg = np.where(s < L2, 2, np.where(s < L2 + L3, 3, 1))
        par = np.where(seg == 2, top * np.exp(-s),
                       np.where(seg == 3, 2 * np.arctan(t6 * np.exp(np.clip(s - L2, 0, L3))),
                                np.exp(np.clip(s - L2 - L3, 0, L1))))
        return seg, par

    def f(s):
        seg, par = where(s)
        th = np.where(seg == 3, par, math.pi / 2)
        x = np.where(seg == 1, 0.0, np.where(seg == 2, 0.5, np.cos(th)))
        y = np.where(seg == 3, np.sin(th), par)
        if not odd:
            return eval_direct(form, x, y)
        # inward normal derivative on the boundary of F+
        px = eval_phi_x(form, x, y)
        out = np.where(seg == 1, px, -px)
        arc = seg == 3
        if np.any(arc):
            out[arc] = np.cos(th[arc]) * px[arc] + np.sin(th[arc]) * eval_phi_y(form, x[arc], y[arc])
        return out

    return f, where, L1 + L2 + L3


def delta_zero_census(form: MaassForm, spw: float = 8.0) -> DeltaCensus:
    """(m, n) on delta = delta2 + delta3 + delta1 scanned as one path in
    hyperbolic arclength, so corner zeros at i and rho are found once."""
    if form.parity != "even":
        raise DomainError("the delta census is defined for even forms")
    top = delta_top(form)
    f, where, L = _loop(form, top)
    cr, _ = scan_crossings(f, 0.0, L, 2 * math.pi / (form.t * spw))
    names = {1: "delta1", 2: "delta2", 3: "delta3"}
    out = []
    for c in cr:
        seg, par = where(np.array([c.location]))
        out.append((names[int(seg[0])], float(par[0]), c))
    ends = f(np.array([0.0, L]))
    cusp_change = bool(ends[0] * ends[1] < 0)
    n = sum(1 for c in cr if not c.tangential) + int(cusp_change)
    return DeltaCensus(len(cr) + 1, n, tuple(out), cusp_change, spw)


@dataclass(frozen=True)
class Theorem21Report:
    R: int
    m: int
    n: int
    lower: float
    ok: bool
    slack_low: float
    slack_high: int
    advice: str | None = None


def theorem21_check(decomp: NodalDecomposition, census) -> Theorem21Report:
    """n/2 + 1 <= R <= m, with slacks; a violation suggests refining the grid."""
    m, n = (census.m, census.n) if isinstance(census, DeltaCensus) else census
    lower = n / 2 + 1
    ok = lower <= decomp.R <= m
    advice = None if ok else "inequality violated: refine the sign grid or the delta scan"
    return Theorem21Report(decomp.R, m, n, lower, ok, decomp.R - lower, m - decomp.R, advice)


def courant_bound(t: float) -> float:
    """Weyl-law form of Courant's bound, (t^2 + 1/4)/24."""
    if t <= 0:
        raise DomainError("t must be positive")
    return (t * t + 0.25) / 24.0


def bs_prediction(t: float) -> float:
    """Percolation-model count (2/pi)(3 sqrt 3 - 5)(t^2 + 1/4)/24."""
    return BS_CONSTANT * courant_bound(t)


# ---------------------------------------------------------------- near-cusp structure
@dataclass
class CuspRegionReport:
    y_cusp: float
    max_offset: float
    localized: bool
    levels: list  # (Y, crossings)
    cuts: list  # (j, k_j/(2 pi), nearest delta1 zero or None)
    inert_high: int | None = None
    inert_target: float | None = None
    fk_min: float | None = None
    fk_components: int = 0
    notes: list = field(default_factory=list)


def cusp_region_report(form: MaassForm, decomp: NodalDecomposition | None = None, grid: SignGrid | None = None,
                       n_levels: int = 24, tol: float = 1e-3) -> CuspRegionReport:
    """Near-cusp checks for an even form.

    (i) above y_1 + 2 t^{1/3}/(2 pi) every sign change in x lies within
    `tol` of x = +-1/4; (ii) zeros of phi on delta1 next to the horizontal
    cut levels k_{t,j}/(2 pi); (iii) inert domains reaching above t/100
    against max(1, t/1000); (iv) the smallest Area * (1/4 + t^2) over
    components wholly inside a band y_{l+1} < y < y_l.
    """
    if form.parity != "even":
        raise DomainError("cusp_region_report is for even forms")
    t = form.t
    y1 = t / (2 * math.pi)
    y_c = y1 + 2 * t ** (1 / 3) / (2 * math.pi)
    levels, worst = [], 0.0
    for Y in np.linspace(y_c, y_c + 4.0, n_levels):
        cl = sign_changes_on_horocycle(form, float(Y))
        xs = cl.params
        off = max((min(abs(abs(x) - 0.25), 1.0) for x in xs), default=0.0)
        worst = max(worst, off)
        levels.append((float(Y), xs))
    rep = CuspRegionReport(y_c, worst, worst <= tol, levels, [])
    from .restriction import sign_changes_on_delta

    d1 = sign_changes_on_delta(form, "delta1").params
    y2 = t / (4 * math.pi)
    j = 1
    while True:
        try:
            kj = bessel_k_zero(t, j) / (2 * math.pi)
        except Exception:  # noqa: BLE001 - no further zeros in range
            break
        if kj <= y2 or j > 50:
            break
        near = min(d1, key=lambda v: abs(v - kj)) if d1 else None
        rep.cuts.append((j, kj, near))
        j += 1
    if decomp is not None and grid is not None:
        hi = t / 100
        rep.inert_high = sum(1 for c in decomp.components if c.touches_delta and c.y_max > hi)
        rep.inert_target = max(1.0, t / 1000)
        lam = 0.25 + t * t
        vals = []
        for c in decomp.components:
            if c.touches_top:
                continue
            for l in range(1, 200):
                lo, up = t / (2 * math.pi * (l + 1)), t / (2 * math.pi * l)
                if up < grid.y[0]:
                    break
                if lo < c.y_min and c.y_max < up:
                    vals.append(c.area * lam)
                    break
        rep.fk_components = len(vals)
        rep.fk_min = min(vals) if vals else None
    if form.t < 1000:
        rep.notes.append("the t/1000 inert-domain bound is only informative for t >= 1000")
    return rep
