"""Hilbert transform of the fractal weight and maximal-function bounds.

The kernel convention is Hf(x) = p.v. integral of f(t)/(x-t) dt, without a
1/pi; every reported inequality is scale-free so the convention only fixes
units.  Piecewise-constant parts integrate in closed form through the log
kernel.  The rest of the mass is enclosed adaptively: the evaluator walks
the implicit carrier tree, keeps whole subtrees as interval contributions
(mass times kernel range, or a Riemann pair over equal-mass tile runs), and
always expands the widest pending block, so precision is budget-driven and
never requires enumerating a generation.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass
from fractions import Fraction

from .enclosure import (FloatInterval, Q, log_abs_ratio_interval,
                        ratio_interval)
from .triadic import TriadicCell
from .weights import WeightModel

_INF = float("inf")


class BoundaryError(ValueError):
    """Evaluation point sits on a support-cell endpoint (log singularity)."""


def hilbert_indicator(a, b, x) -> float:
    """H of the indicator of [a, b) at x: log|x-a| - log|x-b| (p.v. inside)."""
    a, b, x = Fraction(a), Fraction(b), Fraction(x)
    if not a < b:
        raise ValueError("need a < b")
    if x == a or x == b:
        raise BoundaryError(f"kernel endpoint hit at x={x}")
    return _indicator_iv(a, b, x).mid


def _indicator_iv(a: Fraction, b: Fraction, x: Fraction) -> FloatInterval:
    if x == a or x == b:
        raise BoundaryError(f"kernel endpoint hit at x={x}")
    return log_abs_ratio_interval(x - a, x - b)


@dataclass(frozen=True)
class _Block:
    gen: int
    left: Fraction
    count: int  # contiguous carrier cells of this generation


@dataclass
class HilbertValue:
    value: FloatInterval
    width: float
    expansions: int
    converged: bool

    @property
    def mid(self) -> float:
        return self.value.mid


class _GenConstants:
    """Per-generation geometry constants reused across adaptive blocks."""

    __slots__ = ("length", "mass", "density", "mass_f", "slen", "side_right")

    def __init__(self, model: WeightModel, gen: int):
        self.length = Q(1, 3 ** (gen * model.k))
        self.mass = model.carrier_w_mass(gen)
        self.density = FloatInterval.from_fraction(self.mass / self.length)
        self.mass_f = float(self.mass)
        self.slen = self.length / 3 ** model.k
        self.side_right = model.side_for(gen + 1) == "right"


def _cell_length(model: WeightModel, gen: int) -> Fraction:
    return Q(1, 3 ** (gen * model.k))


def _enclose_block(gc: _GenConstants, blk: _Block, x: Fraction) -> FloatInterval | None:
    """Interval containing the block's kernel integral; None forces expansion.

    For a single cell the kernel range `mass * [min 1/(x-t), max 1/(x-t)]` is
    sound however the mass sits inside (tightened to the middle-third hull
    where all of it actually lives).  For a run of equal-mass cells the
    lower/upper Riemann pair around the exact log integral is tighter: the
    per-cell granularity costs at most mass * (kernel range over the run).
    """
    length = gc.length
    lo, hi = blk.left, blk.left + blk.count * length
    if lo <= x <= hi:
        return None
    mass = gc.mass
    if blk.count == 1:
        # all mass lives in the middle third plus the adjacent support sliver
        if gc.side_right:
            clo, chi = lo + length / 3, lo + 2 * length / 3 + gc.slen
        else:
            clo, chi = lo + length / 3 - gc.slen, lo + 2 * length / 3
        iv_a = ratio_interval(mass, x - clo)
        iv_b = ratio_interval(mass, x - chi)
        return FloatInterval(min(iv_a.lo, iv_b.lo), max(iv_a.hi, iv_b.hi))
    base = _indicator_iv(lo, hi, x) * gc.density
    # upper bound on the kernel range suffices; floats with a pad are sound
    # because the exact differences below are positive and well separated
    dl, dh = float(x - lo), float(x - hi)
    slack = gc.mass_f * abs(1.0 / dl - 1.0 / dh) * (1 + 1e-9) + 1e-300
    return FloatInterval(base.lo - slack, base.hi + slack)


def hilbert_weight(model: WeightModel, x, tail_budget: float = 1e-6,
                   max_expansions: int = 20000) -> HilbertValue:
    """Adaptive enclosure of Hw(x); reports the achieved width if the budget
    cannot be met within the expansion cap."""
    x = Fraction(x)
    acc = FloatInterval(0.0, 0.0)
    blocks: dict[int, tuple[_Block, FloatInterval | None]] = {}
    heap: list[tuple[float, int]] = []
    counter = 0
    pending_width = 0.0
    unresolved = 0
    gcs: dict[int, _GenConstants] = {}

    def constants(gen: int) -> _GenConstants:
        gc = gcs.get(gen)
        if gc is None:
            gc = gcs[gen] = _GenConstants(model, gen)
        return gc

    def push(blk: _Block):
        nonlocal counter, pending_width, unresolved
        gc = constants(blk.gen)
        if blk.count > 1:
            lo = blk.left
            hi = blk.left + blk.count * gc.length
            if lo < x < hi:
                # split the run around the cell whose closure holds x
                t = min(blk.count - 1, int((x - lo) / gc.length))
                if t > 0:
                    push(_Block(blk.gen, lo, t))
                push(_Block(blk.gen, lo + t * gc.length, 1))
                if t + 1 < blk.count:
                    push(_Block(blk.gen, lo + (t + 1) * gc.length, blk.count - t - 1))
                return
        enc = _enclose_block(gc, blk, x)
        blocks[counter] = (blk, enc)
        if enc is None:
            unresolved += 1
            width = _INF
        else:
            width = enc.width
            pending_width += width
        heapq.heappush(heap, (-width, counter))
        counter += 1

    def expand(blk: _Block):
        nonlocal acc
        gc = constants(blk.gen)
        third = gc.length / 3
        core_l = blk.left + third
        core_r = blk.left + 2 * third
        if gc.side_right:
            sl, sr = core_r, core_r + gc.slen
        else:
            sl, sr = core_l - gc.slen, core_l
        value = model.w_value(blk.gen + 1)
        acc = acc + _indicator_iv(sl, sr, x) * FloatInterval.from_fraction(value)
        push(_Block(blk.gen + 1, core_l, 3 ** (model.k - 1)))

    push(_Block(0, Q(0), 1))
    expansions = 0
    while expansions < max_expansions:
        if not unresolved and acc.width + pending_width <= tail_budget:
            break
        if not heap:
            break
        _neg_w, ident = heapq.heappop(heap)
        if ident not in blocks:
            continue
        blk, enc = blocks.pop(ident)
        if enc is None:
            unresolved -= 1
        else:
            pending_width -= enc.width
        if blk.count > 1:
            # halve the run; the x-side half concentrates the kernel range,
            # so widths decay geometrically under repeated splitting
            cut = blk.count // 2
            length = constants(blk.gen).length
            push(_Block(blk.gen, blk.left, cut))
            push(_Block(blk.gen, blk.left + cut * length, blk.count - cut))
        else:
            expand(blk)
        expansions += 1
    total = acc
    for _blk, enc in blocks.values():
        if enc is None:
            return HilbertValue(FloatInterval(-_INF, _INF), _INF, expansions, False)
        total = total + enc
    return HilbertValue(total, total.width, expansions,
                        total.width <= tail_budget * (1 + 1e-9) + 1e-300)


def hilbert_weight_scaled(model: WeightModel, x, which: str = "w",
                          tail_budget: float = 1e-6,
                          max_expansions: int = 20000) -> HilbertValue:
    """H(w) or H(wtilde) at x."""
    hv = hilbert_weight(model, x, tail_budget, max_expansions)
    if which == "w":
        return hv
    if which != "wTilde":
        raise ValueError("which must be w|wTilde")
    s = FloatInterval(float(model.scale.lo), float(model.scale.hi))
    val = hv.value * s
    return HilbertValue(val, val.width, hv.expansions, hv.converged)


# ---------------------------------------------------------------------------
# Pointwise growth report over the probe set.

def probe_points(model: WeightModel, gen: int, cells: int, samples_per_cell: int,
                 seed: int) -> list[tuple[TriadicCell, Fraction]]:
    """Deterministic sample of probe-cell points at one generation."""
    total = model.jcell_count(gen)
    rng = random.Random(f"probe|{model.k}|{gen}|{cells}|{samples_per_cell}|{seed}")
    if total <= cells:
        branches = list(range(total))
    else:
        branches = sorted(rng.sample(range(total), cells))
    out = []
    for br in branches:
        core = model.jcell(gen, br)
        placed, _ = model.place_core(core, gen)
        probe = placed.middle_child()
        for j in range(samples_per_cell):
            frac = Q(2 * j + 1, 2 * samples_per_cell)
            out.append((probe, probe.left + probe.length * frac))
    return out


def hilbert_pointwise_report(model: WeightModel, generations: int,
                             samples_per_cell: int = 1, seed: int = 0,
                             cells_per_gen: int = 12,
                             rel_width: float = 0.01) -> dict:
    """Ratios |Hw(x)|/w(x) over probe samples at generations <= `generations`."""
    if generations > model.depth:
        raise ValueError("generations exceed the materialized depth")
    rows = []
    for gen in range(1, generations + 1):
        w_val = model.w_value(gen)
        scale = model.k * float(w_val)
        for probe, x in probe_points(model, gen, cells_per_gen, samples_per_cell, seed):
            hv = hilbert_weight(model, x, tail_budget=0.5 * rel_width * scale)
            if hv.value.mid != 0 and hv.width > rel_width * abs(hv.value.mid):
                hv = hilbert_weight(model, x, tail_budget=0.8 * rel_width * abs(hv.value.mid))
            ratio_iv = hv.value.abs() * FloatInterval.from_fraction(1 / w_val)
            rows.append({
                "k": model.k, "policy": model.params.placement, "gen": gen,
                "x": x, "w": w_val, "h_lo": hv.value.lo, "h_hi": hv.value.hi,
                "ratio": ratio_iv.mid, "ratio_lo": ratio_iv.lo, "ratio_hi": ratio_iv.hi,
                "rel_width": hv.width / abs(hv.value.mid) if hv.value.mid else _INF,
                "converged": hv.converged,
            })
    ratios = sorted(r["ratio"] for r in rows)
    med = ratios[len(ratios) // 2] if ratios else _INF
    return {
        "k": model.k,
        "rows": rows,
        "min_ratio": ratios[0] if ratios else _INF,
        "median_ratio": med,
        "max_ratio": ratios[-1] if ratios else _INF,
        "max_rel_width": max((r["rel_width"] for r in rows), default=_INF),
    }


# ---------------------------------------------------------------------------
# Norm-ratio estimate with edge-refined quadrature.

_GAUSS = {
    2: ((-0.5773502691896257, 0.5773502691896257), (1.0, 1.0)),
    3: ((-0.7745966692414834, 0.0, 0.7745966692414834),
        (5 / 9, 8 / 9, 5 / 9)),
    4: ((-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
         0.8611363115940526),
        (0.34785484513745385, 0.6521451548625461, 0.6521451548625461,
         0.34785484513745385)),
}


def _edge_panels(a: Fraction, b: Fraction, levels: int) -> list[tuple[Fraction, Fraction]]:
    """Panels of [a,b] refined geometrically toward both endpoints."""
    h = (b - a) / 2
    left = [(a, a + h * Q(1, 3 ** levels))]
    for j in range(levels, 0, -1):
        left.append((a + h * Q(1, 3 ** j), a + h * Q(1, 3 ** (j - 1))))
    right = sorted((b - (bb - a), b - (aa - a)) for aa, bb in left)
    return left + right


def _panel_sum(model: WeightModel, panels, p: float, nodes: int, budget: float,
               scale: float) -> tuple[float, float]:
    xs, ws = _GAUSS[nodes]
    total = 0.0
    worst = 0.0
    for pa, pb in panels:
        half = (pb - pa) / 2
        mid = (pa + pb) / 2
        for xi, wi in zip(xs, ws):
            xq = mid + half * Q(xi)
            hv = hilbert_weight(model, xq, tail_budget=budget)
            worst = max(worst, hv.width / scale)
            total += wi * float(half) * abs(hv.value.mid) ** p
    return total, worst


def _cell_integral(model: WeightModel, cell: TriadicCell, p: float,
                   levels: int, nodes: int, budget: float,
                   scale: float) -> tuple[float, float, float]:
    """Integral of |Hw|^p over a support cell at two edge refinements.

    Returns (fine, coarse, worst width/scale): `fine` uses levels+1 geometric
    edge panels, `coarse` merges the two innermost panels per side, so the
    pair differs exactly by the extra refinement next to the log singularity.
    """
    fine_panels = _edge_panels(cell.left, cell.right, levels + 1)
    fine, worst = _panel_sum(model, fine_panels, p, nodes, budget, scale)
    h = (cell.right - cell.left) / 2
    coarse_inner = [(cell.left, cell.left + h * Q(1, 3 ** levels)),
                    (cell.right - h * Q(1, 3 ** levels), cell.right)]
    inner_coarse, w2 = _panel_sum(model, coarse_inner, p, nodes, budget, scale)
    # the two innermost fine panels at each edge merge into the coarse ones
    fine_inner = fine_panels[:2] + fine_panels[-2:]
    inner_fine, w3 = _panel_sum(model, fine_inner, p, nodes, budget, scale)
    coarse = fine - inner_fine + inner_coarse
    return fine, coarse, max(worst, w2, w3)


def hilbert_norm_ratio(model: WeightModel, p: int = 2, nodes: int = 3,
                       edge_levels: int = 8, cells_per_gen: int = 24,
                       gen_cap: int = 2, seed: int = 0,
                       budget_rel: float = 2e-3) -> dict:
    """Estimate of ||H wtilde||_{L^p(sigma)} / ||1||_{L^p(wtilde)}.

    Generations above `gen_cap` repeat the deepest computed one with the
    exact per-generation factor q = rho/3, which the computed generations
    are checked against (reported as `decay_observed` vs `decay_exact`).
    """
    if not model.b.is_exact:
        raise ValueError("norm ratio requires integer p (exact dual weight)")
    gen_cap = min(gen_cap, model.depth)
    rng = random.Random(f"norm|{model.k}|{cells_per_gen}|{seed}")
    worst_rel = 0.0
    ests_hi: list[float] = []
    ests_lo: list[float] = []
    for gen in range(1, gen_cap + 1):
        total_cells = model.jcell_count(gen)
        if total_cells <= cells_per_gen:
            branches = list(range(total_cells))
        else:
            branches = sorted(rng.sample(range(total_cells), cells_per_gen))
        sig_val = float(model.sigma_value(gen).lo)
        scale = model.k * float(model.w_value(gen))
        acc_fine = acc_coarse = 0.0
        for br in branches:
            core = model.jcell(gen, br)
            placed, _ = model.place_core(core, gen)
            fine, coarse, w = _cell_integral(model, placed, p, edge_levels, nodes,
                                             budget_rel * scale, scale)
            worst_rel = max(worst_rel, w)
            acc_fine += fine
            acc_coarse += coarse
        factor = sig_val * (total_cells / len(branches))
        ests_hi.append(factor * acc_fine)
        ests_lo.append(factor * acc_coarse)

    q = float(model.rho / 3)
    tail_factor = float(model.u)  # sum of q^j for j >= 1

    def ratio_from(ests: list[float]) -> float:
        total = sum(ests) + ests[-1] * tail_factor
        # total of |Hw|^p sigma over all generations; rescale to wtilde
        sc = float(model.scale.mid)
        norm_h = sc * total ** (1.0 / p)
        denom = sc ** (1.0 / p)  # ||1||_{L^p(wtilde)} = (k^-r)^(1/p)
        return norm_h / denom

    r_hi = ratio_from(ests_hi)
    r_lo = ratio_from(ests_lo)
    indicator = abs(r_hi - r_lo) / r_hi if r_hi else _INF
    decay = (ests_hi[1] / ests_hi[0]) if len(ests_hi) > 1 and ests_hi[0] else None
    return {
        "k": model.k,
        "ratio": r_hi,
        "indicator": indicator,
        "per_gen": ests_hi,
        "decay_observed": decay,
        "decay_exact": q,
        "tail_factor": tail_factor,
        "worst_point_rel_width": worst_rel,
        "converged": indicator < 1e-3,
    }


# ---------------------------------------------------------------------------
# Hardy--Littlewood maximal function on the support.

def _descend_to_support(model: WeightModel, x: Fraction):
    """Home support cell of x plus the carrier chain above it."""
    chain = []
    carrier_left = Q(0)
    gen = 0
    while True:
        length = _cell_length(model, gen)
        third = length / 3
        core_l, core_r = carrier_left + third, carrier_left + 2 * third
        slen = length / 3 ** model.k
        if model.side_for(gen + 1) == "right":
            sl, sr = core_r, core_r + slen
        else:
            sl, sr = core_l - slen, core_l
        chain.append({"gen": gen, "left": carrier_left, "length": length,
                      "core": (core_l, core_r), "support": (sl, sr)})
        if sl <= x < sr:
            return gen + 1, (sl, sr), chain
        if core_l <= x < core_r:
            tau = slen
            t = int((x - core_l) / tau)
            carrier_left = core_l + t * tau
            gen += 1
            if gen > 400:
                raise ValueError("descent did not reach a support cell")
            continue
        raise ValueError(f"x={x} lies outside the support of w")


def maximal_at(model: WeightModel, x, extra_gens: int = 2) -> dict:
    """Enclosure of Mw(x) for x in a support cell.

    The upper bound maximizes full-slab masses over shrunken windows against
    breakpoint candidates; the lower bound averages exact slab masses over
    realized windows.  Both use the measures module, so frontier cells below
    the refinement depth enter adversarially as [0, full mass].
    """
    from .measures import MeasureQuery, mass
    x = Fraction(x)
    home_gen, (hl, hr), chain = _descend_to_support(model, x)
    points = {Q(0), Q(1), hl, hr}
    for level in chain:
        points.update({level["left"], level["left"] + level["length"],
                       level["core"][0], level["core"][1],
                       level["support"][0], level["support"][1]})
    lam = hr - hl
    # geometric breakpoints around x keep every window's end slab short
    # relative to its distance, so full-slab numerators stay proportionate
    d = lam / 16
    while d < 2:
        for cand in (x - d, x + d):
            if 0 < cand < 1:
                points.add(cand)
        d *= 2
    # split off the core tiles flanking the home support cell; their middle
    # thirds (where any deeper mass lives) become their own slabs
    core_l, core_r = chain[-1]["core"]
    for t_left in (hl - lam, hr):
        if core_l <= t_left and t_left + lam <= core_r:
            points.update({t_left, t_left + lam,
                           t_left + lam / 3, t_left + 2 * lam / 3})
    cuts = sorted(p for p in points if 0 <= p <= 1)
    depth = (home_gen + extra_gens + 2) * model.k
    slabs = []
    for a, b in zip(cuts, cuts[1:]):
        if a >= b:
            continue
        from .triadic import IntervalQ
        m = mass(model, MeasureQuery("w", IntervalQ(a, b), depth))
        slabs.append({"a": a, "b": b, "mass": m})
    idx_x = next(i for i, s in enumerate(slabs) if s["a"] <= x < s["b"])
    n = len(slabs)
    prefix_hi = [Q(0)]
    prefix_lo = [Q(0)]
    for s in slabs:
        prefix_hi.append(prefix_hi[-1] + s["mass"].hi)
        prefix_lo.append(prefix_lo[-1] + s["mass"].lo)
    w_home = model.w_value(home_gen)
    upper = w_home
    lower = w_home
    for i in range(idx_x + 1):
        for j in range(idx_x, n):
            if i == idx_x and j == idx_x:
                continue
            num = prefix_hi[j + 1] - prefix_hi[i]
            lo_pt = x if i == idx_x else slabs[i]["b"]
            hi_pt = x if j == idx_x else slabs[j]["a"]
            denom = hi_pt - lo_pt
            if denom <= 0:
                continue
            upper = max(upper, num / denom)
            num_lo = prefix_lo[j + 1] - prefix_lo[i]
            win = slabs[j]["b"] - slabs[i]["a"]
            if win > 0:
                lower = max(lower, num_lo / win)
    return {"x": x, "gen": home_gen, "w": w_home,
            "lower": lower, "upper": upper,
            "ratio_upper": float(upper / w_home)}


def maximal_report(model: WeightModel, generations: int, cells_per_gen: int = 8,
                   samples_per_cell: int = 1, seed: int = 0,
                   extra_gens: int = 2) -> dict:
    """Worst Mw/w over probe samples; the classical bound is 13."""
    rows = []
    for gen in range(1, generations + 1):
        for probe, x in probe_points(model, gen, cells_per_gen, samples_per_cell, seed):
            res = maximal_at(model, x, extra_gens)
            rows.append({"k": model.k, "gen": gen, "x": x, "w": res["w"],
                         "m_lo": res["lower"], "m_hi": res["upper"],
                         "ratio_upper": res["ratio_upper"]})
    return {"k": model.k, "rows": rows,
            "worst_ratio": max(r["ratio_upper"] for r in rows),
            "all_within_13": all(r["ratio_upper"] <= 13 for r in rows)}
