"""Middle-third fractal weight pair on [0,1).

Generation by generation, every carrier cell pushes its whole w-mass onto
the union of its middle child (the "core") and one adjacent cell of length
3^(1-k) times the core's (the "support cell"), uniformly.  The dual weight
sigma is w^(1-p) on the support.  Everything about the limit object has a
closed form per generation, so the model is lazy: families are materialized
up to a depth budget (capped lists for huge generations), while masses,
values and averages at any generation come from exact formulas.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .enclosure import Enclosure, Q, pow_enclosure, qstr
from .triadic import IntervalQ, TriadicCell, cell_from_index

PLACEMENTS = ("right", "left", "alternating")

FAMILY_CAP = 2048


@dataclass(frozen=True)
class ConstructionParams:
    """Parameters of one weight pair: k >= 2, p > 1, r in (max(1,1/(p-1)), p')."""

    k: int
    p: Fraction = Q(2)
    r: Fraction = Q(3, 2)
    placement: str = "right"
    depth: int = 2

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        object.__setattr__(self, "r", Fraction(self.r))
        if not isinstance(self.k, int) or self.k < 2:
            raise ValueError(f"k must be an integer >= 2, got {self.k}")
        if self.p <= 1:
            raise ValueError(f"p must be > 1, got {self.p}")
        lo = max(Q(1), 1 / (self.p - 1))
        if not lo < self.r < self.p_prime:
            raise ValueError(
                f"r must lie strictly in ({lo}, {self.p_prime}), got {self.r}")
        if self.placement not in PLACEMENTS:
            raise ValueError(f"unknown placement policy {self.placement!r}")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")

    @property
    def p_prime(self) -> Fraction:
        return self.p / (self.p - 1)


@dataclass(frozen=True)
class SupportCell:
    """One materialized support cell: w == w_value and sigma == sigma_value on it."""

    gen: int
    core: TriadicCell
    cell: TriadicCell
    side: str
    w_value: Fraction
    sigma_value: Enclosure


@dataclass(frozen=True)
class CellWeight:
    """Result of weight_on_cell: constant value, zero, or non-constant with exact mass."""

    kind: str  # "const" | "zero" | "unresolved"
    value: Enclosure | None
    mass: Enclosure


class WeightModel:
    """Immutable handle on one constructed pair (w_k, sigma_k, wtilde_k)."""

    def __init__(self, params: ConstructionParams, family_cap: int = FAMILY_CAP):
        self.params = params
        k = params.k
        self.k = k
        self.u = 3 ** (k - 1)
        self.rho = Q(3 ** k, self.u + 1)          # <w> over a carrier gains rho per generation
        if params.p.denominator == 1:
            self.b = Enclosure.exact(self.rho ** (1 - params.p))
        else:
            self.b = pow_enclosure(Enclosure.exact(self.rho), 1 - params.p)
        self.a = self.b * Q(1, 3)
        self.c = (3 * self.b) / (Enclosure.exact(3) - self.b)
        self.scale = pow_enclosure(Enclosure.exact(Q(k)), -params.r)
        self.depth = params.depth
        self.family_cap = family_cap
        self.flips: list[tuple[int, str]] = []
        self._materialize()

    # -- counts and closed forms ------------------------------------------

    def kcell_count(self, gen: int) -> int:
        return 3 ** (gen * (self.k - 1))

    def jcell_count(self, gen: int) -> int:
        if gen < 1:
            raise ValueError("core generations start at 1")
        return 3 ** ((gen - 1) * (self.k - 1))

    def w_value(self, gen: int) -> Fraction:
        """Constant value of w on generation-`gen` support cells."""
        return self.rho ** gen

    def sigma_value(self, gen: int) -> Enclosure:
        return self.b.pow_int(gen)

    def wtilde_value(self, gen: int) -> Enclosure:
        return self.scale * self.w_value(gen)

    def carrier_w_mass(self, gen: int) -> Fraction:
        return Q(1, (self.u + 1) ** gen)

    def carrier_sigma_mass(self, gen: int) -> Enclosure:
        return self.c * Q(1, 3 ** self.k) * self.b.pow_int(gen) * Q(1, 3 ** (gen * self.k))

    def support_w_mass(self, gen: int) -> Fraction:
        # equals the carrier mass of the same generation
        return Q(1, (self.u + 1) ** gen)

    def support_sigma_mass(self, gen: int) -> Enclosure:
        return self.b.pow_int(gen) * Q(1, 3 ** (gen * self.k))

    def avg_w_carrier(self, gen: int) -> Fraction:
        return self.rho ** gen

    def avg_sigma_carrier(self, gen: int) -> Enclosure:
        return self.c * Q(1, 3 ** self.k) * self.b.pow_int(gen)

    # -- implicit family addressing ---------------------------------------

    def kcell(self, gen: int, branch: int) -> TriadicCell:
        """Carrier cell number `branch` (lexicographic) of generation `gen`."""
        if not 0 <= branch < self.kcell_count(gen):
            raise ValueError(f"branch {branch} out of range at generation {gen}")
        address = []
        width = self.k - 1
        base = 3 ** width
        digits = []
        n = branch
        for _ in range(gen):
            n, t = divmod(n, base)
            digits.append(t)
        for t in reversed(digits):
            address.append("1" + _base3(t, width))
        return TriadicCell("".join(address))

    def jcell(self, gen: int, branch: int) -> TriadicCell:
        return self.kcell(gen - 1, branch).middle_child()

    def place_core(self, core: TriadicCell, gen: int) -> tuple[TriadicCell, str]:
        """Support cell adjacent to `core`, with the policy side (flips recorded)."""
        side = self.side_for(gen)
        depth = core.depth + self.k - 1
        lo = core.index * 3 ** (self.k - 1)
        hi = (core.index + 1) * 3 ** (self.k - 1)
        parent = core.parent()
        plo = parent.index * 3 ** self.k
        phi = (parent.index + 1) * 3 ** self.k
        for attempt, s in enumerate((side, _other(side))):
            idx = hi if s == "right" else lo - 1
            if plo <= idx < phi:
                if attempt == 1:
                    self.flips.append((gen, core.address))
                return cell_from_index(depth, idx), s
        raise RuntimeError("no admissible placement inside parent carrier")

    def side_for(self, gen: int) -> str:
        pol = self.params.placement
        if pol == "alternating":
            return "right" if gen % 2 == 1 else "left"
        return pol

    def probe_cell(self, support: TriadicCell) -> TriadicCell:
        """Middle child of a support cell; the pointwise Hilbert bound lives here."""
        return support.middle_child()

    # -- materialization ----------------------------------------------------

    def _materialize(self):
        cap = self.family_cap
        self.kcells: list[list[TriadicCell]] = []
        self.jcells: dict[int, list[TriadicCell]] = {}
        self.sampled_generations: set[tuple[str, int]] = set()
        for gen in range(self.depth + 1):
            total = self.kcell_count(gen)
            branches = _even_sample(total, cap)
            if len(branches) < total:
                self.sampled_generations.add(("K", gen))
            self.kcells.append([self.kcell(gen, i) for i in branches])
        self.support: list[SupportCell] = []
        for gen in range(1, self.depth + 1):
            total = self.jcell_count(gen)
            branches = _even_sample(total, cap)
            if len(branches) < total:
                self.sampled_generations.add(("J", gen))
            cells = []
            for i in branches:
                core = self.jcell(gen, i)
                cells.append(core)
                placed, side = self.place_core(core, gen)
                self.support.append(SupportCell(
                    gen=gen, core=core, cell=placed, side=side,
                    w_value=self.w_value(gen), sigma_value=self.sigma_value(gen)))
            self.jcells[gen] = cells

    def support_cells(self, gen: int | None = None) -> list[SupportCell]:
        if gen is None:
            return list(self.support)
        return [s for s in self.support if s.gen == gen]

    # -- serialization ------------------------------------------------------

    def serialize(self) -> dict:
        p = self.params
        return {
            "params": {"k": p.k, "p": qstr(p.p), "r": qstr(p.r),
                       "placement": p.placement, "depth": p.depth},
            "family_counts": {
                "K": {str(g): self.kcell_count(g) for g in range(self.depth + 1)},
                "J": {str(g): self.jcell_count(g) for g in range(1, self.depth + 1)},
            },
            "support": [
                {"gen": s.gen, "core": s.core.address, "cell": s.cell.address,
                 "side": s.side, "w_value": qstr(s.w_value),
                 "sigma_value": [qstr(s.sigma_value.lo), qstr(s.sigma_value.hi)]}
                for s in self.support
            ],
            "unresolved": {
                "generation": self.depth,
                "cell_count": self.kcell_count(self.depth),
                "w_mass_per_cell": qstr(self.carrier_w_mass(self.depth)),
                "sigma_mass_per_cell": [qstr(self.carrier_sigma_mass(self.depth).lo),
                                        qstr(self.carrier_sigma_mass(self.depth).hi)],
            },
            "placement_flips": [{"gen": g, "core": addr} for g, addr in self.flips],
        }


def build_construction(params: ConstructionParams, family_cap: int = FAMILY_CAP) -> WeightModel:
    return WeightModel(params, family_cap=family_cap)


def weight_on_cell(model: WeightModel, cell: TriadicCell, which: str = "w") -> CellWeight:
    """Classify w (or sigma, wtilde) restricted to a triadic cell.

    Constant exactly when the cell sits inside a support cell; zero on the
    vanishing set; otherwise a marker with the cell's exact mass.
    """
    _check_which(which)
    carrier = TriadicCell("")
    gen = 0
    k = model.k
    while True:
        if cell == carrier:
            return CellWeight("unresolved", None, _carrier_mass(model, which, gen))
        core = carrier.middle_child()
        placed, _side = model.place_core(core, gen + 1)
        if placed.contains(cell):
            val = _value(model, which, gen + 1)
            return CellWeight("const", val, val * cell.length)
        if cell.contains(placed):
            return CellWeight("unresolved", None, _support_mass(model, which, gen + 1))
        if core.contains(cell):
            tile_depth = (gen + 1) * k
            if cell.depth < tile_depth:
                count = 3 ** (tile_depth - cell.depth)
                mass = _carrier_mass(model, which, gen + 1) * count
                return CellWeight("unresolved", None, mass)
            if cell.depth == tile_depth:
                carrier = cell
                gen += 1
                continue
            # descend into the unique tile containing the cell
            carrier = TriadicCell(cell.address[:tile_depth])
            gen += 1
            continue
        return CellWeight("zero", Enclosure.exact(0), Enclosure.exact(0))


def _carrier_mass(model, which, gen) -> Enclosure:
    if which == "w":
        return Enclosure.exact(model.carrier_w_mass(gen))
    if which == "sigma":
        return model.carrier_sigma_mass(gen)
    return model.scale * model.carrier_w_mass(gen)


def _support_mass(model, which, gen) -> Enclosure:
    if which == "w":
        return Enclosure.exact(model.support_w_mass(gen))
    if which == "sigma":
        return model.support_sigma_mass(gen)
    return model.scale * model.support_w_mass(gen)


def _value(model, which, gen) -> Enclosure:
    if which == "w":
        return Enclosure.exact(model.w_value(gen))
    if which == "sigma":
        return model.sigma_value(gen)
    return model.wtilde_value(gen)


def _check_which(which: str):
    if which not in ("w", "sigma", "wTilde"):
        raise ValueError(f"which must be w|sigma|wTilde, got {which!r}")


# ---------------------------------------------------------------------------
# Direct sum of shifted, rescaled copies.

@dataclass(frozen=True)
class CompositeCopy:
    k: int
    shift: int  # 9**k
    model: WeightModel
    scale: Enclosure  # k**(-r)


@dataclass(frozen=True)
class CompositeWeight:
    copies: tuple[CompositeCopy, ...] = field(default_factory=tuple)

    def domain(self) -> list[IntervalQ]:
        return [IntervalQ(Q(c.shift), Q(c.shift + 1)) for c in self.copies]


def direct_sum(models: list[WeightModel], k_range: tuple[int, int] | None = None) -> CompositeWeight:
    """Shifted sum: copy k sits on [9^k, 9^k+1) with w scaled by k^-r."""
    if k_range is not None:
        k0, k1 = k_range
        if k0 < 2 or k1 < k0:
            raise ValueError(f"bad k range [{k0}, {k1}]")
        ks = [m.k for m in models]
        if ks != list(range(k0, k1 + 1)):
            raise ValueError(f"models' k values {ks} do not fill range [{k0}, {k1}]")
    seen = set()
    copies = []
    for m in models:
        shift = 9 ** m.k
        if shift in seen:
            raise ValueError(f"overlapping shift 9^{m.k}")
        seen.add(shift)
        copies.append(CompositeCopy(k=m.k, shift=shift, model=m, scale=m.scale))
    return CompositeWeight(tuple(sorted(copies, key=lambda c: c.k)))


# ---------------------------------------------------------------------------

def _base3(n: int, width: int) -> str:
    digits = []
    for _ in range(width):
        n, d = divmod(n, 3)
        digits.append("012"[d])
    return "".join(reversed(digits))


def _even_sample(total: int, cap: int) -> list[int]:
    """Deterministic evenly spaced branch indices (all of them when small)."""
    if total <= cap:
        return list(range(total))
    return sorted({(i * total) // cap for i in range(cap)})


def _other(side: str) -> str:
    return "left" if side == "right" else "right"
