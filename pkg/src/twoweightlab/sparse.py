"""Sparse interval families: validation, generation, testing sums, embedding.

Families are finite tuples of half-open rational intervals.  A martingale
family must satisfy nested-or-disjoint trichotomy plus the child-measure
bound: the maximal strict members below any member R carry total length at
most eps*|R|.  A weak family carries a witness of pairwise disjoint subsets
E(I) with |E(I)| >= (1-eta)|I|.  All checks run in exact rationals.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .enclosure import Enclosure, Q, enclosure_sum, pow_enclosure, qstr
from .measures import MeasureQuery, average, carrier_generation, mass
from .triadic import IntervalQ, TriadicCell
from .weights import WeightModel


class FamilyError(ValueError):
    pass


class SplitError(RuntimeError):
    pass


@dataclass(frozen=True)
class SparseFamily:
    members: tuple[IntervalQ, ...]
    kind: str  # "martingale" | "weak"
    sparseness: Fraction  # eps for martingale, eta for weak
    witness: tuple[tuple[IntervalQ, tuple[IntervalQ, ...]], ...] | None = None

    def __post_init__(self):
        if self.kind not in ("martingale", "weak"):
            raise FamilyError(f"unknown family kind {self.kind!r}")
        if not 0 < self.sparseness < 1:
            raise FamilyError(f"sparseness must lie in (0,1), got {self.sparseness}")
        if len(set(self.members)) != len(self.members):
            raise FamilyError("duplicate members")

    def __len__(self):
        return len(self.members)

    def serialize(self) -> dict:
        out = {
            "kind": self.kind,
            "sparseness": qstr(self.sparseness),
            "members": [[qstr(i.left), qstr(i.right)] for i in self.members],
        }
        if self.witness is not None:
            out["witness"] = [
                {"member": [qstr(i.left), qstr(i.right)],
                 "sets": [[qstr(e.left), qstr(e.right)] for e in es]}
                for i, es in self.witness
            ]
        return out


def family_from_cells(cells, kind: str, sparseness) -> SparseFamily:
    return SparseFamily(tuple(c.interval() for c in cells), kind, Fraction(sparseness))


def family_from_serialized(payload: dict) -> SparseFamily:
    """Inverse of SparseFamily.serialize (witness included when present)."""
    members = tuple(IntervalQ(Fraction(a), Fraction(b))
                    for a, b in payload["members"])
    witness = None
    if "witness" in payload:
        witness = tuple(
            (IntervalQ(Fraction(e["member"][0]), Fraction(e["member"][1])),
             tuple(IntervalQ(Fraction(a), Fraction(b)) for a, b in e["sets"]))
            for e in payload["witness"])
    return SparseFamily(members, payload["kind"], Fraction(payload["sparseness"]),
                        witness)


def transplant_family(family: SparseFamily, cell: TriadicCell) -> SparseFamily:
    """Affine copy of a triadic-grid family inside a target triadic cell.

    Sparseness is scale-invariant, so the child-measure bound carries over.
    """
    members = []
    for m in family.members:
        length = m.length
        depth = 0
        while length < 1:
            length *= 3
            depth += 1
        if length != 1:
            raise FamilyError("transplant needs triadic members")
        idx = int(m.left * 3 ** depth)
        digits = []
        n = idx
        for _ in range(depth):
            n, d = divmod(n, 3)
            digits.append("012"[d])
        sub = TriadicCell(cell.address + "".join(reversed(digits)))
        members.append(sub.interval())
    return SparseFamily(tuple(members), family.kind, family.sparseness)


# ---------------------------------------------------------------------------
# Validators.

def trichotomy_violation(members) -> tuple[IntervalQ, IntervalQ] | None:
    items = sorted(members, key=lambda i: (i.left, -i.right))
    for i, a in enumerate(items):
        for b in items[i + 1:]:
            if b.left >= a.right:
                break
            if not (a.contains(b) or b.contains(a) or a.is_disjoint(b)):
                return a, b
    return None


def children_map(members) -> dict[IntervalQ, list[IntervalQ]]:
    """Forest structure: maximal strict members below each member."""
    out: dict[IntervalQ, list[IntervalQ]] = {m: [] for m in members}
    order = sorted(members, key=lambda i: (i.length, i.left))
    for idx, child in enumerate(order):
        parent = None
        for cand in order[idx + 1:]:
            if cand != child and cand.contains(child):
                if parent is None or parent.contains(cand):
                    parent = cand
        if parent is not None:
            out[parent].append(child)
    return out


def is_martingale_sparse(family, eps=None) -> tuple[bool, dict]:
    """Child-measure validation; raises on trichotomy violations.

    Returns (ok, report); on failure the report names the parent and the
    exact excess above eps*|R|.
    """
    if isinstance(family, SparseFamily):
        members = family.members
        eps = Fraction(eps) if eps is not None else family.sparseness
    else:
        members = tuple(family)
        eps = Fraction(eps)
    bad = trichotomy_violation(members)
    if bad is not None:
        raise FamilyError(f"members {bad[0]} and {bad[1]} overlap without nesting")
    for parent, kids in children_map(members).items():
        load = sum((k.length for k in kids), Q(0))
        if load > eps * parent.length:
            return False, {"parent": parent, "children_measure": load,
                           "budget": eps * parent.length,
                           "excess": load - eps * parent.length}
    return True, {"parents": len(members)}


def validate_weak_witness(family: SparseFamily) -> None:
    if family.kind != "weak" or family.witness is None:
        raise FamilyError("weak family with witness expected")
    eta = family.sparseness
    seen: list[IntervalQ] = []
    by_member = dict(family.witness)
    for member in family.members:
        pieces = by_member.get(member)
        if pieces is None:
            raise FamilyError(f"missing witness for {member}")
        total = Q(0)
        for e in pieces:
            if not member.contains(e):
                raise FamilyError(f"witness piece {e} escapes {member}")
            for s in seen:
                if not e.is_disjoint(s):
                    raise FamilyError(f"witness pieces {e} and {s} overlap")
            total += e.length
        if total < (1 - eta) * member.length:
            raise FamilyError(f"witness of {member} too small: {total}")
        seen.extend(pieces)


# ---------------------------------------------------------------------------
# Generators.

def gen_random_martingale(grid_depth: int, eps, seed: int,
                          max_members: int = 48) -> SparseFamily:
    """Seeded martingale family inside the triadic grid, valid by construction."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise FamilyError("eps must lie in (0,1)")
    rng = random.Random(f"martingale|{grid_depth}|{eps}|{seed}")
    members: list[TriadicCell] = []

    def walk(cell: TriadicCell):
        if len(members) >= max_members:
            return
        members.append(cell)
        room = grid_depth - cell.depth
        if room <= 0:
            return
        j = rng.randint(1, min(3, room))
        budget = math.floor(eps * 3 ** j)
        if budget <= 0:
            return
        take = rng.randint(0, min(budget, 4))
        if take == 0:
            return
        picks = rng.sample(range(3 ** j), take)
        for t in sorted(picks):
            sub = cell
            digits = []
            n = t
            for _ in range(j):
                n, d = divmod(n, 3)
                digits.append(str(d))
            sub = TriadicCell(cell.address + "".join(reversed(digits)))
            walk(sub)

    if grid_depth >= 0 and rng.random() < 0.95:
        walk(TriadicCell(""))
    fam = family_from_cells(members, "martingale", eps) if members else \
        SparseFamily(tuple(), "martingale", eps)
    if members:
        ok, report = is_martingale_sparse(fam)
        if not ok:
            raise FamilyError(f"generator postcondition failed: {report}")
    return fam


ADVERSARIAL_KINDS = ("chainToward_IJ", "S1", "S2", "S3", "S4", "boundaryChain")


def gen_adversarial(model: WeightModel, kind: str, carrier: TriadicCell,
                    eps) -> SparseFamily:
    """Extremal families around one carrier's core/support boundary."""
    eps = Fraction(eps)
    if kind not in ADVERSARIAL_KINDS:
        raise FamilyError(f"unknown adversarial kind {kind!r}")
    gen = carrier_generation(model, carrier)
    core = carrier.middle_child()
    placed, side = model.place_core(core, gen + 1)
    if kind == "chainToward_IJ":
        cells = _thin_chain(_ancestor_chain(carrier, placed), eps)
        return family_from_cells(cells, "martingale", eps)
    if kind == "S1":
        path = [TriadicCell(core.address + "0" * t) for t in range(model.k - 1)]
        return family_from_cells(_thin_chain(path, eps), "martingale", eps)
    if kind == "S2":
        chain = _ancestor_chain(carrier, placed)[1:]  # strictly inside the side child
        return family_from_cells(_thin_chain(chain, eps), "martingale", eps)
    if kind in ("S3", "S4"):
        return SparseFamily(tuple(_boundary_chain(model, carrier, core, placed,
                                                  side, eps, kind)),
                            "martingale", eps)
    # boundaryChain: the carrier plus straddling chains in disjoint sibling tiles
    members: list[IntervalQ] = [carrier.interval()]
    tiles = _sample_tiles(model, core, count=4)
    for tile in tiles:
        tgen = gen + 1
        tcore = tile.middle_child()
        tplaced, tside = model.place_core(tcore, tgen + 1)
        members.extend(_boundary_chain(model, tile, tcore, tplaced, tside, eps, "S3"))
    fam = SparseFamily(tuple(members), "martingale", eps)
    ok, report = is_martingale_sparse(fam)
    if not ok:
        raise FamilyError(f"boundary chain postcondition failed: {report}")
    return fam


def _ancestor_chain(carrier: TriadicCell, placed: TriadicCell) -> list[TriadicCell]:
    return [TriadicCell(placed.address[:d])
            for d in range(carrier.depth, placed.depth + 1)]


def _thin_chain(cells: list[TriadicCell], eps: Fraction) -> list[TriadicCell]:
    if eps >= Q(1, 3):
        return cells
    step = math.ceil(math.log(float(1 / eps)) / math.log(3.0))
    return cells[::step]


def _boundary_chain(model, carrier, core, placed, side, eps, kind) -> list[IntervalQ]:
    """Nested intervals through the shared endpoint of core and support cell."""
    lam = placed.length
    if side == "right":
        e = core.right
        into_core, into_support = Q(2, 3), Q(1, 3)
    else:
        e = core.left
        into_core, into_support = -Q(2, 3), -Q(1, 3)
    out = []
    if kind == "S3":
        length = carrier.length * eps
        floor_len = 2 * lam
    else:
        length = 2 * lam * eps
        floor_len = min(2 * lam * eps ** 12, Q(1, 3 ** 40))
    while length >= floor_len:
        a = e - into_core * length
        b = e + into_support * length
        lo, hi = min(a, b), max(a, b)
        out.append(IntervalQ(lo, hi))
        length *= eps
        if kind == "S4" and len(out) >= 12:
            break
    return out


def _sample_tiles(model: WeightModel, core: TriadicCell, count: int) -> list[TriadicCell]:
    width = model.k - 1
    total = 3 ** width
    picks = sorted({0, total // 3, (2 * total) // 3, total - 1})[:count]
    out = []
    for t in picks:
        digits = []
        n = t
        for _ in range(width):
            n, d = divmod(n, 3)
            digits.append(str(d))
        out.append(TriadicCell(core.address + "".join(reversed(digits))))
    return out


# ---------------------------------------------------------------------------
# Testing sums and reports.

def testing_sum(model, family, L: IntervalQ, direction: str = "forward",
                exponent: Fraction | None = None,
                max_depth: int = 60) -> Enclosure:
    """Sawyer-type sum over members inside L of <w>^p <sigma> |I| (or its dual)."""
    if direction not in ("forward", "dual"):
        raise FamilyError("direction must be forward|dual")
    members = family.members if isinstance(family, SparseFamily) else tuple(family)
    want = model.params.p if direction == "forward" else model.params.p_prime
    if exponent is not None and Fraction(exponent) != want:
        raise FamilyError(f"exponent {exponent} inconsistent with direction {direction}")
    terms = []
    for member in members:
        if not L.contains(member):
            continue
        aw = average(model, MeasureQuery("w", member, max_depth))
        asig = average(model, MeasureQuery("sigma", member, max_depth))
        if direction == "forward":
            term = pow_enclosure(aw, model.params.p) * asig
        else:
            term = pow_enclosure(asig, model.params.p_prime) * aw
        terms.append(term * member.length)
    return enclosure_sum(terms) if terms else Enclosure.exact(0)


@dataclass(frozen=True)
class TestingReport:
    sum: Enclosure
    bound: Enclosure
    ratio: float
    kfree_ratio: float | None
    eps: Fraction
    verdict: str
    details: dict = field(default_factory=dict)


def testing_report(model: WeightModel, family: SparseFamily, L: IntervalQ,
                   direction: str = "forward", max_depth: int = 60,
                   rescaled: bool = False) -> TestingReport:
    """Ratio of the testing sum against k*w(L)/(1-eps) (report-only verdict)."""
    eps = family.sparseness
    s = testing_sum(model, family, L, direction, max_depth=max_depth)
    which = "w" if direction == "forward" else "sigma"
    wl = mass(model, MeasureQuery(which, L, max_depth))
    if wl.hi == 0:
        if s.hi > 0:
            return TestingReport(s, wl, math.inf, None, eps, "violation",
                                 {"reason": "positive sum with zero localized mass"})
        return TestingReport(s, wl, 0.0, 0.0, eps, "report-only", {})
    k = model.k
    bound = wl * Q(k) * (1 / (1 - eps))
    ratio = float(s.mid) * float(1 - eps) / (k * float(wl.mid))
    kfree = None
    if _is_triadic(L) and all(_is_triadic(m) for m in family.members):
        kfree = float(s.mid) * float(1 - eps) / float(wl.mid)
    if rescaled:
        # forward sums gain scale^p while w(L) gains scale; dual sums gain one
        # scale factor against an unchanged sigma(L)
        sc = float(model.scale.mid)
        factor = sc ** (float(model.params.p) - 1) if direction == "forward" else sc
        ratio *= factor
        if kfree is not None:
            kfree *= factor
    return TestingReport(s, bound, ratio, kfree, eps, "report-only",
                         {"members_in_L": sum(1 for m in family.members if L.contains(m))})


def _is_triadic(iv: IntervalQ) -> bool:
    n = iv.length
    if n.numerator != 1:
        return False
    den = n.denominator
    while den % 3 == 0:
        den //= 3
    if den != 1:
        return False
    return (iv.left / n).denominator == 1


# ---------------------------------------------------------------------------
# Exact packing and chain inequalities.

def sparse_packing_check(family, L: IntervalQ, eps=None) -> dict:
    """Sum over members inside L of |Q| against |L|/(1-eps), exact."""
    members = family.members if isinstance(family, SparseFamily) else tuple(family)
    eps = Fraction(eps) if eps is not None else family.sparseness
    lhs = sum((m.length for m in members if L.contains(m)), Q(0))
    rhs = L.length / (1 - eps)
    return {"lhs": lhs, "rhs": rhs, "ok": lhs <= rhs}


def chain_decay_check(chain, floor_len, p: int, eps) -> dict:
    """For a containment chain with |Q| >= floor_len: sum 1/|Q|^p <= 1/(c^p (1-eps))."""
    members = sorted(chain.members if isinstance(chain, SparseFamily) else tuple(chain),
                     key=lambda i: i.length)
    eps, c = Fraction(eps), Fraction(floor_len)
    for small, big in zip(members, members[1:]):
        if not big.contains(small):
            raise FamilyError("not a containment chain")
    if members and members[0].length < c:
        raise FamilyError("chain member below the stated floor")
    lhs = sum((1 / m.length ** p for m in members), Q(0))
    rhs = 1 / (c ** p * (1 - eps))
    return {"lhs": lhs, "rhs": rhs, "ok": lhs <= rhs}


def restricted_packing_check(family: SparseFamily, pieces: list[IntervalQ],
                             L: IntervalQ, p: int) -> dict:
    """Sum (|Q ∩ E|/|Q|)^(p+1) |Q| against |L ∩ E|/(1-eps), constant measured."""
    eps = family.sparseness
    lhs = Q(0)
    for member in family.members:
        if not L.contains(member):
            continue
        inter = _pieces_overlap(pieces, member)
        if inter > 0:
            lhs += (inter / member.length) ** (p + 1) * member.length
    le = _pieces_overlap(pieces, L)
    rhs = le / (1 - eps) if le > 0 else Q(0)
    measured = float(lhs / rhs) if rhs > 0 else 0.0
    cap = Fraction((p + 1), p) ** (p + 1) / (1 - eps)
    return {"lhs": lhs, "rhs": rhs, "measured_constant": measured,
            "ok": lhs <= cap * le if le > 0 else lhs == 0}


def _pieces_overlap(pieces: list[IntervalQ], window: IntervalQ) -> Fraction:
    total = Q(0)
    for p in pieces:
        iv = p.intersect(window)
        if iv is not None:
            total += iv.length
    return total


# ---------------------------------------------------------------------------
# Carleson embedding on the triadic grid.

def carleson_check(depth: int, coeffs: dict[str, Fraction], f_leaves: list,
                   p: int, A, mu_leaves: list | None = None) -> dict:
    """Exact Carleson embedding check over the depth-`depth` triadic grid.

    `coeffs` maps cell addresses to nonnegative a_Q; `f_leaves` gives f on the
    depth-level cells; `mu_leaves` gives their measures (Lebesgue when None).
    The packing precondition is validated first and failures name the cell.
    """
    if not isinstance(p, int) or p < 2:
        raise ValueError("integer p >= 2 required for the exact check")
    A = Fraction(A)
    n = 3 ** depth
    if len(f_leaves) != n:
        raise ValueError(f"need {n} leaf values")
    f = [Fraction(v) for v in f_leaves]
    mu = [Fraction(m) for m in (mu_leaves or [Q(1, n)] * n)]
    if any(v < 0 for v in f) or any(m < 0 for m in mu):
        raise ValueError("f and mu must be nonnegative")
    levels_mu = [mu]
    levels_fm = [[fv * mv for fv, mv in zip(f, mu)]]
    while len(levels_mu[-1]) > 1:
        prev_mu, prev_fm = levels_mu[-1], levels_fm[-1]
        levels_mu.append([sum(prev_mu[3 * i:3 * i + 3], Q(0)) for i in range(len(prev_mu) // 3)])
        levels_fm.append([sum(prev_fm[3 * i:3 * i + 3], Q(0)) for i in range(len(prev_fm) // 3)])
    levels_mu.reverse()
    levels_fm.reverse()

    def a_of(d, i):
        from .triadic import cell_from_index
        return Fraction(coeffs.get(cell_from_index(d, i).address, 0))

    packing = [[Q(0)] * len(level) for level in levels_mu]
    for d in range(depth, -1, -1):
        for i in range(3 ** d):
            own = a_of(d, i) * levels_mu[d][i]
            if own < 0:
                raise ValueError("coefficients must be nonnegative")
            below = sum(packing[d + 1][3 * i:3 * i + 3], Q(0)) if d < depth else Q(0)
            packing[d][i] = own + below
            if packing[d][i] > A * levels_mu[d][i]:
                from .triadic import cell_from_index
                return {"ok": False, "stage": "precondition",
                        "cell": cell_from_index(d, i).address,
                        "lhs": packing[d][i], "rhs": A * levels_mu[d][i]}
    lhs = Q(0)
    for d in range(depth + 1):
        for i in range(3 ** d):
            aq = a_of(d, i)
            if aq == 0 or levels_mu[d][i] == 0:
                continue
            avg = levels_fm[d][i] / levels_mu[d][i]
            lhs += avg ** p * aq * levels_mu[d][i]
    p_prime = Fraction(p, p - 1)
    rhs = p_prime ** p * A * sum((fv ** p * mv for fv, mv in zip(f, mu)), Q(0))
    return {"ok": lhs <= rhs, "stage": "embedding", "lhs": lhs, "rhs": rhs}


# ---------------------------------------------------------------------------
# Sparse operators applied to step functions.

def _step_average(pieces: list[tuple[IntervalQ, Fraction]], window: IntervalQ) -> Fraction:
    total = Q(0)
    for iv, value in pieces:
        ov = iv.intersect(window)
        if ov is not None:
            total += abs(Fraction(value)) * ov.length
    return total / window.length


def sparse_apply(family, pieces: list[tuple[IntervalQ, Fraction]], p: Fraction,
                 x) -> tuple[float, Fraction]:
    """Sparse p-function at a point: (float value, exact sum of p-th powers)."""
    members = family.members if isinstance(family, SparseFamily) else tuple(family)
    p = Fraction(p)
    x = Fraction(x)
    inner = Q(0)
    for member in members:
        if member.contains_point(x):
            avg = _step_average(pieces, member)
            if p.denominator == 1:
                inner += avg ** p.numerator
            else:
                inner += Fraction(float(avg) ** float(p))
    return float(inner) ** (1.0 / float(p)), inner


def sparse_maximal(family, pieces: list[tuple[IntervalQ, Fraction]], x) -> Fraction:
    members = family.members if isinstance(family, SparseFamily) else tuple(family)
    x = Fraction(x)
    best = Q(0)
    for member in members:
        if member.contains_point(x):
            best = max(best, _step_average(pieces, member))
    return best


# ---------------------------------------------------------------------------
# Weak-to-martingale splitting.

def split_parameters(eta: Fraction) -> tuple[int, Fraction]:
    """Slot count m and derived eps for splitting a weak eta-sparse family."""
    eta = Fraction(eta)
    base = Q(6) / (1 - eta) - 1
    m = max(3, math.floor(base) + 1)
    lam = 1 + base / m
    eps = lam - 1
    if not 0 < eps < 1:
        raise SplitError(f"derived eps {eps} outside (0,1)")
    return m, eps


def split_weak_to_martingale(family: SparseFamily, eta=None) -> list[SparseFamily]:
    """Partition a weak family into martingale eps-sparse families.

    The slot assignment is greedy (largest first); the result is always
    re-validated, and impossibility within 3*m slots is an explicit failure.
    """
    eta = Fraction(eta) if eta is not None else family.sparseness
    if family.witness is not None:
        validate_weak_witness(family)
    m, eps = split_parameters(eta)
    try:
        ok, _ = is_martingale_sparse(family.members, eps)
    except FamilyError:
        ok = False
    if ok:
        return [SparseFamily(family.members, "martingale", eps)]
    slots: list[list[IntervalQ]] = []
    order = sorted(family.members, key=lambda i: (-i.length, i.left, i.right))
    for member in order:
        placed = False
        for slot in slots:
            if _fits(slot, member, eps):
                slot.append(member)
                placed = True
                break
        if not placed:
            if len(slots) >= 3 * m:
                raise SplitError(
                    f"no admissible slot for {member} within 3*m = {3 * m} families")
            slots.append([member])
    out = []
    for slot in slots:
        fam = SparseFamily(tuple(slot), "martingale", eps)
        ok, report = is_martingale_sparse(fam)
        if not ok:
            raise SplitError(f"postcondition failed for a slot: {report}")
        out.append(fam)
    return out


def _fits(slot: list[IntervalQ], member: IntervalQ, eps: Fraction) -> bool:
    for other in slot:
        if not (other.contains(member) or member.contains(other)
                or other.is_disjoint(member)):
            return False
    trial = slot + [member]
    for parent, kids in children_map(trial).items():
        load = sum((k.length for k in kids), Q(0))
        if load > eps * parent.length:
            return False
    return True


def gen_weak_family(seed: int, count: int = 50, eta=Q(1, 2),
                    max_attempts: int = 4000) -> SparseFamily:
    """Seeded weak eta-sparse family with an explicit disjoint witness.

    Greedy construction over dyadic-rational intervals: each accepted member
    carves (1-eta) of its length out of the remaining free space, so the
    witness is valid by construction.
    """
    eta = Fraction(eta)
    rng = random.Random(f"weak|{count}|{eta}|{seed}")
    free: list[IntervalQ] = [IntervalQ(Q(0), Q(1))]
    members: list[IntervalQ] = []
    witness: list[tuple[IntervalQ, tuple[IntervalQ, ...]]] = []
    need = 1 - eta
    for _ in range(max_attempts):
        if len(members) >= count:
            break
        scale = rng.randint(2, 9)
        length = Q(1, 2 ** scale)
        left = Q(rng.randint(0, 2 ** 12 - 1), 2 ** 12) * (1 - length)
        member = IntervalQ(left, left + length)
        if member in members:
            continue
        inside = _intersect_free(free, member)
        avail = sum((p.length for p in inside), Q(0))
        if avail < need * length:
            continue
        target = need * length
        carved: list[IntervalQ] = []
        for piece in inside:
            if target <= 0:
                break
            take = min(piece.length, target)
            carved.append(IntervalQ(piece.left, piece.left + take))
            target -= take
        free = _subtract_free(free, carved)
        members.append(member)
        witness.append((member, tuple(carved)))
    fam = SparseFamily(tuple(members), "weak", eta, tuple(witness))
    validate_weak_witness(fam)
    return fam


def _intersect_free(free: list[IntervalQ], window: IntervalQ) -> list[IntervalQ]:
    out = []
    for piece in free:
        iv = piece.intersect(window)
        if iv is not None:
            out.append(iv)
    return out


def _subtract_free(free: list[IntervalQ], carved: list[IntervalQ]) -> list[IntervalQ]:
    out = free
    for cut in carved:
        nxt = []
        for piece in out:
            if piece.is_disjoint(cut):
                nxt.append(piece)
                continue
            if piece.left < cut.left:
                nxt.append(IntervalQ(piece.left, cut.left))
            if cut.right < piece.right:
                nxt.append(IntervalQ(cut.right, piece.right))
        out = nxt
    return out
