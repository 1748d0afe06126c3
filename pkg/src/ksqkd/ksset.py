"""The 18-vector / 9-basis Kochen-Specker structure and its combinatorics.

The builtin set is the standard 18-ray KS set in dimension 4, stored as
integer amplitude tuples grouped into nine orthonormal bases.  Every ray
belongs to exactly two bases; that interlinking is what makes a classical
one-symbol-per-ball imitation impossible:

* no 0/1 coloring picks exactly one ray per basis (non-colorability), and
* any per-basis symbol labeling leaves at least two rays whose two
  derived symbols disagree (minimum mismatch = 2).

All structural computations here are exact (integers / Fractions).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from . import qcore
from .qcore import Ray, MeasBasis, canonical_int_amps, normalize

# Basis contents of the builtin set, in table row order (row 1 holds
# outcomes 1-2, row 2 outcomes 3-4).  Shared rays repeat verbatim.
KS18_BASES: tuple[tuple[str, tuple[tuple[int, int, int, int], ...]], ...] = (
    ("I", ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 1), (0, 0, 1, -1))),
    ("II", ((1, 1, 1, 1), (1, 1, -1, -1), (1, -1, 0, 0), (0, 0, 1, -1))),
    ("III", ((1, 1, 1, 1), (1, -1, 1, -1), (1, 0, -1, 0), (0, 1, 0, -1))),
    ("IV", ((-1, 1, 1, 1), (1, 1, -1, 1), (1, 0, 1, 0), (0, 1, 0, -1))),
    ("V", ((1, 0, 0, 1), (0, 1, -1, 0), (1, 1, 1, -1), (-1, 1, 1, 1))),
    ("VI", ((1, 0, 0, 1), (0, 1, 1, 0), (1, 1, -1, -1), (1, -1, 1, -1))),
    ("VII", ((1, 1, 1, -1), (1, 1, -1, 1), (0, 0, 1, 1), (1, -1, 0, 0))),
    ("VIII", ((0, 0, 0, 1), (1, 0, 1, 0), (1, 0, -1, 0), (0, 1, 0, 0))),
    ("IX", ((0, 1, -1, 0), (0, 1, 1, 0), (1, 0, 0, 0), (0, 0, 0, 1))),
)

SYMBOLS = (1, 2, 3, 4)

# The two outcome-probability multisets every wrong-basis measurement of a
# builtin ray must produce.
ALLOWED_WRONG_PROFILES = frozenset({
    (Fraction(0), Fraction(0), Fraction(1, 2), Fraction(1, 2)),
    (Fraction(0), Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)),
})


class SetFormatError(ValueError):
    """Raised for malformed set / assignment files."""


@dataclass(frozen=True)
class KSVector:
    id: int
    raw_amps: tuple[int, int, int, int]
    ray: Ray
    home_bases: tuple[str, ...]  # basis labels, in basis order


@dataclass(frozen=True)
class KSBasisDef:
    label: str
    members: tuple[int, int, int, int]  # vector ids in outcome order


@dataclass(frozen=True)
class KSSet:
    vectors: tuple[KSVector, ...]
    bases: tuple[KSBasisDef, ...]
    # vector id -> ((basis label, position 0..3), ...)
    incidence: dict[int, tuple[tuple[str, int], ...]] = field(repr=False)

    def basis(self, label: str) -> KSBasisDef:
        for b in self.bases:
            if b.label == label:
                return b
        raise KeyError(label)

    def basis_index(self, label: str) -> int:
        for i, b in enumerate(self.bases):
            if b.label == label:
                return i
        raise KeyError(label)

    def position(self, vector_id: int, basis_label: str) -> int:
        """Outcome position (0..3) of a vector inside one of its bases."""
        for lab, pos in self.incidence[vector_id]:
            if lab == basis_label:
                return pos
        raise KeyError(f"vector {vector_id} not in basis {basis_label}")

    def meas_basis(self, label: str) -> MeasBasis:
        b = self.basis(label)
        return MeasBasis(label, tuple(self.vectors[i].ray for i in b.members))


def build_set(basis_amps) -> KSSet:
    """Assemble a KSSet from (label, 4 integer amplitude tuples) pairs.

    Rays that coincide up to scale and sign are merged into a single
    vector id, so the cross-basis interlinking is structural.
    """
    canon_to_id: dict[tuple[int, ...], int] = {}
    vec_amps: list[tuple[int, int, int, int]] = []
    homes: list[list[str]] = []
    bases: list[KSBasisDef] = []
    for label, amps4 in basis_amps:
        members = []
        for amps in amps4:
            canon = canonical_int_amps(amps)
            vid = canon_to_id.get(canon)
            if vid is None:
                vid = len(vec_amps)
                canon_to_id[canon] = vid
                vec_amps.append(tuple(int(a) for a in amps))
                homes.append([])
            homes[vid].append(label)
            members.append(vid)
        bases.append(KSBasisDef(label, tuple(members)))
    vectors = tuple(
        KSVector(i, vec_amps[i], normalize(vec_amps[i]), tuple(homes[i]))
        for i in range(len(vec_amps))
    )
    incidence = {
        v.id: tuple(
            (b.label, pos) for b in bases for pos in range(4) if b.members[pos] == v.id
        )
        for v in vectors
    }
    return KSSet(vectors, tuple(bases), incidence)


def builtin_ks18() -> KSSet:
    """The canonical 18-vector, 9-basis KS set."""
    return build_set(KS18_BASES)


# ---------------------------------------------------------------------------
# Structure verification
# ---------------------------------------------------------------------------

@dataclass
class VerificationReport:
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures

    def __str__(self):
        if self.ok:
            return "structure OK"
        return "\n".join(self.failures)


def verify_ks_structure(ks: KSSet) -> VerificationReport:
    """Exact structural checks; failures are reported, never raised."""
    fails = []
    for b in ks.bases:
        for i, j in itertools.combinations(range(4), 2):
            u = ks.vectors[b.members[i]].raw_amps
            v = ks.vectors[b.members[j]].raw_amps
            if qcore.exact_inner(u, v) != 0:
                fails.append(
                    f"basis {b.label}: vectors {b.members[i]} and {b.members[j]} "
                    "not orthogonal"
                )
    seen = {}
    for v in ks.vectors:
        canon = canonical_int_amps(v.raw_amps)
        if canon in seen:
            fails.append(f"vectors {seen[canon]} and {v.id} are the same ray")
        seen[canon] = v.id
    for v in ks.vectors:
        n = len(ks.incidence[v.id])
        if n != 2:
            fails.append(f"vector {v.id} appears in {n} bases, expected 2")
    total = sum(len(ks.incidence[v.id]) for v in ks.vectors)
    if total != 4 * len(ks.bases):
        fails.append(
            f"incidence count {total} != 4 * {len(ks.bases)} bases"
        )
    return VerificationReport(fails)


# ---------------------------------------------------------------------------
# Colorings
# ---------------------------------------------------------------------------

@dataclass
class ColoringResult:
    count: int
    colorings: list[tuple[int, ...]]  # selected vector ids per basis, if few


def enumerate_valid_colorings(ks: KSSet, list_limit: int = 100) -> ColoringResult:
    """Count one-ray-per-basis selections consistent across shared rays.

    The search walks the 4^n per-basis choice tree depth first, pruning a
    branch as soon as a shared ray is selected in one home basis but not
    the other.  A surviving leaf is exactly a valid 0/1 coloring (the
    selected rays get 1).  For the builtin set the count is 0: that is
    the Kochen-Specker obstruction.
    """
    labels = [b.label for b in ks.bases]
    label_pos = {lab: i for i, lab in enumerate(labels)}
    members = [b.members for b in ks.bases]
    n = len(ks.bases)
    found: list[tuple[int, ...]] = []
    count = 0
    picks: list[int] = []

    def consistent(depth: int, vid: int) -> bool:
        # vid picked in basis `depth`; check against already-decided bases
        for lab, _ in ks.incidence[vid]:
            i = label_pos[lab]
            if i < depth and picks[i] != vid:
                return False
        # a ray picked earlier must not sit unpicked in this basis
        for pos in range(4):
            other = members[depth][pos]
            if other == vid:
                continue
            for lab, _ in ks.incidence[other]:
                i = label_pos[lab]
                if i < depth and picks[i] == other:
                    return False
        return True

    def walk(depth: int):
        nonlocal count
        if depth == n:
            count += 1
            if count <= list_limit:
                found.append(tuple(picks))
            return
        for vid in members[depth]:
            if consistent(depth, vid):
                picks.append(vid)
                walk(depth + 1)
                picks.pop()

    walk(0)
    return ColoringResult(count, found if count <= list_limit else [])


def brute_force_coloring_count(ks: KSSet) -> int:
    """Independent oracle: try all 2^n bit colorings, keep the valid ones."""
    n = len(ks.vectors)
    count = 0
    for bits in range(1 << n):
        ok = True
        for b in ks.bases:
            ones = sum((bits >> vid) & 1 for vid in b.members)
            if ones != 1:
                ok = False
                break
        if ok:
            count += 1
    return count


# ---------------------------------------------------------------------------
# Symbol assignments and the mismatch minimum
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymbolAssignment:
    """Per-basis bijection from outcome positions to symbols 1..4."""

    symbols: dict[str, tuple[int, int, int, int]]  # basis label -> symbols

    def __post_init__(self):
        for lab, syms in self.symbols.items():
            if sorted(syms) != [1, 2, 3, 4]:
                raise ValueError(f"basis {lab}: symbols {syms} not a bijection")

    def symbol(self, basis_label: str, position: int) -> int:
        return self.symbols[basis_label][position]

    def vector_symbols(self, ks: KSSet, vector_id: int) -> tuple[int, ...]:
        """The symbols a vector receives in each of its home bases."""
        return tuple(
            self.symbols[lab][pos] for lab, pos in ks.incidence[vector_id]
        )


def defective_vectors(ks: KSSet, assignment: SymbolAssignment) -> list[int]:
    """Vectors whose derived symbols differ between their home bases."""
    bad = []
    for v in ks.vectors:
        syms = assignment.vector_symbols(ks, v.id)
        if len(set(syms)) > 1:
            bad.append(v.id)
    return bad


@dataclass
class MismatchReport:
    mismatch_count: int
    defective_vector_ids: list[int]
    witness: SymbolAssignment


def parity_lower_bound(ks: KSSet) -> int:
    """Parity bound on the number of defective vectors.

    With an odd number of bases and every vector in exactly two bases,
    each symbol is written an odd number of times (one per basis) but
    consistent vectors contribute symbol occurrences in pairs, so every
    symbol has at least one defect incidence; defective vectors cover two
    symbols each, forcing at least ceil(4/2) = 2 of them.  When the
    argument does not apply (even basis count, or a vector not in exactly
    two bases) the bound is the trivial 0.
    """
    if not ks.bases or not ks.vectors:
        raise ValueError("empty structure")
    if len(ks.bases) % 2 == 0:
        return 0
    if any(len(ks.incidence[v.id]) != 2 for v in ks.vectors):
        return 0
    return 2


def _search_order(ks: KSSet) -> list[int]:
    """Basis processing order maximizing overlap with labeled vectors."""
    n = len(ks.bases)
    remaining = list(range(n))
    order = [remaining.pop(0)]
    covered = set(ks.bases[order[0]].members)
    while remaining:
        best = max(
            remaining,
            key=lambda i: (len(covered.intersection(ks.bases[i].members)), -i),
        )
        remaining.remove(best)
        order.append(best)
        covered.update(ks.bases[best].members)
    return order

_PERMS = tuple(itertools.permutations(SYMBOLS))


def min_symbol_mismatch(ks: KSSet) -> MismatchReport:
    """Exact minimum number of defective vectors over all symbol labelings.

    Depth-first branch and bound over per-basis bijections: bases are
    processed in an overlap-maximizing order, a greedy pass seeds the
    incumbent, and branches whose partial defect count already exceeds
    the incumbent are cut.  Among optimal labelings the one whose symbol
    table is lexicographically smallest in basis order wins, so the
    witness is deterministic.
    """
    order = _search_order(ks)
    nb = len(ks.bases)
    members = [ks.bases[i].members for i in order]

    def new_mismatches(labels: dict[int, int], basis_idx: int, perm) -> int:
        m = 0
        for pos in range(4):
            vid = members[basis_idx][pos]
            prev = labels.get(vid)
            if prev is not None and prev != perm[pos]:
                m += 1
        return m

    def assign(labels: dict[int, int], basis_idx: int, perm):
        changed = []
        for pos in range(4):
            vid = members[basis_idx][pos]
            if vid not in labels:
                labels[vid] = perm[pos]
                changed.append(vid)
        return changed

    # greedy incumbent
    labels: dict[int, int] = {}
    greedy: list[tuple[int, ...]] = []
    greedy_cost = 0
    for bi in range(nb):
        perm = min(_PERMS, key=lambda p: (new_mismatches(labels, bi, p), p))
        greedy_cost += new_mismatches(labels, bi, perm)
        assign(labels, bi, perm)
        greedy.append(perm)

    best_cost = greedy_cost
    best_perms = list(greedy)

    def lex_key(perms_by_order):
        by_label = [None] * nb
        for k, bi in enumerate(order):
            by_label[bi] = perms_by_order[k]
        return tuple(by_label)

    best_key = lex_key(best_perms)
    chosen: list[tuple[int, ...]] = []

    def walk(bi: int, labels: dict[int, int], cost: int):
        nonlocal best_cost, best_perms, best_key
        if cost > best_cost:
            return
        if bi == nb:
            key = lex_key(chosen)
            if cost < best_cost or (cost == best_cost and key < best_key):
                best_cost = cost
                best_perms = list(chosen)
                best_key = key
            return
        # A global symbol relabeling never changes the defect count, so the
        # lexicographically smallest optimum has the first basis at identity.
        options = (_PERMS[0],) if bi == 0 else _PERMS
        for perm in options:
            c = cost + new_mismatches(labels, bi, perm)
            if c > best_cost:
                continue
            added = assign(labels, bi, perm)
            chosen.append(perm)
            walk(bi + 1, labels, c)
            chosen.pop()
            for vid in added:
                del labels[vid]

    walk(0, {}, 0)

    symbols = {}
    for k, bi in enumerate(order):
        symbols[ks.bases[bi].label] = best_perms[k]
    witness = SymbolAssignment(symbols)
    bad = defective_vectors(ks, witness)
    # Defect counting above tracks only the *first* label of each vector, so
    # re-derive the count from the witness itself as a consistency check.
    assert len(bad) == best_cost, "witness does not reproduce its mismatch count"
    return MismatchReport(best_cost, bad, witness)


def exhaustive_min_mismatch(ks: KSSet, fix_first: bool = True) -> int:
    """Naive enumeration oracle over all per-basis bijections.

    Feasible for instances with few bases only.  With ``fix_first`` the
    first basis is pinned to the identity labeling, which is sound
    because a global symbol relabeling never changes the defect count.
    """
    nb = len(ks.bases)
    if nb == 0:
        return 0
    shared = []
    for v in ks.vectors:
        inc = ks.incidence[v.id]
        if len(inc) == 2:
            (l1, p1), (l2, p2) = inc
            shared.append((ks.basis_index(l1), p1, ks.basis_index(l2), p2))
    first_choices = (_PERMS[0],) if fix_first else _PERMS
    best = len(ks.vectors) + 1
    for combo in itertools.product(first_choices, *([_PERMS] * (nb - 1))):
        m = 0
        for b1, p1, b2, p2 in shared:
            if combo[b1][p1] != combo[b2][p2]:
                m += 1
                if m >= best:
                    break
        if m < best:
            best = m
    return best


# ---------------------------------------------------------------------------
# Exact outcome profiles and entanglement flags
# ---------------------------------------------------------------------------

def exact_basis_probs(ks: KSSet, vector_id: int, basis_label: str):
    """Exact Born probabilities of a set vector in one of the set's bases."""
    b = ks.basis(basis_label)
    state = ks.vectors[vector_id].raw_amps
    return qcore.exact_born(state, [ks.vectors[i].raw_amps for i in b.members])


@dataclass
class ProfileEntry:
    vector_id: int
    basis_label: str
    probabilities: tuple[Fraction, ...]  # in outcome order

    @property
    def sorted_profile(self) -> tuple[Fraction, ...]:
        return tuple(sorted(self.probabilities))


@dataclass
class ProfileReport:
    entries: list[ProfileEntry]
    violations: list[ProfileEntry]

    @property
    def ok(self) -> bool:
        return not self.violations


def wrong_basis_profiles(ks: KSSet) -> ProfileReport:
    """Exact outcome profiles of every ray in every non-home basis.

    For the builtin set all 126 profiles are one of the two multisets
    {0, 0, 1/2, 1/2} and {0, 1/4, 1/4, 1/2}.
    """
    entries = []
    violations = []
    for v in ks.vectors:
        homes = {lab for lab, _ in ks.incidence[v.id]}
        for b in ks.bases:
            if b.label in homes:
                continue
            probs = exact_basis_probs(ks, v.id, b.label)
            e = ProfileEntry(v.id, b.label, probs)
            entries.append(e)
            if e.sorted_profile not in ALLOWED_WRONG_PROFILES:
                violations.append(e)
    return ProfileReport(entries, violations)


def entanglement_table(ks: KSSet) -> dict[int, bool]:
    """Hybrid-entanglement flag for every vector (exact determinant test)."""
    return {
        v.id: qcore.exact_entanglement_det(v.raw_amps) != 0 for v in ks.vectors
    }


# ---------------------------------------------------------------------------
# Set file I/O
# ---------------------------------------------------------------------------

def parse_set_file(text: str) -> KSSet:
    """Parse the line-oriented set format.

    Records: ``vector <id>: a1 a2 a3 a4`` and ``basis <label>: id1 id2 id3 id4``.
    Blank lines and ``#`` comments are ignored.
    """
    vecs: dict[int, tuple[int, int, int, int]] = {}
    basis_lines: list[tuple[str, tuple[int, ...]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            head, rest = line.split(":", 1)
            kind, name = head.split()
            fields = rest.split()
            if kind == "vector":
                if len(fields) != 4:
                    raise ValueError("expected 4 amplitudes")
                vecs[int(name)] = tuple(int(x) for x in fields)
            elif kind == "basis":
                if len(fields) != 4:
                    raise ValueError("expected 4 vector ids")
                basis_lines.append((name, tuple(int(x) for x in fields)))
            else:
                raise ValueError(f"unknown record kind {kind!r}")
        except (ValueError, IndexError) as exc:
            raise SetFormatError(f"line {lineno}: {raw.strip()!r}: {exc}") from exc
    if not basis_lines:
        raise SetFormatError("no basis records found")
    try:
        basis_amps = [
            (label, tuple(vecs[i] for i in ids)) for label, ids in basis_lines
        ]
    except KeyError as exc:
        raise SetFormatError(f"basis references unknown vector id {exc}") from exc
    return build_set(basis_amps)


def format_set_file(ks: KSSet) -> str:
    lines = [
        f"vector {v.id}: " + " ".join(str(a) for a in v.raw_amps)
        for v in ks.vectors
    ]
    lines += [
        f"basis {b.label}: " + " ".join(str(i) for i in b.members)
        for b in ks.bases
    ]
    return "\n".join(lines) + "\n"


def parse_assignment_file(text: str, ks: KSSet) -> SymbolAssignment:
    """Parse ``basis <label>: s1 s2 s3 s4`` lines into a SymbolAssignment."""
    symbols: dict[str, tuple[int, int, int, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            head, rest = line.split(":", 1)
            kind, label = head.split()
            if kind != "basis":
                raise ValueError(f"unknown record kind {kind!r}")
            syms = tuple(int(x) for x in rest.split())
            if len(syms) != 4:
                raise ValueError("expected 4 symbols")
            symbols[label] = syms
        except (ValueError, IndexError) as exc:
            raise SetFormatError(f"line {lineno}: {raw.strip()!r}: {exc}") from exc
    missing = {b.label for b in ks.bases} - set(symbols)
    if missing:
        raise SetFormatError(f"missing assignments for bases {sorted(missing)}")
    extra = set(symbols) - {b.label for b in ks.bases}
    if extra:
        raise SetFormatError(f"assignments for unknown bases {sorted(extra)}")
    return SymbolAssignment(symbols)
