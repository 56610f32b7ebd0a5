"""Reduce a 3-CNF formula to a compact set packing instance, with two-way witness lifting.

The construction, in element-ID terms:

* The clauses are split round-robin into r balanced groups. For each group,
  every satisfying partial assignment over the group's variables becomes one
  set in the family.
* Per variable x there is a grid block of r*r element IDs, laid out as
  id(x, i, j) = x*r^2 + i*r + j. A set for group g encodes "x is false" by
  claiming row g of x's grid and "x is true" by claiming column g. A row and
  a column always share one ID, so two groups that disagree on a shared
  variable can never both be picked; rows (or columns) of distinct groups
  are disjoint, so agreement never blocks a packing.
* Each group also gets a private block of tag IDs carrying an intersecting
  set system: the k-th assignment of the group is tagged with the k-th
  lexicographic subset. Any two tags of one group intersect, which caps a
  packing at one set per group.
* Optionally, d "dull" IDs are appended and, for every subset D of them,
  core-universe union D is added as a padding set. Padding sets inflate the
  family by 2^d without changing the answer for r >= 2, because every
  padding set contains the whole core universe and therefore intersects
  everything.

An r-packing therefore picks one satisfying partial assignment per group,
pairwise consistent, which merges into a satisfying total assignment; and
any satisfying total assignment restricts to one set per group. The witness
map records enough bookkeeping to walk both directions.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass

from .cnf import Assignment, CnfFormula
from .iss import build_iss
from .packing import SetPackingInstance

DEFAULT_DULL_CAP = 16


class WitnessFormatError(ValueError):
    """Raised when witness-map text does not follow the expected format."""


@dataclass(frozen=True)
class ClausePartition:
    """r disjoint groups of clause indices covering 0..m-1, sizes within 1 of m/r."""

    r: int
    groups: tuple[tuple[int, ...], ...]


def partition_clauses(m: int, r: int) -> ClausePartition:
    """Round-robin partition: clause k goes to group k mod r.

    Group sizes are ceil(m/r) or floor(m/r), so the balance bound holds.
    Groups may be empty when r > m.
    """
    if r < 1:
        raise ValueError(f"r must be positive, got {r}")
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    return ClausePartition(r=r, groups=tuple(tuple(range(g, m, r)) for g in range(r)))


@dataclass(frozen=True)
class GroupAssignments:
    """All satisfying partial assignments of one clause group.

    domain is the sorted list of variables occurring in the group's clauses.
    codes holds the satisfying assignments as binary encodings over the
    domain (first domain variable = most significant bit), in ascending
    order, with no misses and no duplicates.
    """

    group_index: int
    domain: tuple[int, ...]
    codes: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.codes)

    def assignment(self, position: int) -> Assignment:
        return decode_assignment(self.domain, self.codes[position])


def decode_assignment(domain: tuple[int, ...], code: int) -> Assignment:
    k = len(domain)
    return {v: bool((code >> (k - 1 - j)) & 1) for j, v in enumerate(domain)}


def encode_assignment(domain: tuple[int, ...], assignment: Assignment) -> int:
    k = len(domain)
    code = 0
    for j, v in enumerate(domain):
        if v not in assignment:
            raise ValueError(f"variable {v} missing from assignment")
        if assignment[v]:
            code |= 1 << (k - 1 - j)
    return code


def enumerate_group_assignments(
    formula: CnfFormula,
    partition: ClausePartition,
    group_index: int,
) -> GroupAssignments:
    """Enumerate every assignment over the group's variables satisfying all its clauses.

    An empty group yields the single empty assignment; a contradictory group
    yields an empty list.
    """
    if not 0 <= group_index < partition.r:
        raise ValueError(f"group index {group_index} out of range [0, {partition.r})")
    clause_ids = partition.groups[group_index]
    domain = tuple(sorted({abs(lit) for ci in clause_ids for lit in formula.clauses[ci]}))
    k = len(domain)
    bit_of = {v: 1 << (k - 1 - j) for j, v in enumerate(domain)}
    clause_masks = []
    for ci in clause_ids:
        pos = 0
        neg = 0
        for lit in formula.clauses[ci]:
            if lit > 0:
                pos |= bit_of[lit]
            else:
                neg |= bit_of[-lit]
        clause_masks.append((pos, neg))
    codes = []
    append = codes.append
    for code in range(1 << k):
        for pos, neg in clause_masks:
            if not (code & pos) and (code & neg) == neg:
                break
        else:
            append(code)
    return GroupAssignments(group_index=group_index, domain=domain, codes=tuple(codes))


@dataclass(frozen=True)
class ElementLayout:
    """How element IDs are apportioned between grid, tag, and dull blocks.

    IDs [0, n*r^2) are the per-variable grids with id(x, i, j) = x*r^2 + i*r + j.
    Then come r tag blocks of the recorded widths, in group order, then
    dull_width padding-only IDs.
    """

    n: int
    r: int
    iss_widths: tuple[int, ...]
    dull_width: int

    def __post_init__(self) -> None:
        if self.n < 1 or self.r < 1 or self.dull_width < 0:
            raise ValueError("layout requires n >= 1, r >= 1, dull_width >= 0")
        if len(self.iss_widths) != self.r or any(w < 0 for w in self.iss_widths):
            raise ValueError(f"need {self.r} nonnegative tag-block widths, got {self.iss_widths}")

    @property
    def grid_size(self) -> int:
        return self.n * self.r * self.r

    @property
    def iss_total(self) -> int:
        return sum(self.iss_widths)

    def iss_start(self, group: int) -> int:
        return self.grid_size + sum(self.iss_widths[:group])

    @property
    def core_size(self) -> int:
        return self.grid_size + self.iss_total

    @property
    def dull_start(self) -> int:
        return self.core_size

    @property
    def universe_size(self) -> int:
        return self.core_size + self.dull_width

    def grid_id(self, x: int, i: int, j: int) -> int:
        return x * self.r * self.r + i * self.r + j


def grid_edges(x: int, g: int, value: bool, layout: ElementLayout) -> frozenset[int]:
    """Grid IDs a set claims in variable block x for the given truth value.

    value False claims row g (IDs id(x, g, j) for all j); value True claims
    column g (IDs id(x, j, g) for all j). Always exactly r IDs. A row and a
    column of the same block share exactly one ID, which is what makes
    conflicting truth values collide.
    """
    if not 0 <= x < layout.n:
        raise ValueError(f"variable block {x} out of range [0, {layout.n})")
    if not 0 <= g < layout.r:
        raise ValueError(f"group {g} out of range [0, {layout.r})")
    r = layout.r
    if value:
        return frozenset(layout.grid_id(x, j, g) for j in range(r))
    return frozenset(layout.grid_id(x, g, j) for j in range(r))


@dataclass(frozen=True)
class WitnessMap:
    """Bookkeeping that links core sets to (group, assignment) pairs.

    Core set indices are laid out group by group, in assignment-encoding
    order within each group; padding sets (if any) come after all core sets.
    """

    layout: ElementLayout
    domains: tuple[tuple[int, ...], ...]
    codes: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        r = self.layout.r
        if len(self.domains) != r or len(self.codes) != r:
            raise ValueError(f"need domains and codes for all {r} groups")
        for g in range(r):
            domain = self.domains[g]
            if any(not 1 <= v <= self.layout.n for v in domain):
                raise ValueError(f"group {g}: domain variable out of range [1, {self.layout.n}]")
            if any(a >= b for a, b in zip(domain, domain[1:])):
                raise ValueError(f"group {g}: domain must be strictly increasing")
            top = 1 << len(domain)
            if any(not 0 <= c < top for c in self.codes[g]):
                raise ValueError(f"group {g}: assignment code out of range for domain size {len(domain)}")
            if any(a >= b for a, b in zip(self.codes[g], self.codes[g][1:])):
                raise ValueError(f"group {g}: codes must be strictly increasing")

    @property
    def r(self) -> int:
        return self.layout.r

    @property
    def num_vars(self) -> int:
        return self.layout.n

    @property
    def dull_width(self) -> int:
        return self.layout.dull_width

    @property
    def group_offsets(self) -> tuple[int, ...]:
        offsets = []
        total = 0
        for codes in self.codes:
            offsets.append(total)
            total += len(codes)
        return tuple(offsets)

    @property
    def core_count(self) -> int:
        return sum(len(codes) for codes in self.codes)

    @property
    def pad_first(self) -> int:
        return self.core_count

    @property
    def pad_count(self) -> int:
        return (1 << self.dull_width) if self.dull_width > 0 else 0

    def entry(self, set_index: int) -> tuple[int, int]:
        """(group, assignment code) for a core set index."""
        if not 0 <= set_index < self.core_count:
            raise ValueError(f"set index {set_index} is not a core set")
        offsets = self.group_offsets
        group = 0
        for g in range(self.r):
            if offsets[g] <= set_index:
                group = g
        return group, self.codes[group][set_index - offsets[group]]

    def set_index_of(self, group: int, code: int) -> int:
        """Core set index of the given group's assignment code, if present."""
        codes = self.codes[group]
        pos = bisect_left(codes, code)
        if pos == len(codes) or codes[pos] != code:
            raise ValueError(f"group {group} has no satisfying assignment with code {code}")
        return self.group_offsets[group] + pos


def default_dull_width(n: int, r: int, cap: int = DEFAULT_DULL_CAP) -> int:
    """Default padding width ceil(n * log2(max(r, 2)) / r), capped; 0 when r == 1."""
    if r == 1:
        return 0
    return min(cap, math.ceil(n * math.log2(max(r, 2)) / r))


def reduce_to_packing(
    formula: CnfFormula,
    r: int,
    *,
    dull_width: int | None = None,
    include_iss: bool = True,
    dull_cap: int = DEFAULT_DULL_CAP,
) -> tuple[SetPackingInstance, WitnessMap]:
    """Build the set packing instance and its witness map for the formula.

    dull_width None picks the default padding width; 0 disables padding.
    Padding needs r >= 2 (with r = 1 a padding set alone is a packing, which
    would break the equivalence). The width is capped because 2^dull_width
    padding sets are materialized. include_iss=False drops the tag blocks;
    that is only sound while the family stays duplicate-free, which the
    builder checks and otherwise refuses.
    """
    n = formula.num_vars
    m = formula.num_clauses
    if r < 1:
        raise ValueError(f"r must be positive, got {r}")
    d = default_dull_width(n, r, cap=dull_cap) if dull_width is None else dull_width
    if d < 0:
        raise ValueError(f"dull_width must be nonnegative, got {d}")
    if d > dull_cap:
        raise ValueError(f"dull_width {d} exceeds cap {dull_cap} (2^d padding sets are materialized)")
    if r == 1 and d > 0:
        raise ValueError("padding requires r >= 2: with r = 1 any padding set alone is a packing")

    partition = partition_clauses(m, r)
    groups = [enumerate_group_assignments(formula, partition, g) for g in range(r)]
    if include_iss:
        families = [build_iss(group.count) for group in groups]
        iss_widths = tuple(fam.universe_width for fam in families)
    else:
        families = None
        iss_widths = (0,) * r
    layout = ElementLayout(n=n, r=r, iss_widths=iss_widths, dull_width=d)

    rr = r * r
    sets: list[tuple[int, ...]] = []
    for g, group in enumerate(groups):
        k = len(group.domain)
        tag_base = layout.iss_start(g)
        for position, code in enumerate(group.codes):
            ids: list[int] = []
            for j, v in enumerate(group.domain):
                base = (v - 1) * rr
                if (code >> (k - 1 - j)) & 1:
                    ids.extend(base + t * r + g for t in range(r))
                else:
                    ids.extend(base + g * r + t for t in range(r))
            if families is not None:
                ids.extend(tag_base + e for e in families[g].sets[position])
            sets.append(tuple(sorted(ids)))

    if d > 0:
        core_ids = tuple(range(layout.core_size))
        dull_start = layout.dull_start
        for subset in range(1 << d):
            extra = tuple(dull_start + t for t in range(d) if (subset >> t) & 1)
            sets.append(core_ids + extra)

    if len(set(sets)) != len(sets):
        raise ValueError(
            "constructed family contains duplicate sets; "
            "this can only happen with tags disabled (or r = 1), refusing to deduplicate"
        )

    instance = SetPackingInstance(universe_size=layout.universe_size, sets=tuple(sets), r=r)
    witness = WitnessMap(
        layout=layout,
        domains=tuple(group.domain for group in groups),
        codes=tuple(group.codes for group in groups),
    )
    return instance, witness


def lower_assignment_to_packing(witness: WitnessMap, assignment: Assignment) -> list[int]:
    """Map a satisfying total assignment to the r core sets it selects.

    Restricts the assignment to each group's domain and looks the code up.
    Raises ValueError if some restriction is not a satisfying assignment of
    its group, which happens exactly when the assignment does not satisfy
    the formula.
    """
    indices = []
    for g in range(witness.r):
        code = encode_assignment(witness.domains[g], assignment)
        try:
            indices.append(witness.set_index_of(g, code))
        except ValueError:
            raise ValueError(
                f"assignment does not satisfy clause group {g} (restriction code {code})"
            ) from None
    return indices


def lift_packing_to_assignment(witness: WitnessMap, packing: list[int] | tuple[int, ...]) -> Assignment:
    """Merge an r-packing of core sets back into a satisfying total assignment.

    The packing must contain r valid core set indices from r distinct groups
    whose partial assignments agree on shared variables; anything else means
    the packing is corrupt and raises ValueError. Variables outside every
    group's domain default to False.
    """
    if len(packing) != witness.r:
        raise ValueError(f"expected {witness.r} set indices, got {len(packing)}")
    total_sets = witness.core_count + witness.pad_count
    merged: Assignment = {}
    seen_groups: set[int] = set()
    for idx in packing:
        if not 0 <= idx < total_sets:
            raise ValueError(f"set index {idx} out of range [0, {total_sets})")
        if idx >= witness.pad_first and witness.pad_count > 0:
            raise ValueError(f"set index {idx} is a padding set and carries no assignment")
        group, code = witness.entry(idx)
        if group in seen_groups:
            raise ValueError(f"two sets from group {group}: not a valid packing")
        seen_groups.add(group)
        for v, value in decode_assignment(witness.domains[group], code).items():
            if v in merged and merged[v] != value:
                raise ValueError(f"inconsistent values for variable {v}: not a valid packing")
            merged[v] = value
    for v in range(1, witness.num_vars + 1):
        merged.setdefault(v, False)
    return merged


def witness_to_text(witness: WitnessMap) -> str:
    """Serialize a witness map.

    Grammar (whitespace-separated tokens, LF endings):

        w <n> <r> <d> <u_0> ... <u_last>
        g <group> <v_1> ... <v_k>            (only for groups with no sets)
        <set_index> <group> <v_1> ... <v_k> <bits>
        pad <first> <count>

    One numbered line per core set, in index order; <bits> is the assignment
    over the sorted domain variables, most significant bit first, written as
    "-" when the domain is empty. The "g" lines keep empty groups' domains
    from being lost. The pad line is always present (count 0 when unpadded).
    """
    layout = witness.layout
    head = ["w", str(layout.n), str(layout.r), str(layout.dull_width), *map(str, layout.iss_widths)]
    lines = [" ".join(head)]
    index = 0
    for g in range(witness.r):
        domain = witness.domains[g]
        k = len(domain)
        if not witness.codes[g]:
            lines.append(" ".join(["g", str(g), *map(str, domain)]))
            continue
        for code in witness.codes[g]:
            bits = format(code, f"0{k}b") if k else "-"
            lines.append(" ".join([str(index), str(g), *map(str, domain), bits]))
            index += 1
    lines.append(f"pad {witness.pad_first} {witness.pad_count}")
    return "\n".join(lines) + "\n"


def witness_from_text(text: str) -> WitnessMap:
    """Parse the witness grammar; inverse of witness_to_text."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise WitnessFormatError("empty witness text")
    head = lines[0].split()
    if len(head) < 4 or head[0] != "w":
        raise WitnessFormatError(f"malformed header line: {lines[0]!r}")
    try:
        n, r, d = int(head[1]), int(head[2]), int(head[3])
        iss_widths = tuple(int(tok) for tok in head[4:])
    except ValueError:
        raise WitnessFormatError(f"malformed header line: {lines[0]!r}") from None
    if len(iss_widths) != r:
        raise WitnessFormatError(f"header declares r={r} but carries {len(iss_widths)} tag widths")
    layout = ElementLayout(n=n, r=r, iss_widths=iss_widths, dull_width=d)

    domains: dict[int, tuple[int, ...]] = {}
    codes: dict[int, list[int]] = {g: [] for g in range(r)}
    pad_line: tuple[int, int] | None = None
    expected_index = 0
    for line in lines[1:]:
        parts = line.split()
        if parts[0] == "pad":
            if pad_line is not None or len(parts) != 3:
                raise WitnessFormatError(f"malformed pad line: {line!r}")
            pad_line = (int(parts[1]), int(parts[2]))
            continue
        if pad_line is not None:
            raise WitnessFormatError("set lines after the pad line")
        if parts[0] == "g":
            if len(parts) < 2:
                raise WitnessFormatError(f"malformed group line: {line!r}")
            g = int(parts[1])
            if not 0 <= g < r:
                raise WitnessFormatError(f"group {g} out of range [0, {r})")
            if domains.get(g) is not None or codes[g]:
                raise WitnessFormatError(f"group line for nonempty or repeated group {g}")
            domains[g] = tuple(int(tok) for tok in parts[2:])
            continue
        if len(parts) < 3:
            raise WitnessFormatError(f"malformed set line: {line!r}")
        try:
            set_index = int(parts[0])
            g = int(parts[1])
            bits = parts[-1]
            domain = tuple(int(tok) for tok in parts[2:-1])
        except ValueError:
            raise WitnessFormatError(f"malformed set line: {line!r}") from None
        if set_index != expected_index:
            raise WitnessFormatError(f"set index {set_index} out of order, expected {expected_index}")
        expected_index += 1
        if not 0 <= g < r:
            raise WitnessFormatError(f"group {g} out of range [0, {r})")
        if bits == "-":
            if domain:
                raise WitnessFormatError(f"set {set_index}: bits '-' with nonempty domain")
            code = 0
        else:
            if len(bits) != len(domain) or any(c not in "01" for c in bits):
                raise WitnessFormatError(f"set {set_index}: bits {bits!r} do not match domain size {len(domain)}")
            code = int(bits, 2)
        if g in domains:
            if domains[g] != domain:
                raise WitnessFormatError(f"set {set_index}: domain differs from earlier lines of group {g}")
        else:
            domains[g] = domain
        if codes[g] and code <= codes[g][-1]:
            raise WitnessFormatError(f"set {set_index}: group {g} codes not strictly increasing")
        codes[g].append(code)
    if pad_line is None:
        raise WitnessFormatError("missing pad line")
    for g in range(r):
        if g not in domains:
            raise WitnessFormatError(f"no domain information for group {g}")
    witness = WitnessMap(
        layout=layout,
        domains=tuple(domains[g] for g in range(r)),
        codes=tuple(tuple(codes[g]) for g in range(r)),
    )
    if pad_line != (witness.pad_first, witness.pad_count):
        raise WitnessFormatError(
            f"pad line {pad_line} does not match core count {witness.pad_first} "
            f"and padding count {witness.pad_count}"
        )
    return witness
