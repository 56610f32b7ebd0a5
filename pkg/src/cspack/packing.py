"""Set packing instances: text format, exact solver, verifier, compactness audit.

The decision problem: given a universe, a set family, and a parameter r, do r
pairwise disjoint sets exist? The solver is a plain depth-first search over
set indices with bit-vector disjointness tests. It deliberately knows nothing
about how an instance was produced, so hardness claims about generated
instances are exercised honestly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

if TYPE_CHECKING:
    from .reduction import WitnessMap

DEFAULT_NODE_BUDGET = 10_000_000


class InstanceFormatError(ValueError):
    """Raised when instance text does not follow the expected format."""


@dataclass(frozen=True)
class SetPackingInstance:
    """Universe [0, universe_size), an ordered family of element sets, and the parameter r.

    Each set is stored as a strictly increasing tuple of element IDs; the
    family contains no duplicate sets.
    """

    universe_size: int
    sets: tuple[tuple[int, ...], ...]
    r: int

    def __post_init__(self) -> None:
        if self.universe_size < 0:
            raise ValueError(f"universe_size must be nonnegative, got {self.universe_size}")
        if self.r < 1:
            raise ValueError(f"parameter r must be positive, got {self.r}")
        object.__setattr__(self, "sets", tuple(tuple(s) for s in self.sets))
        for i, ids in enumerate(self.sets):
            prev = -1
            for e in ids:
                if e <= prev:
                    raise ValueError(f"set {i}: element IDs must be strictly increasing")
                if not 0 <= e < self.universe_size:
                    raise ValueError(f"set {i}: element ID {e} out of range [0, {self.universe_size})")
                prev = e
        if len(set(self.sets)) != len(self.sets):
            raise ValueError("set family contains duplicate sets")

    @property
    def set_count(self) -> int:
        return len(self.sets)

    def masks(self) -> list[int]:
        """Bit-vector form of every set (bit e set iff element e is a member)."""
        out = []
        for ids in self.sets:
            m = 0
            for e in ids:
                m |= 1 << e
            out.append(m)
        return out


def parse_instance(text: str) -> SetPackingInstance:
    """Parse the instance format; see serialize_instance for the grammar."""
    lines = text.splitlines()
    if not lines:
        raise InstanceFormatError("empty instance text")
    head = lines[0].split()
    if len(head) != 5 or head[0] != "p" or head[1] != "sp":
        raise InstanceFormatError(f"malformed header line: {lines[0]!r}")
    try:
        universe_size, set_count, r = int(head[2]), int(head[3]), int(head[4])
    except ValueError:
        raise InstanceFormatError(f"malformed header line: {lines[0]!r}") from None
    if len(lines) - 1 != set_count:
        raise InstanceFormatError(f"header declares {set_count} sets but found {len(lines) - 1} set lines")
    sets: list[tuple[int, ...]] = []
    for lineno, line in enumerate(lines[1:], start=1):
        parts = line.split()
        if not parts or parts[0] != "s":
            raise InstanceFormatError(f"line {lineno + 1}: expected a set line starting with 's'")
        try:
            k = int(parts[1])
            ids = tuple(int(tok) for tok in parts[2:])
        except (ValueError, IndexError):
            raise InstanceFormatError(f"line {lineno + 1}: malformed set line") from None
        if len(ids) != k:
            raise InstanceFormatError(f"line {lineno + 1}: declared {k} IDs but found {len(ids)}")
        sets.append(ids)
    try:
        return SetPackingInstance(universe_size=universe_size, sets=tuple(sets), r=r)
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from None


def serialize_instance(instance: SetPackingInstance) -> str:
    """Byte-deterministic text form.

    Line 1: "p sp <universe_size> <set_count> <r>". Then one line per set:
    "s <k> <id_1> ... <id_k>" with strictly increasing 0-based IDs. LF line
    endings, no trailing whitespace.
    """
    lines = [f"p sp {instance.universe_size} {instance.set_count} {instance.r}"]
    for ids in instance.sets:
        lines.append(" ".join(["s", str(len(ids)), *map(str, ids)]))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SolveResult:
    """Solver outcome: verdict "yes" (with the packing), "no", or "budget".

    "budget" means the node budget ran out before the search space was
    exhausted; it is never a claim about the instance. nodes counts candidate
    examinations in the DFS, so it is deterministic and monotone in budget.
    """

    verdict: str
    packing: tuple[int, ...] | None
    nodes: int


def solve_exact(instance: SetPackingInstance, budget: int = DEFAULT_NODE_BUDGET) -> SolveResult:
    """Decide whether r pairwise disjoint sets exist, by ordered DFS.

    Branches on set indices in ascending order, keeps the union of chosen
    sets as a bit-vector, skips candidates that intersect it, and cuts a
    level short once too few indices remain to complete a packing. The first
    packing found is therefore the lexicographically least index list.
    """
    r = instance.r
    masks = instance.masks()
    count = len(masks)
    if r > count:
        return SolveResult(verdict="no", packing=None, nodes=0)

    nodes = 0
    chosen: list[int] = []

    def extend(start: int, union: int) -> str:
        nonlocal nodes
        need = r - len(chosen)
        if need == 0:
            return "yes"
        for i in range(start, count - need + 1):
            nodes += 1
            if nodes > budget:
                return "budget"
            if masks[i] & union:
                continue
            chosen.append(i)
            status = extend(i + 1, union | masks[i])
            if status != "no":
                if status == "budget":
                    chosen.pop()
                return status
            chosen.pop()
        return "no"

    verdict = extend(0, 0)
    if verdict == "yes":
        return SolveResult(verdict="yes", packing=tuple(chosen), nodes=nodes)
    return SolveResult(verdict=verdict, packing=None, nodes=nodes)


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    reason: str

    def __bool__(self) -> bool:
        return self.ok


def verify_packing(instance: SetPackingInstance, indices: Sequence[int]) -> VerifyResult:
    """Check that indices name r distinct, valid, pairwise disjoint sets.

    Returns a verdict with the first violated condition as the reason; never
    raises.
    """
    indices = list(indices)
    if len(indices) != instance.r:
        return VerifyResult(False, f"expected {instance.r} indices, got {len(indices)}")
    seen: set[int] = set()
    for idx in indices:
        if not isinstance(idx, int):
            return VerifyResult(False, f"non-integer index {idx!r}")
        if idx in seen:
            return VerifyResult(False, f"duplicate index {idx}")
        seen.add(idx)
    for idx in indices:
        if not 0 <= idx < instance.set_count:
            return VerifyResult(False, f"index {idx} out of range [0, {instance.set_count})")
    for a in range(len(indices)):
        for b in range(a + 1, len(indices)):
            sa, sb = set(instance.sets[indices[a]]), set(instance.sets[indices[b]])
            shared = sa & sb
            if shared:
                return VerifyResult(
                    False,
                    f"sets {indices[a]} and {indices[b]} intersect (share element {min(shared)})",
                )
    return VerifyResult(True, "ok")


@dataclass(frozen=True)
class CompactnessReport:
    """How small the universe is relative to r^3 * log2(set_count).

    ratio is reported, not judged: the interesting instances keep it bounded
    by a constant, but what constant depends on the construction.
    """

    universe_size: int
    set_count: int
    r: int
    log2_set_count: float
    ratio: float
    grid_width: int | None = None
    iss_width: int | None = None
    dull_width: int | None = None


def audit_compactness(
    instance: SetPackingInstance,
    witness: "WitnessMap | None" = None,
) -> CompactnessReport:
    """Compute the compactness ratio universe_size / (r^3 * log2(set_count)).

    With a witness map, also break the universe into its grid, tag, and dull
    components and cross-check them against the instance. Requires at least
    2 sets, since log2(1) = 0.
    """
    if instance.set_count < 2:
        raise ValueError(f"need at least 2 sets to audit, got {instance.set_count}")
    log2_count = math.log2(instance.set_count)
    ratio = instance.universe_size / (instance.r**3 * log2_count)
    grid = iss = dull = None
    if witness is not None:
        layout = witness.layout
        grid = layout.grid_size
        iss = layout.iss_total
        dull = layout.dull_width
        if layout.universe_size != instance.universe_size:
            raise ValueError(
                f"witness universe {layout.universe_size} does not match instance {instance.universe_size}"
            )
        if witness.core_count + witness.pad_count != instance.set_count:
            raise ValueError(
                f"witness set count {witness.core_count + witness.pad_count} "
                f"does not match instance {instance.set_count}"
            )
    return CompactnessReport(
        universe_size=instance.universe_size,
        set_count=instance.set_count,
        r=instance.r,
        log2_set_count=log2_count,
        ratio=ratio,
        grid_width=grid,
        iss_width=iss,
        dull_width=dull,
    )
