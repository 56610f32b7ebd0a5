"""3-CNF formulas: DIMACS I/O, evaluation, generation, and an exhaustive SAT oracle.

Clauses carry 1 to 3 signed literals. The oracle enumerates every total
assignment, so it is only meant for small formulas; it exists to certify the
set packing reduction, not to compete with real SAT solvers.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

Assignment = dict[int, bool]

DEFAULT_ORACLE_CAP = 24
DEFAULT_DENSITY_BOUND = 8.0


class DimacsError(ValueError):
    """Raised when DIMACS text does not follow the expected format."""


@dataclass(frozen=True)
class CnfFormula:
    """A CNF formula with at most 3 literals per clause.

    Literals are nonzero signed variable indices; positive means unnegated.
    Variable indices run from 1 to num_vars.
    """

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.num_vars < 1:
            raise ValueError(f"num_vars must be positive, got {self.num_vars}")
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for i, clause in enumerate(self.clauses):
            if not 1 <= len(clause) <= 3:
                raise ValueError(f"clause {i} has {len(clause)} literals, expected 1..3")
            for lit in clause:
                if lit == 0 or not 1 <= abs(lit) <= self.num_vars:
                    raise ValueError(f"clause {i}: literal {lit} out of range for n={self.num_vars}")

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF text: 'c' comments, one 'p cnf n m' header, m zero-terminated clauses."""
    tokens: list[str] = []
    header: tuple[int, int] | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise DimacsError(f"malformed header line: {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsError(f"malformed header line: {line!r}") from None
            continue
        tokens.extend(line.split())
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    num_vars, num_clauses = header
    if num_vars < 1:
        raise DimacsError(f"header declares {num_vars} variables, expected at least 1")

    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for tok in tokens:
        try:
            lit = int(tok)
        except ValueError:
            raise DimacsError(f"non-integer token {tok!r} in clause data") from None
        if lit == 0:
            if not current:
                raise DimacsError(f"clause {len(clauses)} is empty")
            if len(current) > 3:
                raise DimacsError(f"clause {len(clauses)} has {len(current)} literals, limit is 3")
            clauses.append(tuple(current))
            current = []
        else:
            if not 1 <= abs(lit) <= num_vars:
                raise DimacsError(f"variable index {abs(lit)} out of range [1, {num_vars}]")
            current.append(lit)
    if current:
        raise DimacsError("final clause is not zero-terminated")
    if len(clauses) != num_clauses:
        raise DimacsError(f"header declares {num_clauses} clauses but found {len(clauses)}")
    return CnfFormula(num_vars=num_vars, clauses=tuple(clauses))


def to_dimacs(formula: CnfFormula) -> str:
    """Serialize to DIMACS CNF. Reparsing the output yields an equal formula."""
    lines = [f"p cnf {formula.num_vars} {formula.num_clauses}"]
    for clause in formula.clauses:
        lines.append(" ".join(str(lit) for lit in clause) + " 0")
    return "\n".join(lines) + "\n"


def evaluate(formula: CnfFormula, assignment: Assignment) -> bool:
    """True iff every clause contains a literal made true by the assignment.

    Raises ValueError if a variable occurring in the formula is unassigned.
    An empty clause list is vacuously true.
    """
    for clause in formula.clauses:
        for lit in clause:
            if abs(lit) not in assignment:
                raise ValueError(f"variable {abs(lit)} occurs in the formula but is unassigned")
    return all(
        any(assignment[abs(lit)] == (lit > 0) for lit in clause)
        for clause in formula.clauses
    )


def assignment_from_code(num_vars: int, code: int) -> Assignment:
    """Decode a total assignment from its binary encoding (variable 1 is the most significant bit)."""
    return {v: bool((code >> (num_vars - v)) & 1) for v in range(1, num_vars + 1)}


def brute_force_sat(formula: CnfFormula, cap: int = DEFAULT_ORACLE_CAP) -> Assignment | None:
    """Exhaustive satisfiability oracle.

    Scans all 2^n total assignments in encoding order (variable 1 = most
    significant bit) and returns the first satisfying one, so the result is
    the minimal satisfying assignment under that encoding. Returns None when
    unsatisfiable. Raises ValueError when num_vars exceeds the cap.
    """
    n = formula.num_vars
    if n > cap:
        raise ValueError(f"formula has {n} variables, oracle cap is {cap}")
    clause_masks = []
    for clause in formula.clauses:
        pos = 0
        neg = 0
        for lit in clause:
            bit = 1 << (n - abs(lit))
            if lit > 0:
                pos |= bit
            else:
                neg |= bit
        clause_masks.append((pos, neg))
    # A clause is falsified iff all its positive vars are 0 and all its negated vars are 1.
    for code in range(1 << n):
        for pos, neg in clause_masks:
            if not (code & pos) and (code & neg) == neg:
                break
        else:
            return assignment_from_code(n, code)
    return None


@dataclass(frozen=True)
class SparsityReport:
    num_vars: int
    num_clauses: int
    ratio: float
    ok: bool


def check_sparsity(formula: CnfFormula, density_bound: float = DEFAULT_DENSITY_BOUND) -> SparsityReport:
    """Advisory check that the clause count stays within density_bound * num_vars."""
    n = formula.num_vars
    m = formula.num_clauses
    return SparsityReport(num_vars=n, num_clauses=m, ratio=m / n, ok=m <= density_bound * n)


def gen_random_3cnf(
    n: int,
    m: int,
    seed: int,
    planted: Assignment | None = None,
) -> CnfFormula:
    """Generate a random 3-CNF formula, deterministic in (n, m, seed, planted).

    Every clause has 3 distinct variables with independent random signs. When
    a planted total assignment is given, each clause is redrawn until the
    planted assignment satisfies it, so the result is guaranteed satisfiable.
    """
    if n < 3:
        raise ValueError(f"need n >= 3 to draw 3 distinct variables per clause, got {n}")
    if m < 0:
        raise ValueError(f"clause count must be nonnegative, got {m}")
    if planted is not None and set(planted) != set(range(1, n + 1)):
        raise ValueError("planted assignment must be total over variables 1..n")
    rng = random.Random(seed)
    clauses: list[tuple[int, ...]] = []
    for _ in range(m):
        while True:
            variables = rng.sample(range(1, n + 1), 3)
            clause = tuple(v if rng.getrandbits(1) else -v for v in variables)
            if planted is None or any(planted[abs(lit)] == (lit > 0) for lit in clause):
                break
        clauses.append(clause)
    return CnfFormula(num_vars=n, clauses=tuple(clauses))
