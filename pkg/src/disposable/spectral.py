"""Exact Perron-Frobenius analysis of automata and densities of accepted sets."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .dfao import Dfao
from .predicate.automaton import TrackAutomaton, coreachable, reachable


class DensityError(ValueError):
    pass


@dataclass(frozen=True)
class RationalMatrix:
    rows: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def of(cls, rows: Iterable[Iterable]) -> "RationalMatrix":
        rows = tuple(tuple(Fraction(x) for x in r) for r in rows)
        if any(len(r) != len(rows) for r in rows):
            raise ValueError("matrix must be square")
        return cls(rows)

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        n = self.size
        cols = list(zip(*other.rows))
        return RationalMatrix(tuple(tuple(sum(a * b for a, b in zip(self.rows[i], cols[j])) for j in range(n))
                                    for i in range(n)))

    def left_multiply(self, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Row vector times matrix."""
        return tuple(sum(v[i] * self.rows[i][j] for i in range(self.size)) for j in range(self.size))

    def permuted(self, perm: Sequence[int]) -> "RationalMatrix":
        """Relabel state ``perm[i]`` as ``i``."""
        return RationalMatrix(tuple(tuple(self.rows[perm[i]][perm[j]] for j in range(self.size))
                                    for i in range(self.size)))

    def __str__(self) -> str:
        return "\n".join(" ".join(_fmt(x) for x in row) for row in self.rows)


def _fmt(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


FrequencyVector = tuple  # of Fraction, entries summing to 1


def adjacency_matrix(a: TrackAutomaton | Dfao, states: Sequence[int] | None = None) -> RationalMatrix:
    """Entry ``(i, j)`` counts transitions from ``states[i]`` to ``states[j]``."""
    delta = a.delta_array() if isinstance(a, Dfao) else a.delta
    if states is None:
        states = range(delta.shape[0])
    return _adjacency(delta, list(states))


def _adjacency(delta: np.ndarray, states: list[int]) -> RationalMatrix:
    if not states:
        raise ValueError("need at least one state")
    pos = {q: k for k, q in enumerate(states)}
    rows = [[0] * len(states) for _ in states]
    for i, q in enumerate(states):
        for r in delta[q].tolist():
            if r in pos:
                rows[i][pos[r]] += 1
    return RationalMatrix.of(rows)


def primitivity_index(m: RationalMatrix) -> int | None:
    """Least ``k <= (n-1)^2 + 1`` with ``m^k`` entrywise positive, else ``None``."""
    n = m.size
    pattern = np.array([[x > 0 for x in row] for row in m.rows], dtype=bool)
    if any(x < 0 for row in m.rows for x in row):
        raise ValueError("matrix must be non-negative")
    power = pattern.copy()
    for k in range(1, (n - 1) ** 2 + 2):
        if power.all():
            return k
        power = (power.astype(np.int64) @ pattern.astype(np.int64)) > 0
    return None


def nullspace(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Basis of ``{x : A x = 0}`` by exact Gauss-Jordan elimination."""
    a = [list(r) for r in rows]
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for i, c in enumerate(pivots):
            x[c] = -a[i][f]
        basis.append(x)
    return basis


def left_perron_eigenvector(m: RationalMatrix, eigenvalue) -> FrequencyVector:
    """The left eigenvector for ``eigenvalue`` normalized to sum 1, exactly."""
    lam = Fraction(eigenvalue)
    n = m.size
    # v M = lam v  <=>  (M - lam I)^T v^T = 0
    shifted = [[m.rows[j][i] - (lam if i == j else 0) for j in range(n)] for i in range(n)]
    basis = nullspace(shifted)
    if not basis:
        raise DensityError(f"{lam} is not an eigenvalue")
    if len(basis) != 1:
        raise DensityError(f"eigenspace of {lam} has dimension {len(basis)}")
    v = basis[0]
    total = sum(v)
    if total == 0:
        raise DensityError("eigenvector cannot be normalized")
    v = tuple(x / total for x in v)
    if m.left_multiply(v) != tuple(lam * x for x in v):
        raise DensityError("eigenvector check failed")
    return v


def _sccs(delta: np.ndarray, nodes: Sequence[int]) -> list[list[int]]:
    """Tarjan's algorithm (iterative) restricted to ``nodes``."""
    node_set = set(nodes)
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    out = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(delta[root].tolist()))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            q, it = work[-1]
            advanced = False
            for r in it:
                if r not in node_set:
                    continue
                if r not in index:
                    index[r] = low[r] = counter
                    counter += 1
                    stack.append(r)
                    on_stack.add(r)
                    work.append((r, iter(delta[r].tolist())))
                    advanced = True
                    break
                if r in on_stack:
                    low[q] = min(low[q], index[r])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[q])
            if low[q] == index[q]:
                comp = []
                while True:
                    r = stack.pop()
                    on_stack.discard(r)
                    comp.append(r)
                    if r == q:
                        break
                out.append(sorted(comp))
    return out


@dataclass(frozen=True)
class RecurrentPart:
    states: tuple[int, ...]
    matrix: RationalMatrix
    eigenvector: FrequencyVector
    primitivity: int
    absorption: Fraction


def recurrent_parts(a: TrackAutomaton | Dfao) -> list[RecurrentPart]:
    """Closed strongly connected components reachable from the start, with limit data.

    A uniformly random input of length ``m`` is a random walk with equal
    transition probabilities.  Each closed component captures the walk with
    some absorption probability, and inside it the walk's position converges
    to the normalized left Perron vector when the component is primitive.
    """
    if isinstance(a, Dfao):
        delta, initial = a.delta_array(), a.initial
    else:
        delta, initial = a.delta, a.initial
    width = delta.shape[1]
    seen = [initial]
    mark = {initial}
    for q in seen:
        for r in delta[q].tolist():
            if r not in mark:
                mark.add(r)
                seen.append(r)
    comps = _sccs(delta, seen)
    comp_of = {q: k for k, comp in enumerate(comps) for q in comp}
    closed = [k for k, comp in enumerate(comps)
              if all(comp_of[r] == k for q in comp for r in delta[q].tolist())]

    # absorption probabilities into each closed component, by exact linear solve
    transient = [q for q in seen if comp_of[q] not in closed]
    tindex = {q: k for k, q in enumerate(transient)}
    parts = []
    for k in closed:
        comp = comps[k]
        if initial in comp:
            absorb = Fraction(1)
        else:
            # x_q = sum_r P(q, r) x_r, x = 1 on comp, 0 on other closed parts
            n = len(transient)
            rows = []
            for q in transient:
                row = [Fraction(0)] * (n + 1)
                row[tindex[q]] += 1
                for r in delta[q].tolist():
                    if r in tindex:
                        row[tindex[r]] -= Fraction(1, width)
                    elif comp_of[r] == k:
                        row[n] += Fraction(1, width)
                rows.append(row)
            absorb = _solve(rows)[tindex[initial]]
        if absorb == 0:
            continue
        m = _adjacency(delta, comp)
        prim = primitivity_index(m)
        if prim is None:
            raise DensityError(f"recurrent component {comp} is not primitive")
        v = left_perron_eigenvector(m, width)
        parts.append(RecurrentPart(tuple(comp), m, v, prim, absorb))
    return parts


def _solve(rows: list[list[Fraction]]) -> list[Fraction]:
    """Solve the augmented square system exactly."""
    n = len(rows)
    a = [list(r) for r in rows]
    for c in range(n):
        p = next(i for i in range(c, n) if a[i][c] != 0)
        a[c], a[p] = a[p], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [a[i][n] for i in range(n)]


def accepted_density(a: TrackAutomaton | Dfao, finals: Iterable[int] | None = None) -> Fraction:
    """Limit fraction of length-``m`` inputs ending in a final state.

    For a ``Dfao`` the final states must be given explicitly.
    """
    if finals is None:
        if isinstance(a, Dfao):
            raise ValueError("a Dfao needs an explicit set of final states")
        finals = np.flatnonzero(a.finals).tolist()
    finals = set(finals)
    total = Fraction(0)
    for part in recurrent_parts(a):
        mass = sum((v for q, v in zip(part.states, part.eigenvector) if q in finals), Fraction(0))
        total += part.absorption * mass
    return total


def density_from_matrix(m: RationalMatrix, finals: Iterable[int], eigenvalue=2) -> Fraction:
    """Mass of the normalized left Perron vector on ``finals`` (0-based indices)."""
    if primitivity_index(m) is None:
        raise DensityError("matrix is not primitive")
    v = left_perron_eigenvector(m, eigenvalue)
    return sum((v[i] for i in finals), Fraction(0))


def empirical_density_series(positions: Callable[[np.ndarray], np.ndarray] | np.ndarray,
                             checkpoints: Sequence[int]) -> list[tuple[int, int, float]]:
    """``(n, |D(n)|, |D(n)| / n)`` where ``D(n)`` holds the positions ``<= n + 1``.

    ``positions`` is either a vectorized predicate on index arrays or a
    boolean mask long enough to cover ``max(checkpoints) + 2`` indices.
    """
    top = max(checkpoints) + 2
    if callable(positions):
        mask = np.asarray(positions(np.arange(top, dtype=np.int64)), dtype=bool)
    else:
        mask = np.asarray(positions, dtype=bool)
        if mask.shape[0] < top:
            raise ValueError(f"mask covers {mask.shape[0]} indices, need {top}")
    counts = np.cumsum(mask[:top])
    out = []
    for n in checkpoints:
        if n <= 0:
            raise ValueError("checkpoints must be positive")
        c = int(counts[n + 1])
        out.append((n, c, c / n))
    return out


# the matrix printed for the disposable-positions automaton, states 1..8
PRINTED_M = RationalMatrix.of([
    [0, 1, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 1, 0, 0, 0],
    [0, 0, 0, 0, 1, 1, 0, 0],
    [1, 0, 0, 0, 0, 0, 1, 0],
    [0, 0, 1, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 1, 0, 0, 1],
    [0, 0, 0, 1, 1, 0, 0, 0],
    [1, 0, 0, 0, 0, 0, 1, 0],
])
PRINTED_FINALS = (2, 8)  # 1-based, as printed
PRINTED_EIGENVECTOR = tuple(Fraction(x) for x in ("1/12", "1/24", "1/6", "1/8", "1/4", "1/12", "5/24", "1/24"))
