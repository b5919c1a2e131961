"""Exact maximum B1[lambda](q) sets by branch and bound.

The B1 sets of Z_q are the independent sets of a conflict graph: its
vertices are the residues x whose own multiples x, 2x, ..., lambda*x are
distinct, and x ~ y whenever i*x == j*y (mod q) for some i, j in
[1, lambda].  The search below finds a maximum independent set.

Vertices are bit positions in Python ints.  The graph is split into
connected components (solved independently).  Small components go to a
branch and bound that branches on the lowest remaining vertex, include
before exclude, pruning with a greedy clique cover and then the clique LP;
since the incumbent only changes on strict improvement, its witness is the
lexicographically least maximum set.  Larger components are handed to a
clique-constrained integer program (HiGHS), which settles the optimum and
then pins vertices in ascending order to reach the same witness.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, linprog, milp
from scipy.sparse import csr_matrix

from .bset import BSet

__all__ = [
    "ConflictGraph",
    "SearchResult",
    "BudgetExceeded",
    "valid_element",
    "conflict",
    "max_bset_exact",
    "max_bset_restricted",
    "DEFAULT_MAX_NODES",
    "DEFAULT_MAX_SECONDS",
    "request_stop",
]

DEFAULT_MAX_NODES = 10**8
DEFAULT_MAX_SECONDS = 300.0
_MILP_THRESHOLD = 24  # smaller components are quicker to search directly
_stop = threading.Event()


def request_stop() -> None:
    """Make a running search give up at its next node (safe from a signal handler)."""
    _stop.set()


def valid_element(q: int, lam: int, x: int) -> bool:
    """True iff k*x != 0 (mod q) for every k in [1, lam - 1]."""
    return x % q != 0 and all(k * x % q for k in range(1, lam))


def conflict(q: int, lam: int, x: int, y: int) -> bool:
    """True iff i*x == j*y (mod q) for some i, j in [1, lam]."""
    mx = {i * x % q for i in range(1, lam + 1)}
    return any(j * y % q in mx for j in range(1, lam + 1))


class ConflictGraph:
    """Valid residues (optionally restricted) with conflict adjacency as bitmasks."""

    def __init__(self, q: int, lam: int = 4, allowed: Iterable[int] | None = None):
        self.q = q
        self.lam = lam
        pool = range(1, q) if allowed is None else sorted({x % q for x in allowed})
        self.vertices = [x for x in pool if valid_element(q, lam, x)]
        self.index = {x: k for k, x in enumerate(self.vertices)}
        # residue -> bitmask of vertices having it among their multiples
        owners: dict[int, int] = {}
        for k, x in enumerate(self.vertices):
            for i in range(1, lam + 1):
                s = i * x % q
                owners[s] = owners.get(s, 0) | (1 << k)
        adj = [0] * len(self.vertices)
        for mask in owners.values():
            m = mask
            while m:
                low = m & -m
                k = low.bit_length() - 1
                adj[k] |= mask
                m ^= low
        self.adj = [a & ~(1 << k) for k, a in enumerate(adj)]

    def __len__(self) -> int:
        return len(self.vertices)

    def edges(self) -> int:
        return sum(bin(a).count("1") for a in self.adj) // 2

    def components(self, mask: int | None = None) -> list[int]:
        """Connected components of the induced subgraph, ordered by lowest vertex."""
        rest = (1 << len(self.vertices)) - 1 if mask is None else mask
        comps = []
        while rest:
            comp = frontier = rest & -rest
            while frontier:
                grown = 0
                f = frontier
                while f:
                    low = f & -f
                    grown |= self.adj[low.bit_length() - 1]
                    f ^= low
                frontier = grown & rest & ~comp
                comp |= frontier
            comps.append(comp)
            rest &= ~comp
        return comps

    def maximal_cliques(self, deadline: float | None = None) -> list[int]:
        """All maximal cliques as bitmasks (Bron-Kerbosch with pivoting)."""
        adj = self.adj
        out: list[int] = []

        def expand(r: int, p: int, x: int) -> None:
            if deadline is not None and (_stop.is_set() or time.monotonic() > deadline):
                raise BudgetExceeded
            if not p and not x:
                out.append(r)
                return
            ux = p | x
            pivot = max(_bits(ux), key=lambda u: bin(p & adj[u]).count("1"))
            for v in _bits(p & ~adj[pivot]):
                bit = 1 << v
                expand(r | bit, p & adj[v], x & adj[v])
                p &= ~bit
                x |= bit

        expand(0, (1 << len(self.vertices)) - 1, 0)
        return sorted(out)

    def members(self, mask: int) -> list[int]:
        out = []
        while mask:
            low = mask & -mask
            out.append(self.vertices[low.bit_length() - 1])
            mask ^= low
        return out


@dataclass(frozen=True)
class SearchResult:
    q: int
    lam: int
    max_size: int
    witness: BSet
    nodes_explored: int
    elapsed: float
    status: str  # "exact" or "budget-exceeded"

    @property
    def exact(self) -> bool:
        return self.status == "exact"

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "lambda": self.lam,
            "max_size": self.max_size,
            "status": self.status,
            "witness": list(self.witness.elements),
            "nodes_explored": self.nodes_explored,
        }


class BudgetExceeded(Exception):
    pass


class _Search:
    """Depth-first branch and bound over one conflict graph.

    Bounds, cheapest first: a greedy clique cover, then the clique LP
    (at most one chosen vertex per maximal clique).  LP duals give clique
    weights covering every candidate with weight >= 1; they stay feasible
    for all descendants of the node where they were solved (clique
    constraints only shrink), so they are inherited and the LP is re-solved
    only where the inherited bound fails to prune.
    """

    def __init__(self, graph: ConflictGraph, max_nodes: int, max_seconds: float):
        self.adj = graph.adj
        self.nodes = 0
        self.lp_solves = 0
        self.max_nodes = max_nodes
        self.deadline = time.monotonic() + max_seconds
        self.cliques = graph.maximal_cliques(self.deadline)
        self.best_size = 0
        self.best_mask = 0
        self.milp_solves = 0

    def cover_bound(self, cand: int) -> int:
        """Number of cliques in a greedy ascending clique cover of cand."""
        adj = self.adj
        k = 0
        while cand:
            k += 1
            low = cand & -cand
            cand ^= low
            room = cand & adj[low.bit_length() - 1]
            while room:
                nxt = room & -room
                cand ^= nxt
                room = (room ^ nxt) & adj[nxt.bit_length() - 1]
        return k

    @staticmethod
    def weight_bound(cand: int, weights: list[tuple[int, float]]) -> float:
        return sum(w for c, w in weights if c & cand)

    def lp_bound(self, cand: int) -> tuple[float, list[tuple[int, float]]]:
        self.lp_solves += 1
        verts = _bits(cand)
        col = {v: k for k, v in enumerate(verts)}
        live = [c for c in self.cliques if c & cand]
        rows, cols = [], []
        for r, c in enumerate(live):
            for v in _bits(c & cand):
                rows.append(r)
                cols.append(col[v])
        a = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(live), len(verts)))
        res = linprog(
            -np.ones(len(verts)),
            A_ub=a,
            b_ub=np.ones(len(live)),
            bounds=(0, None),
            method="highs",
        )
        if res.status != 0:
            return float("inf"), []
        duals = np.maximum(-res.ineqlin.marginals, 0.0)
        # rescale so every candidate is covered with weight >= 1 despite float noise
        cover = a.T @ duals
        worst = float(cover.min())
        if worst <= 0:
            return float("inf"), []
        weights = [(live[r], float(duals[r]) / worst) for r in np.flatnonzero(duals > 0)]
        return sum(w for _, w in weights), weights

    def _clique_rows(self, comp: int):
        verts = _bits(comp)
        col = {v: k for k, v in enumerate(verts)}
        live = [c for c in self.cliques if c & comp]
        rows, cols = [], []
        for r, c in enumerate(live):
            for v in _bits(c & comp):
                rows.append(r)
                cols.append(col[v])
        a = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(live), len(verts)))
        return verts, a

    def _milp(self, a, lower, upper, extra=None):
        n = a.shape[1]
        cons = [LinearConstraint(a, -np.inf, 1)]
        if extra is not None:
            cons.append(LinearConstraint(np.ones((1, n)), extra, np.inf))
        self.nodes += 1
        left = self.deadline - time.monotonic()
        if left <= 0 or self.nodes > self.max_nodes or _stop.is_set():
            raise BudgetExceeded
        res = milp(
            -np.ones(n),
            constraints=cons,
            integrality=np.ones(n),
            bounds=Bounds(lower, upper),
            options={"time_limit": left},
        )
        self.milp_solves += 1
        if res.status == 1:
            raise BudgetExceeded
        if res.status == 2:
            return None
        if res.status != 0:
            raise RuntimeError(f"integer program failed: {res.message}")
        return np.round(res.x).astype(int)

    def milp_witness(self, comp: int) -> int:
        """Lexicographically least maximum independent set of comp.

        The clique program gives the optimum; then vertices are fixed in
        ascending order, each to 1 whenever a set of optimum size survives.
        """
        verts, a = self._clique_rows(comp)
        n = len(verts)
        lower, upper = np.zeros(n), np.ones(n)
        x = self._milp(a, lower, upper)
        target = int(x.sum())
        pos = {v: k for k, v in enumerate(verts)}
        for k, v in enumerate(verts):
            if lower[k] == upper[k]:
                continue
            if not x[k]:
                trial_lower = lower.copy()
                trial_lower[k] = 1
                y = self._milp(a, trial_lower, upper, target)
                if y is None:
                    upper[k] = 0
                    continue
                x = y
            lower[k] = 1
            for u in _bits(self.adj[v] & comp):
                upper[pos[u]] = 0
        return sum(1 << v for k, v in enumerate(verts) if lower[k])

    def _prunable(self, bound: float, size: int) -> bool:
        return size + int(bound + 1e-6) <= self.best_size

    def run(self, cand: int, size: int, chosen: int, weights) -> None:
        self.nodes += 1
        if (
            self.nodes > self.max_nodes
            or _stop.is_set()
            or (self.nodes & 0xFF == 0 and time.monotonic() > self.deadline)
        ):
            raise BudgetExceeded
        adj = self.adj
        # vertices with no neighbour left are always taken
        while cand:
            low = cand & -cand
            if cand & adj[low.bit_length() - 1]:
                break
            cand ^= low
            chosen |= low
            size += 1
        if not cand:
            if size > self.best_size:
                self.best_size, self.best_mask = size, chosen
            return
        if size + self.cover_bound(cand) <= self.best_size:
            return
        if weights and self._prunable(self.weight_bound(cand, weights), size):
            return
        if self.best_size > 0:
            value, weights = self.lp_bound(cand)
            if self._prunable(value, size):
                return
        low = cand & -cand
        v = low.bit_length() - 1
        self.run(cand & ~adj[v] & ~low, size + 1, chosen | low, weights)
        self.run(cand ^ low, size, chosen, weights)


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _greedy(graph: ConflictGraph, cand: int) -> int:
    chosen = 0
    while cand:
        low = cand & -cand
        chosen |= low
        cand &= ~graph.adj[low.bit_length() - 1] & ~low
    return chosen


_METHODS = {"auto": _MILP_THRESHOLD, "search": float("inf"), "milp": 0}


def _solve(
    q: int, lam: int, allowed, max_nodes: int, max_seconds: float, method: str
) -> SearchResult:
    if method not in _METHODS:
        raise ValueError(f"unknown method {method!r}; pick from {sorted(_METHODS)}")
    threshold = _METHODS[method]
    start = time.monotonic()
    _stop.clear()
    graph = ConflictGraph(q, lam, allowed)
    comps = graph.components()
    chosen = 0
    status = "exact"
    try:
        search = _Search(graph, max_nodes, max_seconds)
    except BudgetExceeded:
        # not even the clique list fitted in the budget
        search, comps, status = None, [], "budget-exceeded"
        chosen = _greedy(graph, (1 << len(graph)) - 1)
    for n, comp in enumerate(comps):
        search.best_size, search.best_mask = 0, 0
        try:
            if bin(comp).count("1") > threshold:
                search.best_mask = search.milp_witness(comp)
            else:
                search.run(comp, 0, 0, {})
        except BudgetExceeded:
            status = "budget-exceeded"
            # fall back to a greedy pick wherever the search did not finish
            greedy = _greedy(graph, comp)
            best = search.best_mask
            if bin(greedy).count("1") > bin(best).count("1"):
                best = greedy
            chosen |= best
            for rest in comps[n + 1 :]:
                chosen |= _greedy(graph, rest)
            break
        chosen |= search.best_mask
    witness = BSet.of(q, graph.members(chosen), lam)
    return SearchResult(
        q=q,
        lam=lam,
        max_size=len(witness),
        witness=witness,
        nodes_explored=search.nodes if search else 0,
        elapsed=time.monotonic() - start,
        status=status,
    )


def max_bset_exact(
    q: int,
    lam: int = 4,
    max_nodes: int = DEFAULT_MAX_NODES,
    max_seconds: float = DEFAULT_MAX_SECONDS,
    method: str = "auto",
) -> SearchResult:
    """Largest B1[lam](q) set.

    method "search" forces branch and bound everywhere, "milp" forces the
    integer program; "auto" picks per component by size.  Both give the
    lexicographically least maximum set.  On budget exhaustion the result
    carries status "budget-exceeded" and the best set found so far (still a
    valid B1 set) instead of raising.  Each integer-program solve counts as
    one node.
    """
    if q < 2:
        raise ValueError(f"modulus must be at least 2, got {q}")
    return _solve(q, lam, None, max_nodes, max_seconds, method)


def max_bset_restricted(
    q: int,
    lam: int,
    allowed: Iterable[int],
    max_nodes: int = DEFAULT_MAX_NODES,
    max_seconds: float = DEFAULT_MAX_SECONDS,
    method: str = "auto",
) -> SearchResult:
    """Largest B1[lam](q) set using only residues from ``allowed``."""
    if q < 2:
        raise ValueError(f"modulus must be at least 2, got {q}")
    return _solve(q, lam, list(allowed), max_nodes, max_seconds, method)
