"""Minimum-cardinality set cover: greedy heuristic and exact branch-and-bound.

Sets and elements are handled as Python ``int`` bitsets internally. The
exact solver reduces the instance (forced sets, dominated sets), splits it
into independent components and runs a depth-first branch-and-bound on each.
"""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np


class InfeasibleError(ValueError):
    pass


@dataclass(frozen=True)
class SetCoverProblem:
    membership: np.ndarray  # bool, sets x elements

    def __post_init__(self):
        m = np.asarray(self.membership, dtype=bool)
        if m.ndim != 2:
            raise ValueError("membership must be a 2-D matrix")
        object.__setattr__(self, "membership", m)

    @property
    def num_sets(self) -> int:
        return self.membership.shape[0]

    @property
    def num_elements(self) -> int:
        return self.membership.shape[1]

    def check_feasible(self) -> None:
        bare = np.flatnonzero(~self.membership.any(axis=0))
        if len(bare):
            raise InfeasibleError(f"elements {bare[:10].tolist()} are not covered by any set")

    def covers(self, selected) -> bool:
        selected = np.asarray(selected, dtype=bool)
        return bool(self.membership[selected].any(axis=0).all()) if self.num_elements else True

    def to_dimacs(self) -> str:
        lines = [f"p setcover {self.num_sets} {self.num_elements}"]
        for row in self.membership:
            lines.append(" ".join(str(e + 1) for e in np.flatnonzero(row)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dimacs(cls, text: str) -> "SetCoverProblem":
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("c")]
        head = lines[0].split()
        if head[:2] != ["p", "setcover"]:
            raise ValueError("expected 'p setcover <sets> <elems>' header")
        n_sets, n_elems = int(head[2]), int(head[3])
        m = np.zeros((n_sets, n_elems), dtype=bool)
        body = lines[1:] + [""] * (n_sets - len(lines) + 1)
        for s in range(n_sets):
            for tok in body[s].split():
                m[s, int(tok) - 1] = True
        return cls(m)


@dataclass
class SetCoverSolution:
    selected: np.ndarray
    objective: int
    optimal: bool
    lower_bound: int = 0
    nodes: int = 0
    stats: dict = field(default_factory=dict)


def _bitsets(p: SetCoverProblem) -> list[int]:
    out = []
    for row in p.membership:
        out.append(int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little"))
    return out


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _greedy(sets: dict[int, int], universe: int) -> list[int]:
    chosen = []
    order = sorted(sets)
    while universe:
        best, best_gain = None, 0
        for s in order:
            gain = (sets[s] & universe).bit_count()
            if gain > best_gain:
                best, best_gain = s, gain
        if best is None:
            raise InfeasibleError("greedy stalled on an uncoverable element")
        chosen.append(best)
        universe &= ~sets[best]
    return chosen


def _drop_redundant(sets: dict[int, int], chosen: list[int]) -> list[int]:
    """Remove sets whose elements are all covered by the rest, smallest first."""
    keep = list(chosen)
    for s in sorted(chosen, key=lambda s: (sets[s].bit_count(), -s)):
        rest = 0
        for t in keep:
            if t != s:
                rest |= sets[t]
        if (sets[s] & ~rest) == 0:
            keep.remove(s)
    return keep


def _element_masks(sets: dict[int, int], universe: int) -> dict[int, int]:
    """Element -> bitset of the sets containing it."""
    masks: dict[int, int] = {}
    for s, b in sets.items():
        bit = 1 << s
        for e in _bits(b & universe):
            masks[e] = masks.get(e, 0) | bit
    return masks


def _dual_ascent(masks: dict[int, int]) -> float:
    """Greedy dual ascent: weights y_e with sum over each set <= 1; their sum bounds any cover.

    Elements are visited from fewest to most covering sets; each takes all
    the slack its tightest set has left. With 0/1 weights this reduces to a
    packing of elements no two of which share a set.
    """
    load: dict[int, float] = {}
    full = 0  # sets without slack; any element touching one gets y = 0
    total = 0.0
    for e in sorted(masks, key=lambda e: (masks[e].bit_count(), e)):
        m = masks[e]
        if m & full:
            continue
        members = list(_bits(m))
        y = min(1.0 - load.get(s, 0.0) for s in members)
        if y > 1e-12:
            total += y
            for s in members:
                load[s] = load.get(s, 0.0) + y
                if 1.0 - load[s] <= 1e-12:
                    full |= 1 << s
    return total


def _bound_from_masks(masks: dict[int, int], biggest: int) -> int:
    return max(-(-len(masks) // biggest), math.ceil(_dual_ascent(masks) - 1e-9))


def lower_bound(sets: dict[int, int], universe: int) -> int:
    n = universe.bit_count()
    if n == 0:
        return 0
    biggest = max(((b & universe).bit_count() for b in sets.values()), default=0)
    if biggest == 0:
        raise InfeasibleError("no set covers the remaining elements")
    masks = _element_masks(sets, universe)
    if len(masks) < n:
        raise InfeasibleError("an element is not covered by any set")
    return _bound_from_masks(masks, biggest)


def solve_greedy(p: SetCoverProblem) -> SetCoverSolution:
    """Largest-uncovered-first greedy, ties to the lowest set index."""
    p.check_feasible()
    sets = dict(enumerate(_bitsets(p)))
    universe = (1 << p.num_elements) - 1
    chosen = _greedy(sets, universe)
    selected = np.zeros(p.num_sets, dtype=bool)
    selected[chosen] = True
    lb = lower_bound(sets, universe)
    return SetCoverSolution(selected, len(chosen), len(chosen) == lb, lower_bound=lb)


def _reduce(sets: dict[int, int], universe: int, forced: list[int]) -> tuple[dict[int, int], int]:
    """Apply forced-set and dominated-set reductions until nothing changes."""
    changed = True
    while changed and universe:
        changed = False
        sets = {s: b & universe for s, b in sets.items() if b & universe}
        # singleton coverage: an element covered by one set forces that set
        seen_once, seen_twice = 0, 0
        for b in sets.values():
            seen_twice |= seen_once & b
            seen_once |= b
        if seen_once != universe:
            raise InfeasibleError("an element is not covered by any set")
        lonely = universe & ~seen_twice
        if lonely:
            for s in sorted(sets):
                if sets[s] & lonely:
                    forced.append(s)
                    universe &= ~sets[s]
                    lonely &= ~sets[s]
            changed = True
            continue
        # dominated sets: drop s if another set covers a superset (ties keep lowest index)
        order = sorted(sets, key=lambda s: (-sets[s].bit_count(), s))
        kept: list[int] = []
        for s in order:
            b = sets[s]
            if any((b & ~sets[k]) == 0 for k in kept):
                changed = True
                continue
            kept.append(s)
        if changed:
            sets = {s: sets[s] for s in kept}
            continue
        # dominated elements: covering e also covers e2 when every set holding e holds e2
        masks: dict[int, int] = {}
        for s in sets:
            for e in _bits(sets[s]):
                masks[e] = masks.get(e, 0) | (1 << s)
        elems = sorted(masks, key=lambda e: (masks[e].bit_count(), e))
        keep_elems: list[int] = []
        for e in elems:
            m = masks[e]
            if any((masks[k] & ~m) == 0 for k in keep_elems):
                universe &= ~(1 << e)
                changed = True
            else:
                keep_elems.append(e)
    return {s: b & universe for s, b in sets.items() if b & universe}, universe


def _components(sets: dict[int, int], universe: int) -> list[tuple[dict[int, int], int]]:
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for b in sets.values():
        elems = list(_bits(b))
        for e in elems[1:]:
            ra, rb = find(elems[0]), find(e)
            if ra != rb:
                parent[rb] = ra
    groups: dict[int, int] = {}
    for e in _bits(universe):
        r = find(e)
        groups[r] = groups.get(r, 0) | (1 << e)
    out = []
    for r in sorted(groups, key=lambda r: (groups[r] & -groups[r])):
        comp = groups[r]
        out.append(({s: b for s, b in sets.items() if b & comp}, comp))
    return out


class _Budget:
    def __init__(self, nodes: int, deadline: float | None):
        self.left = nodes
        self.used = 0
        self.deadline = deadline

    def spend(self) -> bool:
        self.used += 1
        self.left -= 1
        if self.left < 0:
            return False
        if self.deadline is not None and self.used % 256 == 0 and time.monotonic() > self.deadline:
            self.left = -1
            return False
        return True


def _branch_and_bound(sets: dict[int, int], universe: int, budget: _Budget) -> tuple[list[int], bool, int]:
    incumbent = _drop_redundant(sets, _greedy(sets, universe))
    root_lb = lower_bound(sets, universe)
    best = [list(incumbent)]
    complete = [True]
    if len(incumbent) == root_lb:
        return incumbent, True, root_lb

    emask = _element_masks(sets, universe)

    def search(uncovered: int, allowed: int, chosen: list[int]):
        if not budget.spend():
            complete[0] = False
            return
        if not uncovered:
            if len(chosen) < len(best[0]):
                best[0] = list(chosen)
            return
        masks = {}
        for e in _bits(uncovered):
            m = emask[e] & allowed
            if not m:
                return
            masks[e] = m
        live = {s: sets[s] & uncovered for s in _bits(allowed) if sets[s] & uncovered}
        biggest = max(b.bit_count() for b in live.values())
        if len(chosen) + _bound_from_masks(masks, biggest) >= len(best[0]):
            return
        # branch on the first element with the fewest covering sets
        pivot = min(masks, key=lambda e: (masks[e].bit_count(), e))
        options = sorted(_bits(masks[pivot]), key=lambda s: (-live[s].bit_count(), s))
        for s in options:
            bit = 1 << s
            chosen.append(s)
            search(uncovered & ~sets[s], allowed & ~bit, chosen)
            chosen.pop()
            allowed &= ~bit
            if not complete[0]:
                return

    search(universe, sum(1 << s for s in sets), [])
    return best[0], complete[0], root_lb


def solve_exact(p: SetCoverProblem, node_budget: int = 5_000_000, preprocess: bool = True,
                time_limit: float | None = None) -> SetCoverSolution:
    """Minimum set cover; ``optimal`` is False if the node or time budget ran out."""
    p.check_feasible()
    # search depth can reach the cover size
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * p.num_sets + 1000))
    sets = dict(enumerate(_bitsets(p)))
    universe = (1 << p.num_elements) - 1
    forced: list[int] = []
    if preprocess:
        sets, universe = _reduce(sets, universe, forced)
        parts = _components(sets, universe) if universe else []
    else:
        parts = [(sets, universe)] if universe else []
    deadline = time.monotonic() + time_limit if time_limit is not None else None
    budget = _Budget(node_budget, deadline)
    chosen = list(forced)
    optimal = True
    lb_total = len(forced)
    for comp_sets, comp_universe in parts:
        sol, complete, lb = _branch_and_bound(comp_sets, comp_universe, budget)
        chosen.extend(sol)
        optimal &= complete
        lb_total += lb if not complete else len(sol)
    selected = np.zeros(p.num_sets, dtype=bool)
    selected[chosen] = True
    if not p.covers(selected):
        raise AssertionError("solver returned an infeasible cover")
    return SetCoverSolution(selected, int(selected.sum()), optimal, lower_bound=lb_total,
                            nodes=budget.used, stats={"forced": len(forced), "components": len(parts)})
