"""Finite abstract reduction systems and their confluence properties."""
from __future__ import annotations

import logging
import random
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Iterable

logger = logging.getLogger(__name__)

Element = Hashable


@dataclass(frozen=True)
class FiniteARS:
    elements: tuple[Element, ...]
    edges: frozenset[tuple[Element, Element]]

    def __post_init__(self) -> None:
        known = set(self.elements)
        for x, y in self.edges:
            if x not in known or y not in known:
                raise ValueError(f"edge ({x!r}, {y!r}) leaves the element set")

    @classmethod
    def build(cls, elements: Iterable[Element], edges: Iterable[tuple[Element, Element]]) -> FiniteARS:
        ordered = list(dict.fromkeys(elements))
        edge_set = frozenset((x, y) for x, y in edges)
        # tolerate endpoints that were not listed explicitly
        for x, y in edge_set:
            for e in (x, y):
                if e not in ordered:
                    ordered.append(e)
        return cls(tuple(ordered), edge_set)


@dataclass
class ARSReport:
    noetherian: bool
    locally_confluent: bool
    totally_confluent: bool
    church_rosser: bool
    unique_normal_forms: bool
    normal_forms: dict[Element, frozenset[Element]]
    # (top, left, right) forks or (left, right) pairs that never rejoin
    local_witness: tuple | None = None
    total_witness: tuple | None = None
    church_rosser_witness: tuple | None = None
    cycle: list[Element] = field(default_factory=list)


def _successors(ars: FiniteARS) -> dict[Element, list[Element]]:
    succ: dict[Element, list[Element]] = {e: [] for e in ars.elements}
    for x, y in sorted(ars.edges, key=repr):
        succ[x].append(y)
    return succ


def reachable(succ: dict[Element, list[Element]], start: Element) -> frozenset[Element]:
    """Reflexive-transitive closure from `start`."""
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in succ[x]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return frozenset(seen)


def _find_cycle(ars: FiniteARS, succ: dict[Element, list[Element]]) -> list[Element]:
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {e: WHITE for e in ars.elements}
    for root in ars.elements:
        if colour[root] != WHITE:
            continue
        stack: list[tuple[Element, int]] = [(root, 0)]
        path: list[Element] = [root]
        colour[root] = GREY
        while stack:
            node, i = stack.pop()
            if i < len(succ[node]):
                stack.append((node, i + 1))
                nxt = succ[node][i]
                if colour[nxt] == GREY:
                    return path[path.index(nxt):] + [nxt]
                if colour[nxt] == WHITE:
                    colour[nxt] = GREY
                    path.append(nxt)
                    stack.append((nxt, 0))
            else:
                colour[node] = BLACK
                path.pop()
    return []


def _components(ars: FiniteARS, succ: dict[Element, list[Element]]) -> list[list[Element]]:
    undirected: dict[Element, set[Element]] = {e: set() for e in ars.elements}
    for x, ys in succ.items():
        for y in ys:
            undirected[x].add(y)
            undirected[y].add(x)
    seen: set[Element] = set()
    out: list[list[Element]] = []
    for e in ars.elements:
        if e in seen:
            continue
        comp = []
        queue = deque([e])
        seen.add(e)
        while queue:
            x = queue.popleft()
            comp.append(x)
            for y in undirected[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        out.append(comp)
    return out


def analyze_ars(ars: FiniteARS) -> ARSReport:
    succ = _successors(ars)
    reach = {e: reachable(succ, e) for e in ars.elements}
    irreducible = {e for e in ars.elements if not succ[e]}
    normal_forms = {e: frozenset(r for r in reach[e] if r in irreducible) for e in ars.elements}

    def joinable(y: Element, z: Element) -> bool:
        return not reach[y].isdisjoint(reach[z])

    cycle = _find_cycle(ars, succ)

    local_witness = None
    for x in ars.elements:
        for y, z in combinations(succ[x], 2):
            if not joinable(y, z):
                local_witness = (x, y, z)
                break
        if local_witness:
            break

    total_witness = None
    for x in ars.elements:
        for y, z in combinations(sorted(reach[x], key=repr), 2):
            if not joinable(y, z):
                total_witness = (x, y, z)
                break
        if total_witness:
            break

    cr_witness = None
    for comp in _components(ars, succ):
        for y, z in combinations(comp, 2):
            if not joinable(y, z):
                cr_witness = (y, z)
                break
        if cr_witness:
            break

    report = ARSReport(
        noetherian=not cycle,
        locally_confluent=local_witness is None,
        totally_confluent=total_witness is None,
        church_rosser=cr_witness is None,
        unique_normal_forms=all(len(nf) == 1 for nf in normal_forms.values()),
        normal_forms=normal_forms,
        local_witness=local_witness,
        total_witness=total_witness,
        church_rosser_witness=cr_witness,
        cycle=cycle,
    )
    logger.debug("ARS with %d elements, %d edges analysed", len(ars.elements), len(ars.edges))
    return report


def chain_example(k: int, merge_z: bool = False) -> FiniteARS:
    """x_i -> z_i and x_i -> z_{i-1} for i = 1..k; with merge_z every z_i is one element."""
    if k < 1:
        raise ValueError("chain needs k >= 1")

    def z(i: int) -> str:
        return "z" if merge_z else f"z{i}"

    elements = [f"x{i}" for i in range(1, k + 1)] + list(dict.fromkeys(z(i) for i in range(k + 1)))
    edges = [(f"x{i}", z(i)) for i in range(1, k + 1)] + [(f"x{i}", z(i - 1)) for i in range(1, k + 1)]
    return FiniteARS.build(elements, edges)


def looping_example() -> FiniteARS:
    """x1 <-> x2 with exits x1 -> z1, x2 -> z2: locally but not totally confluent."""
    return FiniteARS.build(["x1", "x2", "z1", "z2"], [("x1", "z1"), ("x1", "x2"), ("x2", "x1"), ("x2", "z2")])


def random_acyclic(rng: random.Random, size: int, density: float = 0.15) -> FiniteARS:
    """Edges only from lower to higher index, so the result is noetherian."""
    elements = [f"v{i}" for i in range(size)]
    edges = [
        (elements[i], elements[j])
        for i in range(size) for j in range(i + 1, size)
        if rng.random() < density
    ]
    return FiniteARS.build(elements, edges)
