"""Forbidden-factor automata: recognize words with no rule lhs as a factor, and count them."""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator

from core import Alphabet, UnknownLetter, Word

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DFA:
    alphabet: Alphabet
    # transitions[state][letter position] -> state; state 0 is the start
    transitions: tuple[tuple[int, ...], ...]
    dead: int

    @property
    def states(self) -> int:
        return len(self.transitions)

    @property
    def accepting(self) -> frozenset[int]:
        return frozenset(s for s in range(self.states) if s != self.dead)

    def step(self, state: int, letter: int) -> int:
        if not 0 <= letter < len(self.alphabet):
            raise UnknownLetter(f"letter position {letter} outside alphabet of size {len(self.alphabet)}")
        return self.transitions[state][letter]

    def run(self, word: Word) -> int:
        state = 0
        for letter in word:
            state = self.step(state, letter)
            if state == self.dead:
                return state
        return state


class _Node:
    __slots__ = ("children", "fail", "terminal", "depth")

    def __init__(self, depth: int):
        self.children: dict[int, int] = {}
        self.fail = 0
        self.terminal = False
        self.depth = depth


def build_dfa(forbidden: Iterable[Word], alphabet: Alphabet) -> DFA:
    """Trie of the forbidden words with failure links; any node whose suffix chain hits a terminal is dead."""
    words = [tuple(w) for w in forbidden]
    if any(not w for w in words):
        raise ValueError("forbidden words must be nonempty")
    size = len(alphabet)
    nodes = [_Node(0)]
    for word in words:
        alphabet.check_word(word)
        cur = 0
        for letter in word:
            nxt = nodes[cur].children.get(letter)
            if nxt is None:
                nodes.append(_Node(nodes[cur].depth + 1))
                nxt = len(nodes) - 1
                nodes[cur].children[letter] = nxt
            cur = nxt
        nodes[cur].terminal = True

    # breadth-first: fail links and the goto function
    goto: list[list[int]] = [[0] * size for _ in nodes]
    order: list[int] = [0]
    queue = deque([0])
    while queue:
        cur = queue.popleft()
        node = nodes[cur]
        if cur and nodes[node.fail].terminal:
            node.terminal = True
        for letter in range(size):
            child = node.children.get(letter)
            if child is not None:
                nodes[child].fail = goto[node.fail][letter] if cur else 0
                goto[cur][letter] = child
                order.append(child)
                queue.append(child)
            else:
                goto[cur][letter] = goto[node.fail][letter] if cur else 0

    live = [s for s in order if not nodes[s].terminal]
    renumber = {old: new for new, old in enumerate(live)}
    dead = len(live)
    transitions = []
    for old in live:
        row = tuple(renumber.get(goto[old][letter], dead) for letter in range(size))
        transitions.append(row)
    transitions.append(tuple([dead] * size))
    dfa = DFA(alphabet, tuple(transitions), dead)
    logger.debug("Factor automaton: %d forbidden words, %d states", len(words), dfa.states)
    return dfa


def is_irreducible(dfa: DFA, word: Word) -> bool:
    return dfa.run(word) != dfa.dead


# ---------------------------------------------------------------------------
# Counting
# ---------------------------------------------------------------------------

def transfer_matrix(dfa: DFA) -> list[list[int]]:
    """Letter counts between live states."""
    live = dfa.states - 1
    matrix = [[0] * live for _ in range(live)]
    for state in range(live):
        for target in dfa.transitions[state]:
            if target != dfa.dead:
                matrix[state][target] += 1
    return matrix


def _mat_mul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    size = len(a)
    return [
        [sum(a[i][k] * b[k][j] for k in range(size) if a[i][k]) for j in range(size)]
        for i in range(size)
    ]


def count_words(dfa: DFA, length: int) -> int:
    if length < 0:
        raise ValueError("length must be non-negative")
    matrix = transfer_matrix(dfa)
    size = len(matrix)
    if size == 0:
        return 0
    power = [[int(i == j) for j in range(size)] for i in range(size)]
    base = matrix
    exp = length
    while exp:
        if exp & 1:
            power = _mat_mul(power, base)
        base = _mat_mul(base, base)
        exp >>= 1
    return sum(power[0])


def accepted_words(dfa: DFA, length: int) -> Iterator[Word]:
    """Accepted words of exactly `length` letters, by letter position."""
    frontier: list[tuple[Word, int]] = [((), 0)]
    for _ in range(length):
        frontier = [
            (word + (letter,), target)
            for word, state in frontier
            for letter, target in enumerate(dfa.transitions[state])
            if target != dfa.dead
        ]
    for word, _ in frontier:
        yield word


# ---------------------------------------------------------------------------
# Minimization and export
# ---------------------------------------------------------------------------

def minimize(dfa: DFA) -> DFA:
    """Moore partition refinement over the reachable states."""
    reachable = [0]
    seen = {0}
    for state in reachable:
        for target in dfa.transitions[state]:
            if target not in seen:
                seen.add(target)
                reachable.append(target)
    block = {s: int(s == dfa.dead) for s in reachable}
    while True:
        signature = {s: (block[s], tuple(block[t] for t in dfa.transitions[s])) for s in reachable}
        ids: dict[tuple, int] = {}
        refined = {}
        for s in reachable:
            refined[s] = ids.setdefault(signature[s], len(ids))
        if len(ids) == len(set(block.values())):
            block = refined
            break
        block = refined

    # start state first, then blocks in discovery order, dead block last
    dead_block = block.get(dfa.dead)
    order: list[int] = []
    for s in reachable:
        b = block[s]
        if b not in order and b != dead_block:
            order.append(b)
    if dead_block is None:
        dead_index = len(order)
    else:
        order.append(dead_block)
        dead_index = len(order) - 1
    new_id = {b: i for i, b in enumerate(order)}
    representative = {}
    for s in reachable:
        representative.setdefault(block[s], s)
    size = len(dfa.alphabet)
    transitions = [
        tuple(new_id[block[dfa.transitions[representative[b]][letter]]] for letter in range(size))
        for b in order
    ]
    if dead_block is None:
        transitions.append(tuple([dead_index] * size))
    return DFA(dfa.alphabet, tuple(transitions), dead_index)


def languages_agree(first: DFA, second: DFA, max_len: int) -> bool:
    if first.alphabet != second.alphabet:
        return False
    for length in range(max_len + 1):
        if set(accepted_words(first, length)) != set(accepted_words(second, length)):
            return False
    return True


def to_dot(dfa: DFA) -> str:
    lines = ["digraph factor_automaton {", "  rankdir=LR;", '  start [shape=point];', "  start -> 0;"]
    for state in range(dfa.states):
        shape = "box" if state == dfa.dead else "doublecircle"
        label = "reducible" if state == dfa.dead else str(state)
        lines.append(f'  {state} [shape={shape}, label="{label}"];')
    for state, row in enumerate(dfa.transitions):
        if state == dfa.dead:
            continue
        grouped: dict[int, list[str]] = {}
        for letter, target in enumerate(row):
            grouped.setdefault(target, []).append(dfa.alphabet[letter].token)
        for target, labels in grouped.items():
            lines.append(f'  {state} -> {target} [label="{", ".join(labels)}"];')
    lines.append("}")
    return "\n".join(lines)
