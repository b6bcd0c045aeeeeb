"""Finite automata over finite words.

Deterministic automata here are *partial*: a missing transition means the
run dies.  :meth:`DFA.minimize` returns a canonical form (trimmed, minimal,
states numbered in breadth-first order), so two minimized automata accept
the same language exactly when they compare equal.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Iterator, Sequence

from .core import StoneSpaceError

BITS = ("0", "1")


@dataclass(frozen=True)
class DFA:
    alphabet: tuple[str, ...]
    delta: tuple[tuple[int | None, ...], ...]
    initial: int
    finals: frozenset[int]

    # -- construction ---------------------------------------------------

    @classmethod
    def empty(cls, alphabet: Sequence[str] = BITS) -> DFA:
        return cls(tuple(alphabet), ((None,) * len(alphabet),), 0, frozenset())

    @classmethod
    def epsilon(cls, alphabet: Sequence[str] = BITS) -> DFA:
        return cls(tuple(alphabet), ((None,) * len(alphabet),), 0, frozenset({0}))

    @classmethod
    def universal(cls, alphabet: Sequence[str] = BITS) -> DFA:
        return cls(tuple(alphabet), ((0,) * len(alphabet),), 0, frozenset({0}))

    @classmethod
    def from_words(cls, words: Iterable[Sequence[str]], alphabet: Sequence[str] = BITS) -> DFA:
        alphabet = tuple(alphabet)
        index = {a: i for i, a in enumerate(alphabet)}
        delta: list[list[int | None]] = [[None] * len(alphabet)]
        finals = set()
        for w in words:
            q = 0
            for sym in w:
                i = index[sym]
                if delta[q][i] is None:
                    delta.append([None] * len(alphabet))
                    delta[q][i] = len(delta) - 1
                q = delta[q][i]
            finals.add(q)
        return cls(alphabet, tuple(map(tuple, delta)), 0, frozenset(finals)).minimize()

    @classmethod
    def from_regex(cls, source: str) -> DFA:
        return parse_regex(source).determinize(BITS).minimize()

    # -- basic queries --------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.delta)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.alphabet)}

    def step(self, q: int | None, sym: str) -> int | None:
        if q is None:
            return None
        return self.delta[q][self._index[sym]]

    def run(self, word: Iterable[str], q: int | None = None) -> int | None:
        q = self.initial if q is None else q
        for sym in word:
            q = self.delta[q][self._index[sym]]
            if q is None:
                return None
        return q

    def accepts(self, word: Iterable[str]) -> bool:
        return self.run(word) in self.finals

    def successors(self, q: int) -> Iterator[tuple[str, int]]:
        for a, t in zip(self.alphabet, self.delta[q]):
            if t is not None:
                yield a, t

    def reachable(self, start: Iterable[int] | None = None) -> set[int]:
        seen = set([self.initial] if start is None else start)
        stack = list(seen)
        while stack:
            q = stack.pop()
            for _, t in self.successors(q):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return seen

    def coreachable(self, targets: Iterable[int] | None = None) -> set[int]:
        preds: list[list[int]] = [[] for _ in self.delta]
        for q in range(self.size):
            for _, t in self.successors(q):
                preds[t].append(q)
        seen = set(self.finals if targets is None else targets)
        stack = list(seen)
        while stack:
            q = stack.pop()
            for p in preds[q]:
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return seen

    # -- normalisation --------------------------------------------------

    def restrict(self, keep: set[int]) -> DFA:
        """Drop every state outside ``keep`` (the initial state always stays)."""
        keep = set(keep) | {self.initial}
        order = sorted(keep)
        new = {q: i for i, q in enumerate(order)}
        delta = tuple(
            tuple(new.get(t) if t is not None else None for t in self.delta[q]) for q in order
        )
        return DFA(self.alphabet, delta, new[self.initial], frozenset(new[q] for q in self.finals if q in keep))

    def trim(self) -> DFA:
        useful = self.reachable() & self.coreachable()
        if self.initial not in useful:
            return DFA.empty(self.alphabet)
        return self.restrict(useful)

    def minimize(self) -> DFA:
        trimmed = self.trim()
        if not trimmed.finals:
            return DFA.empty(self.alphabet)
        n = trimmed.size
        sink = n
        nsym = len(self.alphabet)

        def tgt(q: int, i: int) -> int:
            if q == sink:
                return sink
            t = trimmed.delta[q][i]
            return sink if t is None else t

        # Moore refinement on the completed automaton
        block = [1 if q in trimmed.finals else 0 for q in range(n)] + [0]
        while True:
            sigs = {}
            new_block = []
            for q in range(n + 1):
                sig = (block[q],) + tuple(block[tgt(q, i)] for i in range(nsym))
                new_block.append(sigs.setdefault(sig, len(sigs)))
            if len(sigs) == len(set(block)):
                block = new_block
                break
            block = new_block
        sink_block = block[sink]
        # renumber blocks breadth-first from the initial block
        order: dict[int, int] = {}
        queue = deque([block[trimmed.initial]])
        order[block[trimmed.initial]] = 0
        rep = {}
        for q in range(n):
            rep.setdefault(block[q], q)
        delta = []
        while queue:
            b = queue.popleft()
            q = rep[b]
            row = []
            for i in range(nsym):
                tb = block[tgt(q, i)]
                if tb == sink_block:
                    row.append(None)
                    continue
                if tb not in order:
                    order[tb] = len(order)
                    queue.append(tb)
                row.append(order[tb])
            delta.append(tuple(row))
        finals = frozenset(order[block[q]] for q in trimmed.finals)
        return DFA(self.alphabet, tuple(delta), 0, finals)

    # -- language properties --------------------------------------------

    def is_empty(self) -> bool:
        return not (self.reachable() & set(self.finals))

    def infinite_states(self) -> set[int]:
        """States whose residual language is infinite."""
        useful = self.reachable() & self.coreachable()
        # a residual is infinite iff it reaches a useful state on a useful cycle
        on_cycle = _states_on_cycles(self, useful)
        return {q for q in useful if self.reachable([q]) & on_cycle}

    def is_infinite(self) -> bool:
        return self.initial in self.infinite_states()

    def count(self) -> int | None:
        """Number of accepted words, or ``None`` when infinite."""
        if self.is_infinite():
            return None
        useful = self.reachable() & self.coreachable()
        memo: dict[int, int] = {}

        def go(q: int) -> int:
            if q not in memo:
                total = 1 if q in self.finals else 0
                for _, t in self.successors(q):
                    if t in useful:
                        total += go(t)
                memo[q] = total
            return memo[q]

        return go(self.initial) if self.initial in useful else 0

    def words(self, limit: int | None = None) -> Iterator[str]:
        """Accepted words in shortlex order (joined as strings)."""
        useful = self.reachable() & self.coreachable()
        if self.initial not in useful:
            return
        produced = 0
        layer: list[tuple[str, int]] = [("", self.initial)]
        while layer:
            nxt = []
            for w, q in layer:
                if q in self.finals:
                    yield w
                    produced += 1
                    if limit is not None and produced >= limit:
                        return
                for a, t in self.successors(q):
                    if t in useful:
                        nxt.append((w + a, t))
            layer = nxt

    # -- constructions --------------------------------------------------

    def with_finals(self, finals: Iterable[int]) -> DFA:
        return DFA(self.alphabet, self.delta, self.initial, frozenset(finals))

    def with_initial(self, q: int) -> DFA:
        return DFA(self.alphabet, self.delta, q, self.finals)

    def to_nfa(self) -> NFA:
        nfa = NFA()
        base = nfa.add_states(self.size)
        for q in range(self.size):
            for a, t in self.successors(q):
                nfa.add_edge(base + q, a, base + t)
        nfa.start = base + self.initial
        nfa.accept = {base + q for q in self.finals}
        return nfa

    def concat_word(self, word: Sequence[str]) -> DFA:
        nfa = self.to_nfa()
        end = nfa.add_path(nfa.accept, word)
        nfa.accept = {end}
        return nfa.determinize(self.alphabet).minimize()

    def concat(self, other: DFA) -> DFA:
        nfa = self.to_nfa()
        second = other.to_nfa()
        offset = nfa.absorb(second)
        for f in nfa.accept:
            nfa.add_edge(f, None, second.start + offset)
        nfa.accept = {q + offset for q in second.accept}
        return nfa.determinize(self.alphabet).minimize()

    def image(self, h: dict[str, str]) -> DFA:
        """Image under the letter-to-word morphism ``h`` (into bit strings)."""
        nfa = NFA()
        base = nfa.add_states(self.size)
        for q in range(self.size):
            for a, t in self.successors(q):
                nfa.add_path([base + q], h[a], base + t)
        nfa.start = base + self.initial
        nfa.accept = {base + q for q in self.finals}
        return nfa.determinize(BITS).minimize()

    def length_class(self, modulus: int, residue: int) -> DFA:
        """Accepted words whose length is ``residue`` mod ``modulus``."""
        counter = DFA(
            self.alphabet,
            tuple(tuple((i + 1) % modulus for _ in self.alphabet) for i in range(modulus)),
            0,
            frozenset({residue % modulus}),
        )
        return self & counter

    def right_quotient_star(self, word: str) -> DFA:
        """``{v : v + word*m accepted for some m >= 0}``."""
        finals = set()
        for q in range(self.size):
            seen = set()
            cur: int | None = q
            while cur is not None and cur not in seen:
                if cur in self.finals:
                    finals.add(q)
                    break
                seen.add(cur)
                cur = self.run(word, cur)
        return self.with_finals(finals).minimize()

    def reversed_reachers(self, q: int) -> DFA:
        """Words leading from the initial state to ``q``."""
        return self.with_finals({q}).minimize()

    def __and__(self, other: DFA) -> DFA:
        return product(self, other, lambda a, b: a and b)

    def __or__(self, other: DFA) -> DFA:
        return product(self, other, lambda a, b: a or b)

    def __sub__(self, other: DFA) -> DFA:
        return product(self, other, lambda a, b: a and not b)

    def same_language(self, other: DFA) -> bool:
        return self.minimize() == other.minimize()

    def subset_of(self, other: DFA) -> bool:
        return (self - other).is_empty()


def _states_on_cycles(dfa: DFA, allowed: set[int]) -> set[int]:
    """States of ``allowed`` lying on a cycle that stays inside ``allowed``."""
    comps = strongly_connected(
        allowed, lambda q: [t for _, t in dfa.successors(q) if t in allowed]
    )
    out = set()
    for comp in comps:
        if len(comp) > 1:
            out |= comp
        else:
            (q,) = comp
            if any(t == q for _, t in dfa.successors(q)):
                out.add(q)
    return out


def strongly_connected(nodes: Iterable, succ: Callable[[object], Iterable]) -> list[set]:
    """Tarjan's algorithm, iterative."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    comps: list[set] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def product(a: DFA, b: DFA, op: Callable[[bool, bool], bool]) -> DFA:
    if a.alphabet != b.alphabet:
        raise StoneSpaceError("alphabet mismatch")
    start = (a.initial, b.initial)
    ids = {start: 0}
    queue = deque([start])
    delta = []
    finals = set()
    while queue:
        pa, pb = pair = queue.popleft()
        if op(pa in a.finals, pb in b.finals):
            finals.add(ids[pair])
        row = []
        for i in range(len(a.alphabet)):
            ta = a.delta[pa][i] if pa is not None else None
            tb = b.delta[pb][i] if pb is not None else None
            if ta is None and tb is None:
                row.append(None)
                continue
            nxt = (ta, tb)
            if nxt not in ids:
                ids[nxt] = len(ids)
                queue.append(nxt)
            row.append(ids[nxt])
        delta.append(tuple(row))
    return DFA(a.alphabet, tuple(delta), 0, frozenset(finals)).minimize()


@dataclass
class NFA:
    """Nondeterministic automaton with epsilon edges (symbol ``None``)."""

    edges: list[list[tuple[str | None, int]]] = field(default_factory=list)
    start: int = 0
    accept: set[int] = field(default_factory=set)

    def add_states(self, n: int) -> int:
        base = len(self.edges)
        self.edges.extend([] for _ in range(n))
        return base

    def add_edge(self, src: int, sym: str | None, dst: int) -> None:
        self.edges[src].append((sym, dst))

    def add_path(self, sources: Iterable[int], word: Sequence[str], end: int | None = None) -> int:
        """Chain ``word`` from every source; returns the final state."""
        sources = list(sources)
        if not word:
            if end is None:
                end = self.add_states(1)
            for s in sources:
                self.add_edge(s, None, end)
            return end
        first = self.add_states(1) if len(word) > 1 or end is None else end
        for s in sources:
            self.add_edge(s, word[0], first)
        cur = first
        for i, sym in enumerate(word[1:], start=1):
            nxt = end if (i == len(word) - 1 and end is not None) else self.add_states(1)
            self.add_edge(cur, sym, nxt)
            cur = nxt
        return cur

    def absorb(self, other: NFA) -> int:
        offset = len(self.edges)
        for row in other.edges:
            self.edges.append([(s, d + offset) for s, d in row])
        return offset

    def _eclose(self, states: Iterable[int]) -> frozenset[int]:
        seen = set(states)
        stack = list(seen)
        while stack:
            q = stack.pop()
            for sym, d in self.edges[q]:
                if sym is None and d not in seen:
                    seen.add(d)
                    stack.append(d)
        return frozenset(seen)

    def determinize(self, alphabet: Sequence[str]) -> DFA:
        alphabet = tuple(alphabet)
        start = self._eclose([self.start])
        ids = {start: 0}
        queue = deque([start])
        delta = []
        finals = set()
        while queue:
            cur = queue.popleft()
            if cur & self.accept:
                finals.add(ids[cur])
            row = []
            for a in alphabet:
                moved = {d for q in cur for sym, d in self.edges[q] if sym == a}
                if not moved:
                    row.append(None)
                    continue
                nxt = self._eclose(moved)
                if nxt not in ids:
                    ids[nxt] = len(ids)
                    queue.append(nxt)
                row.append(ids[nxt])
            delta.append(tuple(row))
        return DFA(alphabet, tuple(delta), 0, frozenset(finals))


# -- stem regex dialect --------------------------------------------------
#
#   expr   := term ('+' term)*
#   term   := factor*
#   factor := atom '*'*
#   atom   := '0' | '1' | 'ε' | '(' expr ')'
#
# Whitespace is ignored and the whole string must match.  ``()`` is the
# empty word.


class RegexError(StoneSpaceError):
    def __init__(self, message: str, source: str, offset: int):
        super().__init__(f"{message} at offset {offset} in /{source}/")
        self.source = source
        self.offset = offset


def parse_regex(source: str) -> NFA:
    nfa = NFA()
    text = [(i, ch) for i, ch in enumerate(source) if not ch.isspace()]
    pos = 0

    def peek() -> str | None:
        return text[pos][1] if pos < len(text) else None

    def offset() -> int:
        return text[pos][0] if pos < len(text) else len(source)

    def fragment_epsilon() -> tuple[int, int]:
        s = nfa.add_states(2)
        nfa.add_edge(s, None, s + 1)
        return s, s + 1

    def expr() -> tuple[int, int]:
        nonlocal pos
        s, e = term()
        while peek() == "+":
            pos += 1
            s2, e2 = term()
            ns = nfa.add_states(2)
            nfa.add_edge(ns, None, s)
            nfa.add_edge(ns, None, s2)
            nfa.add_edge(e, None, ns + 1)
            nfa.add_edge(e2, None, ns + 1)
            s, e = ns, ns + 1
        return s, e

    def term() -> tuple[int, int]:
        frag = None
        while peek() is not None and peek() not in "+)":
            f = factor()
            if frag is None:
                frag = f
            else:
                nfa.add_edge(frag[1], None, f[0])
                frag = (frag[0], f[1])
        return frag if frag is not None else fragment_epsilon()

    def factor() -> tuple[int, int]:
        nonlocal pos
        s, e = atom()
        while peek() == "*":
            pos += 1
            ns = nfa.add_states(2)
            nfa.add_edge(ns, None, s)
            nfa.add_edge(ns, None, ns + 1)
            nfa.add_edge(e, None, s)
            nfa.add_edge(e, None, ns + 1)
            s, e = ns, ns + 1
        return s, e

    def atom() -> tuple[int, int]:
        nonlocal pos
        ch = peek()
        if ch in ("0", "1"):
            pos += 1
            s = nfa.add_states(2)
            nfa.add_edge(s, ch, s + 1)
            return s, s + 1
        if ch == "ε":
            pos += 1
            return fragment_epsilon()
        if ch == "(":
            pos += 1
            frag = expr()
            if peek() != ")":
                raise RegexError("expected ')'", source, offset())
            pos += 1
            return frag
        raise RegexError(f"unexpected {ch!r}" if ch else "unexpected end", source, offset())

    s, e = expr()
    if pos != len(text):
        raise RegexError(f"unexpected {peek()!r}", source, offset())
    nfa.start = s
    nfa.accept = {e}
    return nfa
