"""Word and binary-tree automata and their Horn encoding.

The encoding of ``A = (S, Sigma, delta, s0, F)`` has one variable per state,
the negative unit ``(not s0)``, a positive unit ``(s)`` for each final state,
and per transition ``(s_i, a, s_j)`` the clause ``(not s_j or s_i)``, or for a
tree transition ``(s_i, a, s_j, s_k)`` the clause ``(not s_j or not s_k or s_i)``.
Propagation then marks exactly the states from which some word (tree) is
accepted, so L(A) is non-empty iff the encoding is unsatisfiable.

Symbols do not appear in the encoding.  Two degenerate transition shapes are
normalised: a tree transition with equal children contributes a single
negated literal, and a transition whose source is also one of its targets
(a self-loop) is a tautology and is left out; the translation map records it.

Text format::

    aut word|tree <m> <alphabet-size>
    start <s>
    final <s> <s> ...        (optional, may repeat)
    <s> <a> <t>              word transition
    <s> <a> <t1> <t2>        tree transition

States are ``1..m``, symbols ``1..alphabet-size``; lines starting with ``c``
are comments.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError
from .formula import HornClause, HornFormula

KINDS = ("word", "tree")


@dataclass(frozen=True)
class Automaton:
    kind: str
    m: int
    alphabet_size: int
    start: int
    finals: frozenset[int]
    transitions: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "finals", frozenset(int(s) for s in self.finals))
        object.__setattr__(self, "transitions", tuple(tuple(int(x) for x in t) for t in self.transitions))
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.m < 1 or self.alphabet_size < 1:
            raise ValueError("an automaton needs at least one state and one symbol")
        states = range(1, self.m + 1)
        if self.start not in states:
            raise ValueError(f"start state {self.start} outside 1..{self.m}")
        for s in self.finals:
            if s not in states:
                raise ValueError(f"final state {s} outside 1..{self.m}")
        width = 3 if self.kind == "word" else 4
        for t in self.transitions:
            if len(t) != width:
                raise ValueError(f"{self.kind} transitions have {width} fields, got {t}")
            if not 1 <= t[1] <= self.alphabet_size:
                raise ValueError(f"symbol {t[1]} outside 1..{self.alphabet_size}")
            for s in (t[0],) + t[2:]:
                if s not in states:
                    raise ValueError(f"state {s} outside 1..{self.m} in transition {t}")


@dataclass(frozen=True)
class TranslationMap:
    state_to_var: dict[int, int]
    var_to_state: dict[int, int]
    # one entry per emitted clause: ("start", s0) | ("final", s) | ("transition", index)
    provenance: tuple[tuple[str, int], ...]
    skipped_transitions: tuple[int, ...] = field(default=())


def to_horn(a: Automaton) -> tuple[HornFormula, TranslationMap]:
    """Encode ``a`` as a Horn formula whose variable 1 is the start state."""
    order = [a.start] + [s for s in range(1, a.m + 1) if s != a.start]
    s2v = {s: i for i, s in enumerate(order, start=1)}
    clauses = [HornClause(None, (1,))]
    prov = [("start", a.start)]
    for s in sorted(a.finals):
        clauses.append(HornClause(s2v[s], ()))
        prov.append(("final", s))
    skipped = []
    for idx, t in enumerate(a.transitions):
        src, targets = t[0], t[2:]
        if src in targets:
            skipped.append(idx)
            continue
        negs = tuple(sorted({s2v[s] for s in targets}))
        clauses.append(HornClause(s2v[src], negs))
        prov.append(("transition", idx))
    tmap = TranslationMap(s2v, {v: s for s, v in s2v.items()}, tuple(prov), tuple(skipped))
    return HornFormula(a.m, clauses), tmap


def emptiness_direct(a: Automaton) -> bool:
    """True when L(a) is empty, decided without the Horn encoding.

    Words: backward reachability from the final states.  Trees: least fixpoint
    of productive states (final, or with a transition to two productive states).
    """
    if a.kind == "word":
        preds: dict[int, list[int]] = {}
        for src, _, dst in a.transitions:
            preds.setdefault(dst, []).append(src)
        seen = set(a.finals)
        todo = deque(a.finals)
        while todo:
            s = todo.popleft()
            for p in preds.get(s, ()):
                if p not in seen:
                    seen.add(p)
                    todo.append(p)
        return a.start not in seen
    productive = set(a.finals)
    changed = True
    while changed:
        changed = False
        for src, _, left, right in a.transitions:
            if src not in productive and left in productive and right in productive:
                productive.add(src)
                changed = True
    return a.start not in productive


def random_automaton(rng: np.random.Generator, kind: str, max_states: int = 8, max_symbols: int = 2) -> Automaton:
    """Small random automaton for cross-checking the encoding.

    State count, alphabet size, number of final states and number of
    transitions are each drawn uniformly from small ranges.
    """
    m = int(rng.integers(1, max_states + 1))
    sigma = int(rng.integers(1, max_symbols + 1))
    start = int(rng.integers(1, m + 1))
    n_final = int(rng.integers(0, min(m, 3) + 1))
    finals = rng.choice(np.arange(1, m + 1), size=n_final, replace=False).tolist()
    n_trans = int(rng.integers(0, 2 * m + 1))
    width = 1 if kind == "word" else 2
    trans = []
    for _ in range(n_trans):
        src = int(rng.integers(1, m + 1))
        sym = int(rng.integers(1, sigma + 1))
        dst = [int(x) for x in rng.integers(1, m + 1, size=width)]
        trans.append((src, sym, *dst))
    return Automaton(kind, m, sigma, start, frozenset(finals), tuple(trans))


def parse_automaton(text: str | bytes) -> Automaton:
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    header = None
    start = None
    finals: set[int] = set()
    trans: list[tuple[int, ...]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split()
        if not toks or toks[0] == "c" or toks[0].startswith("c"):
            continue
        try:
            if header is None:
                if toks[0] != "aut" or len(toks) != 4 or toks[1] not in KINDS:
                    raise ParseError("expected header 'aut word|tree <m> <alphabet-size>'", lineno)
                header = (toks[1], int(toks[2]), int(toks[3]))
            elif toks[0] == "start":
                if len(toks) != 2:
                    raise ParseError("'start' takes exactly one state", lineno)
                if start is not None:
                    raise ParseError("duplicate 'start' line", lineno)
                start = int(toks[1])
            elif toks[0] == "final":
                finals.update(int(x) for x in toks[1:])
            else:
                width = 3 if header[0] == "word" else 4
                if len(toks) != width:
                    raise ParseError(f"{header[0]} transition needs {width} integers", lineno)
                trans.append(tuple(int(x) for x in toks))
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"expected integers: {raw.strip()!r}", lineno) from None
    if header is None:
        raise ParseError("missing 'aut' header", 1)
    if start is None:
        raise ParseError("missing 'start' line", len(text.splitlines()) or 1)
    try:
        return Automaton(header[0], header[1], header[2], start, frozenset(finals), tuple(trans))
    except ValueError as exc:
        raise ParseError(str(exc), len(text.splitlines()) or 1) from None


def serialize_automaton(a: Automaton) -> str:
    lines = [f"aut {a.kind} {a.m} {a.alphabet_size}", f"start {a.start}"]
    if a.finals:
        lines.append("final " + " ".join(str(s) for s in sorted(a.finals)))
    lines.extend(" ".join(str(x) for x in t) for t in a.transitions)
    return "\n".join(lines) + "\n"


__all__ = [
    "Automaton",
    "TranslationMap",
    "emptiness_direct",
    "parse_automaton",
    "random_automaton",
    "serialize_automaton",
    "to_horn",
]
