import itertools

import numpy as np
import pytest

from hornfall.formula import HornFormula


def brute_force(f: HornFormula) -> tuple[bool, frozenset[int] | None]:
    """Exhaustive oracle: satisfiability and, if SAT, the intersection of all models
    restricted to variables true in every model (the least model for Horn)."""
    n = f.n
    bits = np.array(list(itertools.product((False, True), repeat=n)), dtype=bool)
    assign = np.zeros((bits.shape[0], n + 1), dtype=bool)
    assign[:, 1:] = bits
    ok = np.ones(bits.shape[0], dtype=bool)
    for c in f.clauses:
        sat = np.zeros(bits.shape[0], dtype=bool)
        if c.positive is not None:
            sat |= assign[:, c.positive]
        for v in c.negatives:
            sat |= ~assign[:, v]
        ok &= sat
    if not ok.any():
        return False, None
    models = assign[ok]
    return True, frozenset(int(v) for v in np.flatnonzero(models.all(axis=0)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def random_horn(rng: np.random.Generator, n: int, m: int | None = None) -> HornFormula:
    """Arbitrary Horn formula: mixed lengths, repeated clauses, several
    headless clauses and the occasional empty clause."""
    from hornfall.formula import HornClause

    m = int(rng.integers(0, 3 * n + 2)) if m is None else m
    clauses = []
    for _ in range(m):
        width = int(rng.integers(0, min(n, 4) + 1))
        vars_ = [int(v) for v in rng.choice(np.arange(1, n + 1), size=width, replace=False)] if width else []
        if vars_ and rng.random() < 0.75:
            clauses.append(HornClause(vars_[0], tuple(sorted(vars_[1:]))))
        elif vars_ or rng.random() < 0.05:
            clauses.append(HornClause(None, tuple(sorted(vars_))))
        if clauses and rng.random() < 0.05:
            clauses.append(clauses[-1])
    return HornFormula(n, clauses)


def adversarial_cases() -> list[HornFormula]:
    from hornfall.formula import HornClause as C

    chain = [C(None, (1,)), C(12, ())] + [C(i, (i + 1,)) for i in range(1, 12)]
    wide = [C(None, (1,))] + [C(1, tuple(range(2, 12)))] + [C(i, ()) for i in range(2, 12)]
    wide_missing = [C(None, (1,))] + [C(1, tuple(range(2, 12)))] + [C(i, ()) for i in range(2, 11)]
    return [
        HornFormula(1, []),
        HornFormula(1, [C(None, ())]),
        HornFormula(1, [C(1, ()), C(None, (1,))]),
        HornFormula(3, [C(None, (1,)), C(2, ()), C(1, (2,))]),
        HornFormula(3, [C(None, (1,)), C(2, ()), C(1, (2, 3))]),
        HornFormula(12, chain),
        HornFormula(12, chain[:-1]),
        HornFormula(12, wide),
        HornFormula(12, wide_missing),
        HornFormula(4, [C(2, (3,)), C(3, (2,)), C(None, (2, 3))]),
        HornFormula(4, [C(2, ()), C(2, ()), C(3, (2, 2 + 2)), C(4, (2,)), C(None, (3, 4))]),
        HornFormula(5, [C(None, (1,)), C(None, (2,)), C(3, ()), C(2, (3,))]),
    ]


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
