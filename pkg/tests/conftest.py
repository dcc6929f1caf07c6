"""Shared seeded generators for random KBs, formulas and embeddings,
plus the terminal summary for the acceptance criteria."""

import random
import sys
from fractions import Fraction
from pathlib import Path

from embedsim.logic import (And, Iff, Implies, KnowledgeBase, Not, Or,
                            Signature, StratifiedKB, Var, conjoin)
from embedsim.strategies import AttributeEmbedding

sys.path.insert(0, str(Path(__file__).parent))  # make `oracles` importable

# one line per acceptance criterion, filled by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_rule_kb(rng: random.Random, atoms, max_rules=6,
                   max_antecedent=3) -> KnowledgeBase:
    """Conjunctive-antecedent, atomic-head rules over the given atoms."""
    signature = Signature(tuple(atoms))
    rules = []
    for _ in range(rng.randint(1, max_rules)):
        body = rng.sample(atoms, rng.randint(1, min(max_antecedent, len(atoms))))
        head = rng.choice(atoms)
        rules.append(Implies(conjoin(Var(a) for a in body), Var(head)))
    return KnowledgeBase(signature, tuple(rules))


def random_formula(rng: random.Random, atoms, depth=2):
    if depth == 0 or rng.random() < 0.3:
        return Var(rng.choice(atoms))
    kind = rng.randrange(5)
    if kind == 0:
        return Not(random_formula(rng, atoms, depth - 1))
    left = random_formula(rng, atoms, depth - 1)
    right = random_formula(rng, atoms, depth - 1)
    return [And, Or, Implies, Iff][kind - 1](left, right)


def random_stratified_kb(rng: random.Random, atoms,
                         max_strata=3) -> StratifiedKB:
    signature = Signature(tuple(atoms))
    strata = tuple(random_formula(rng, atoms)
                   for _ in range(rng.randint(1, max_strata)))
    return StratifiedKB(signature, strata)


def random_fraction(rng: random.Random, span=4, max_den=3) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, max_den))


def random_embedding(rng: random.Random, atoms, dimension=None,
                     tied=False) -> AttributeEmbedding:
    if dimension is None:
        dimension = rng.randint(1, 4)
    context = {
        a: tuple(random_fraction(rng) for _ in range(dimension))
        for a in atoms
    }
    output = dict(context) if tied else {
        a: tuple(random_fraction(rng) for _ in range(dimension))
        for a in atoms
    }
    return AttributeEmbedding(
        dimension=dimension,
        context=context,
        output=output,
        lam={a: random_fraction(rng) for a in atoms},
        theta={a: abs(random_fraction(rng)) for a in atoms},
    )
