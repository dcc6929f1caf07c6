"""Bundled knowledge bases used by the certifier and the verdict table.

Each fixture is a small KB chosen to defeat (or exercise) one embedding
strategy:

  CE1     two conjunctive rules sharing a head; the averaged dot scores
          of the four pair antecedents cannot be ordered consistently.
  CE2     four pair rules over two heads; the squared-distance sums
          force contradictory orderings of the same dot products.
  CE3     six pair rules over two heads; every pair antecedent entails
          exactly one head, fuel for the half-space closure argument.
  CE4     CE3 plus one auxiliary head per attribute pair, implied by
          each member alone; the auxiliary heads pin down the angular
          side conditions the closure argument needs for sigmoid pooling.
  EX4     stratified KB: the two categories exclude each other, apple
          with safari suggests technology, apple alone suggests food.
  ORD-NM  stratified KB: a with b is incoherent, a alone implies x.
          Defeats any pooling whose label sets grow monotonically.
  MOTHER  mother holds exactly when parent and female both hold; the
          one-way entailments break tied (symmetric) dot labelling.
"""

from __future__ import annotations

from functools import lru_cache

from .logic import KnowledgeBase, StratifiedKB, parse_kb

FIXTURE_SOURCES: dict[str, str] = {
    "CE1": """\
atoms: a b c d x
rule: a & b -> x
rule: c & d -> x
""",
    "CE2": """\
atoms: a b c d x y
rule: a & b -> x
rule: c & d -> x
rule: a & c -> y
rule: b & d -> y
""",
    "CE3": """\
atoms: a b c d x y
rule: a & b -> x
rule: c & d -> x
rule: a & c -> y
rule: b & d -> y
rule: a & d -> y
rule: b & c -> y
""",
    "CE4": """\
atoms: a b c d x y z_ab z_ac z_ad z_bc z_bd z_cd
rule: a & b -> x
rule: c & d -> x
rule: a & c -> y
rule: b & d -> y
rule: a & d -> y
rule: b & c -> y
rule: a -> z_ab
rule: b -> z_ab
rule: a -> z_ac
rule: c -> z_ac
rule: a -> z_ad
rule: d -> z_ad
rule: b -> z_bc
rule: c -> z_bc
rule: b -> z_bd
rule: d -> z_bd
rule: c -> z_cd
rule: d -> z_cd
""",
    "EX4": """\
atoms: apple safari cat:technology cat:food
stratum: !cat:technology | !cat:food
stratum: apple & safari -> cat:technology
stratum: apple -> cat:food
""",
    "ORD-NM": """\
atoms: a b x
stratum: a & b -> FALSE
stratum: a -> x
""",
    "MOTHER": """\
atoms: parent female mother
formula: mother <-> parent & female
""",
}

FIXTURE_NAMES: tuple[str, ...] = tuple(FIXTURE_SOURCES)


@lru_cache(maxsize=None)
def fixture(name: str) -> KnowledgeBase | StratifiedKB:
    try:
        source = FIXTURE_SOURCES[name]
    except KeyError:
        known = ", ".join(FIXTURE_NAMES)
        raise KeyError(f"unknown fixture {name!r} (known: {known})") from None
    return parse_kb(source)
