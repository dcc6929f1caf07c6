"""Exhaustive checking of embeddings against the logical consequence oracle.

A verification sweep enumerates every non-empty attribute subset up to a
cap, asks the logical oracle (entailment for plain KBs, ranked-default
consequence for stratified ones) what the verdict should be, evaluates
the strategy's labelling decision exactly, and records every mismatch.  The
sweep order is canonical: subsets ordered by (size, bitmask), heads by
signature index, so reports are deterministic and the optional thread
pool cannot change the output.

Empty antecedents are excluded from every sweep (pooling an empty set is
undefined for most strategies); each report records that exclusion.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .logic import (KnowledgeBase, Signature, StratifiedKB, entails,
                    kb_digest, nm_consequence_rank)
from .strategies import (AttributeEmbedding, DimensionMismatchError,
                         StrategyId, emb_had, emb_ord, lab_dot, lab_ord,
                         strategy_accepts, strategy_score)

FULL_SWEEP_ATOM_LIMIT = 8
CAPPED_SWEEP_DEFAULT = 4

Query = tuple[tuple[str, ...], str]


@dataclass
class Mismatch:
    subset: tuple[str, ...]
    head: str
    expected: bool
    got: bool
    score: str

    def to_dict(self) -> dict:
        return {"subset": list(self.subset), "head": self.head,
                "expected": self.expected, "got": self.got,
                "score": self.score}


@dataclass
class VerificationReport:
    strategy: str
    kb_digest: str
    kind: str  # "monotonic" | "non-monotonic"
    cap: int
    capped: bool
    queries: int
    mismatches: list[Mismatch]
    elapsed: float
    empty_antecedent_excluded: bool = True

    @property
    def simulates(self) -> bool:
        return not self.mismatches

    def to_dict(self, timing: bool = True) -> dict:
        doc = {
            "strategy": self.strategy,
            "kb_digest": self.kb_digest,
            "kind": self.kind,
            "cap": self.cap,
            "capped": self.capped,
            "queries": self.queries,
            "verdict": "simulates" if self.simulates else "mismatches",
            "mismatches": [m.to_dict() for m in self.mismatches],
            "empty_antecedent_excluded": self.empty_antecedent_excluded,
        }
        if timing:
            doc["elapsed_s"] = round(self.elapsed, 6)
        return doc


def default_cap(signature: Signature) -> int:
    n = len(signature)
    return n if n <= FULL_SWEEP_ATOM_LIMIT else CAPPED_SWEEP_DEFAULT


def nonempty_subsets(signature: Signature, cap: int) -> list[tuple[str, ...]]:
    """Non-empty subsets up to the cap in canonical (|S|, S-bitmask) order."""
    n = len(signature)
    masks = sorted(
        (m for m in range(1, 1 << n) if bin(m).count("1") <= cap),
        key=lambda m: (bin(m).count("1"), m),
    )
    return [signature.names(m) for m in masks]


def subset_queries(signature: Signature, cap: int) -> list[Query]:
    """All (subset, head) pairs in canonical (|S|, S-bitmask, head-index) order."""
    return [(subset, head)
            for subset in nonempty_subsets(signature, cap)
            for head in signature.atoms]


def _check_coverage(embedding: AttributeEmbedding,
                    signature: Signature) -> None:
    missing = [a for a in signature.atoms if a not in embedding.context]
    if missing:
        raise DimensionMismatchError(
            f"embedding lacks vectors for atoms: {', '.join(missing)}")


def _sweep(embedding: AttributeEmbedding, strategy: StrategyId,
           kind: str, digest: str, oracle, signature: Signature,
           cap: int | None, queries: list[Query] | None,
           jobs: int) -> VerificationReport:
    _check_coverage(embedding, signature)
    if cap is None:
        cap = default_cap(signature)
    capped = cap < len(signature)
    if queries is None:
        queries = subset_queries(signature, cap)
    started = time.perf_counter()

    def run(query: Query) -> tuple[bool, bool]:
        subset, head = query
        return oracle(subset, head), strategy_accepts(
            embedding, strategy, subset, head)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, queries))
    else:
        results = [run(q) for q in queries]

    mismatches = [
        Mismatch(subset, head, expected, got,
                 strategy_score(embedding, strategy, subset, head))
        for (subset, head), (expected, got) in zip(queries, results)
        if expected != got
    ]
    return VerificationReport(
        strategy=strategy.name,
        kb_digest=digest,
        kind=kind,
        cap=cap,
        capped=capped,
        queries=len(queries),
        mismatches=mismatches,
        elapsed=time.perf_counter() - started,
    )


def verify_monotonic(embedding: AttributeEmbedding, strategy: StrategyId,
                     kb: KnowledgeBase, cap: int | None = None,
                     queries: list[Query] | None = None,
                     jobs: int = 1) -> VerificationReport:
    """Check the embedding's label sets against entailment on every query."""
    return _sweep(embedding, strategy, "monotonic", kb_digest(kb),
                  lambda s, h: entails(kb, s, h), kb.signature,
                  cap, queries, jobs)


def verify_nonmonotonic(embedding: AttributeEmbedding, strategy: StrategyId,
                        theta: StratifiedKB, cap: int | None = None,
                        queries: list[Query] | None = None,
                        jobs: int = 1) -> VerificationReport:
    """Check the embedding's label sets against ranked-default consequence."""
    return _sweep(embedding, strategy, "non-monotonic", kb_digest(theta),
                  lambda s, h: nm_consequence_rank(theta, s, h),
                  theta.signature, cap, queries, jobs)


# ------------------------------------------------------------------
# Structural property checks
# ------------------------------------------------------------------

@dataclass
class PropertyReport:
    name: str
    holds: bool
    checked: int
    violations: list[dict] = field(default_factory=list)
    trace: dict | None = None

    def to_dict(self) -> dict:
        return {"property": self.name, "holds": self.holds,
                "checked": self.checked, "violations": self.violations,
                "trace": self.trace}


def _ord_labels(embedding: AttributeEmbedding,
                subset: tuple[str, ...]) -> tuple[str, ...]:
    pooled = emb_ord(embedding, subset)
    return tuple(b for b in embedding.atoms
                 if lab_ord(embedding, pooled, b))


def check_ord_monotonicity(embedding: AttributeEmbedding,
                           cap: int | None = None) -> PropertyReport:
    """Label sets under max pooling grow with the attribute set.

    Component-wise max only moves vectors up in the product order, so
    S <= S' forces labels(S) <= labels(S'); consequently no max/order
    embedding can drop a label when attributes are added.
    """
    atoms = embedding.atoms
    sig = Signature(atoms)
    if cap is None:
        cap = default_cap(sig)
    subsets = nonempty_subsets(sig, cap)
    labels = {s: _ord_labels(embedding, s) for s in subsets}
    violations = []
    checked = 0
    trace = None
    for small in subsets:
        small_set = set(small)
        for big in subsets:
            if small == big or not small_set.issubset(big):
                continue
            checked += 1
            missing = [b for b in labels[small] if b not in labels[big]]
            if missing:
                violations.append({"subset": list(small), "superset": list(big),
                                   "dropped": missing})
            if trace is None:
                trace = {"subset": list(small), "superset": list(big),
                         "labels_subset": list(labels[small]),
                         "labels_superset": list(labels[big])}
    return PropertyReport("ord-label-monotonicity", not violations,
                          checked, violations, trace)


def check_tied_hadamard_symmetry(embedding: AttributeEmbedding) -> PropertyReport:
    """Singleton labelling under tied Hadamard+dot is symmetric.

    With tied vectors and zero thresholds, pooling a singleton {a} gives
    the vector a itself, and a . b = b . a, so b is labelled from {a}
    exactly when a is labelled from {b}.  The check requires zero
    thresholds, the form in which the tied variant is defined.
    """
    bad = [a for a in embedding.atoms if embedding.lam[a] != 0]
    if bad:
        raise ValueError(
            f"tied Hadamard symmetry check requires zero thresholds, "
            f"got non-zero for: {', '.join(bad)}")
    violations = []
    checked = 0
    trace = None
    for a in embedding.atoms:
        e_a = emb_had(embedding, (a,))
        for b in embedding.atoms:
            checked += 1
            fwd = lab_dot(embedding, e_a, b, tied=True)
            bwd = lab_dot(embedding, emb_had(embedding, (b,)), a, tied=True)
            if fwd != bwd:
                violations.append({"a": a, "b": b, "a_labels_b": fwd,
                                   "b_labels_a": bwd})
            if trace is None:
                trace = {"a": a, "b": b, "a_labels_b": fwd, "b_labels_a": bwd}
    return PropertyReport("tied-hadamard-symmetry", not violations,
                          checked, violations, trace)
