"""The strategy/verdict table: which pooling+labelling pairs simulate what.

Positive cells are backed by running the matching construction on
bundled fixtures and verifying it exhaustively (zero mismatches
required); negative cells are backed by certificates that are replayed
from their own serialized evidence inside the same run.  Sigmoid rows
additionally carry numeric optimizer diagnostics as corroborating,
non-authoritative evidence.

The report is fully deterministic: canonical orders everywhere, a fixed
seed for the numeric diagnostics, and no timing data in the JSON.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .certifier import (certify_nonmonotonic_failure,
                        certify_strategy_failure, reverify_certificate)
from .constructors import construct
from .fixtures import fixture
from .strategies import TABLE1_STRATEGIES, StrategyId, sig_conical_diagnostics
from .verifier import verify_monotonic, verify_nonmonotonic


class CellFailure(AssertionError):
    """A table cell's construction or certificate failed; names the cell."""


@dataclass
class CellResult:
    verdict: str  # "simulable" | "not-simulable"
    method: str
    evidence: list[dict]

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "method": self.method,
                "evidence": self.evidence}


@dataclass
class RowResult:
    strategy: str
    pooling: str
    labelling: str
    tied: bool
    monotonic: CellResult
    non_monotonic: CellResult
    diagnostics: dict | None = None

    def to_dict(self) -> dict:
        doc = {"strategy": self.strategy, "pooling": self.pooling,
               "labelling": self.labelling, "tied": self.tied,
               "monotonic": self.monotonic.to_dict(),
               "non_monotonic": self.non_monotonic.to_dict()}
        if self.diagnostics is not None:
            doc["diagnostics"] = self.diagnostics
        return doc


@dataclass
class Table1Report:
    rows: list[RowResult]

    def pattern(self) -> list[tuple[str, str]]:
        return [(r.monotonic.verdict, r.non_monotonic.verdict)
                for r in self.rows]

    def to_dict(self) -> dict:
        return {"rows": [r.to_dict() for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_markdown(self) -> str:
        mark = {"simulable": "yes", "not-simulable": "no"}
        lines = [
            "| strategy | pooling | labelling | tied | monotonic | non-monotonic |",
            "|---|---|---|---|---|---|",
        ]
        for r in self.rows:
            mono = f"{mark[r.monotonic.verdict]} ({r.monotonic.method})"
            nm = f"{mark[r.non_monotonic.verdict]} ({r.non_monotonic.method})"
            lines.append(
                f"| {r.strategy} | {r.pooling} | {r.labelling} "
                f"| {'yes' if r.tied else 'no'} | {mono} | {nm} |")
        return "\n".join(lines) + "\n"


# fixtures on which each positive cell is demonstrated end to end
MONOTONIC_DEMO_FIXTURES = ("CE1", "CE3", "MOTHER")
NONMONOTONIC_DEMO_FIXTURES = ("EX4", "ORD-NM")

# recipe numbers per constructive strategy, (monotonic, non-monotonic)
_CONSTRUCTIVE = {"avg-relu": (1, 4), "had-dot": (2, 5), "ord-ord": (3, None)}


def _construction_cell(strategy: StrategyId, proposition: int,
                       monotonic: bool) -> CellResult:
    names = MONOTONIC_DEMO_FIXTURES if monotonic else NONMONOTONIC_DEMO_FIXTURES
    evidence = []
    for name in names:
        kb = fixture(name)
        result = construct(kb, proposition)
        if monotonic:
            report = verify_monotonic(result.embedding, strategy, kb)
        else:
            report = verify_nonmonotonic(result.embedding, strategy, kb)
        if not report.simulates:
            raise CellFailure(
                f"cell ({strategy.name}, "
                f"{'monotonic' if monotonic else 'non-monotonic'}): "
                f"construction {proposition} failed verification on {name}")
        evidence.append({"fixture": name, "proposition": proposition,
                         "report": report.to_dict(timing=False)})
    return CellResult("simulable", "construction+verification", evidence)


def _certificate_cell(strategy: StrategyId, monotonic: bool) -> CellResult:
    if monotonic:
        cert = certify_strategy_failure(strategy)
    else:
        cert = certify_nonmonotonic_failure(strategy)
    column = "monotonic" if monotonic else "non-monotonic"
    if cert.verdict != "not-simulable":
        raise CellFailure(
            f"cell ({strategy.name}, {column}): expected an impossibility "
            f"certificate, got verdict {cert.verdict}")
    if not reverify_certificate(cert):
        raise CellFailure(
            f"cell ({strategy.name}, {column}): certificate failed replay")
    method = ("certificate-with-assumptions" if cert.assumptions
              else "certificate")
    return CellResult("not-simulable", method, [cert.to_dict()])


def _build_row(strategy: StrategyId, seed: int) -> RowResult:
    recipes = _CONSTRUCTIVE.get(strategy.name)
    if recipes and recipes[0] is not None:
        mono = _construction_cell(strategy, recipes[0], monotonic=True)
    else:
        mono = _certificate_cell(strategy, monotonic=True)
    if recipes and recipes[1] is not None:
        nm = _construction_cell(strategy, recipes[1], monotonic=False)
    else:
        nm = _certificate_cell(strategy, monotonic=False)
    diagnostics = None
    if strategy.pooling == "sig":
        diagnostics = sig_conical_diagnostics(seed=seed)
    return RowResult(strategy.name, strategy.pooling, strategy.labelling,
                     strategy.tied, mono, nm, diagnostics)


def run_table1(seed: int = 0, jobs: int = 1) -> Table1Report:
    """Build every row; any failing cell aborts with the cell named."""
    strategies = list(TABLE1_STRATEGIES)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda s: _build_row(s, seed), strategies))
    else:
        rows = [_build_row(s, seed) for s in strategies]
    return Table1Report(rows)
