"""Consistency reports for scenarios, in human and machine form.

The machine form is a single JSON document::

    {"scenario": ..., "families": [
        {"name": ..., "consistent": ..., "exhaustive": ...,
         "violating_pairs": [{"i": ..., "j": ..., "re": ..., "im": ...}],
         "probabilities": [...]}]}

All numbers are rounded to 12 significant digits before serialization (and
magnitudes below 1e-12 snapped to zero), so rendering is deterministic and
``report_from_dict(json.loads(render_report_machine(r))) == r``.
Probabilities are listed only for families that pass the consistency check;
for the rest they would carry no meaning.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .histories import check_consistency
from .linalg import EPS_CONS
from .scenario import BuiltScenario, ScenarioDoc, build_scenario


def round12(x: float) -> float:
    """Round to 12 significant digits; snap noise below 1e-12 to exact zero."""
    x = float(x)
    if abs(x) < 1e-12:
        return 0.0
    return float(f"{x:.12g}")


@dataclass(frozen=True)
class FamilyResult:
    name: str
    consistent: bool
    exhaustive: bool
    violating_pairs: tuple[tuple[int, int, float, float], ...]
    probabilities: tuple[float, ...]


@dataclass(frozen=True)
class Report:
    scenario: str
    families: tuple[FamilyResult, ...]

    @property
    def all_consistent(self) -> bool:
        return all(f.consistent for f in self.families)


def run_scenario(doc: ScenarioDoc | BuiltScenario, tol: float = EPS_CONS) -> Report:
    """Check every family of a scenario and collect the results in file order."""
    built = doc if isinstance(doc, BuiltScenario) else build_scenario(doc)
    results = []
    for name, family in built.families:
        verdict = check_consistency(family, tol)
        pairs = tuple(
            (i, j, round12(ov.real), round12(ov.imag))
            for i, j, ov in verdict.violating_pairs
        )
        probs = (
            tuple(round12(p) for p in verdict.probabilities)
            if verdict.consistent
            else ()
        )
        results.append(
            FamilyResult(
                name=name,
                consistent=verdict.consistent,
                exhaustive=verdict.exhaustive,
                violating_pairs=pairs,
                probabilities=probs,
            )
        )
    return Report(built.doc.name, tuple(results))


def report_to_dict(report: Report) -> dict:
    return {
        "scenario": report.scenario,
        "families": [
            {
                "name": f.name,
                "consistent": f.consistent,
                "exhaustive": f.exhaustive,
                "violating_pairs": [
                    {"i": i, "j": j, "re": re, "im": im}
                    for i, j, re, im in f.violating_pairs
                ],
                "probabilities": list(f.probabilities),
            }
            for f in report.families
        ],
    }


def report_from_dict(data: dict) -> Report:
    families = tuple(
        FamilyResult(
            name=f["name"],
            consistent=bool(f["consistent"]),
            exhaustive=bool(f["exhaustive"]),
            violating_pairs=tuple(
                (int(p["i"]), int(p["j"]), float(p["re"]), float(p["im"]))
                for p in f["violating_pairs"]
            ),
            probabilities=tuple(float(p) for p in f["probabilities"]),
        )
        for f in data["families"]
    )
    return Report(data["scenario"], families)


def render_report_machine(report: Report) -> str:
    return json.dumps(report_to_dict(report), indent=2) + "\n"


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def render_report_text(report: Report) -> str:
    lines = [f"scenario: {report.scenario}"]
    for f in report.families:
        verdict = "consistent" if f.consistent else "inconsistent"
        lines.append(f"family {f.name}: {verdict} (exhaustive: {'yes' if f.exhaustive else 'no'})")
        if f.consistent:
            probs = ", ".join(_fmt(p) for p in f.probabilities)
            lines.append(f"  probabilities: {probs}")
            lines.append(f"  probability sum: {_fmt(sum(f.probabilities))}")
        else:
            lines.append(f"  violating pairs ({len(f.violating_pairs)}):")
            for i, j, re, im in f.violating_pairs:
                lines.append(f"    ({i}, {j}): overlap re={_fmt(re)} im={_fmt(im)}")
    return "\n".join(lines) + "\n"
