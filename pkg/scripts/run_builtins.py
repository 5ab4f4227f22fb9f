#!/usr/bin/env python3
"""Check every built-in scenario and print its text report."""

from qhist.report import render_report_text, run_scenario
from qhist.scenario import builtin_names, builtin_scenario


def main() -> None:
    verdicts = {}
    for name in builtin_names():
        report = run_scenario(builtin_scenario(name))
        print(render_report_text(report))
        verdicts[name] = report.all_consistent
    print("summary:")
    for name, ok in verdicts.items():
        print(f"  {name:24s} {'consistent' if ok else 'INCONSISTENT'}")


if __name__ == "__main__":
    main()
