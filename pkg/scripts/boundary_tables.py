#!/usr/bin/env python3
"""Print every registered boundary scenario table and the leftover-term
functionals in human-readable form."""

import sys

sys.path.insert(0, "src")

from wres.boundary import get_scenario, phi_total, registered_scenarios, res_partial


def main():
    for key in registered_scenarios():
        scenario = get_scenario(*key)
        report = phi_total(scenario)
        print(f"=== {scenario.name} (n={scenario.n}, powers={scenario.powers}) ===")
        for label, case, value in report.cases:
            idx = f"r={case.r} l={case.l} k={case.k} j={case.j} |a|={case.alpha}"
            print(f"  {label:>4}  [{idx}]  {value}")
        print(f"  total            {report.total}")
        print(f"  over boundary    {report.total_over_boundary}")
        status = "ok" if report.all_pass else "MISMATCH"
        print(f"  expected checks  {status}")
        print()

    print("=== leftover-term functionals ===")
    for kind in ("res11", "res21", "res22", "res23", "res21_51", "res22_51"):
        r = res_partial(kind)
        flag = "ok" if r.passes else "MISMATCH"
        print(f"  {kind:>9}: {r.raw}")
        print(f"             = {r.igrb_multiple}  [{flag}]")


if __name__ == "__main__":
    main()
