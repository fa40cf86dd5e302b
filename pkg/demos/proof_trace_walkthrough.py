"""Walk through the polynomial-method argument on a genuine and on an undersized input.

Run: python demos/proof_trace_walkthrough.py
"""

import json
from fractions import Fraction

from kakeya_lab.kakeya import rspace
from kakeya_lab.polymethod import proof_trace, replay_trace


def show(tr):
    for a in tr.assertions:
        print(f"  step {a.step}: {'ok  ' if a.holds else 'FAIL'} {a.name}: {a.lhs} {a.relation} {a.rhs}")
    print("  ->", tr.verdict)


def main():
    sp = rspace(2, 2, 2)
    print("whole plane, eps = 1, nu = 3/4:")
    show(proof_trace(sp.points(), 1, Fraction(3, 4), 2, 2, 2))

    print("\none line, claimed as a Kakeya set for its own direction (degree forced past step 1):")
    line = [(a, 0) for a in range(4)]
    tr = proof_trace(line, 1, Fraction(1, 16), 2, 2, 2, omega=[(1, 0)], forced_degree=True)
    print("  g    =", tr.step_data(3)["g"]["text"])
    print("  gbar =", tr.step_data(3)["gbar"]["text"])
    show(tr)

    print("\nsame line claimed for every direction:")
    show(proof_trace(line, 1, Fraction(3, 4), 2, 2, 2, omega=range(sp.ndirections), forced_degree=True))

    data = json.loads(json.dumps(tr.to_json()))
    print("\nreplay of the stored trace:", replay_trace(data).to_json()["ok"])
    data["steps"][-1]["sz_count"] += 1
    print("replay after editing the recorded count:", replay_trace(data).mismatches)


if __name__ == "__main__":
    main()
