#!/usr/bin/env python3
"""Run the bundled scenario files and write their CSV outputs to out/."""

import sys
from pathlib import Path

from relkin.constitutive import Loading
from relkin.scenario import load_scenario, write_csv
from relkin.worldline import simulate

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    out_dir = ROOT / "out"
    out_dir.mkdir(exist_ok=True)
    for path in sorted((ROOT / "scenarios").glob("*.ini")):
        scenario = load_scenario(path)
        records = simulate(scenario)
        out = out_dir / (path.stem + ".csv")
        write_csv(records, out)
        plastic = [abs(r.sigma_bar - r.t_y) for r in records if r.loading is Loading.PLASTIC]
        print(f"{path.stem:<18s} records={len(records):<6d} "
              f"final Gamma_p={max(r.Gamma_p for r in records):.6g} "
              f"max xi={max(r.xi for r in records):.6g} "
              f"max |sigma-t_y|={max(plastic) if plastic else 0.0:.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
