"""Compute and freeze the pilot-oracle thresholds used by the acceptance gate.

Run once; the output is committed as tests/data/pilot_thresholds.json. The
pilot seed differs from every seed used by the tests.

    python3 scripts/pilot_thresholds.py [--out tests/data/pilot_thresholds.json]
"""

import argparse
from pathlib import Path

from recurfrac.asymptotics import Clamped, Power
from recurfrac.experiments import dumps, pilot_fraction_oracle, pilot_thresholds
from recurfrac.gexpr import GAMMA
from recurfrac.ifs import MIDDLE_THIRD

PILOT_SEED = 7_310_417

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "tests/data/pilot_thresholds.json"))
    ap.add_argument("--samples", type=int, default=1000)
    args = ap.parse_args()
    doc = {
        "liminf": pilot_thresholds(MIDDLE_THIRD, PILOT_SEED, args.samples),
        "recurrent_fraction": pilot_fraction_oracle(MIDDLE_THIRD, Clamped(Power(1, GAMMA))),
    }
    Path(args.out).write_text(dumps(doc))
    print(dumps(doc), end="")
