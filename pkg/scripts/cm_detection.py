"""Control-mode pass rate with and without an intercept-resend attacker, per protocol.

Sweeps the number of checked rounds so the shrinking standard error is visible.

    python3 scripts/cm_detection.py --seed 3
"""

import argparse
import math

from qdleak.adversary import InterceptResend
from qdleak.protocols import ProtocolKind, simulate_cm


def pass_rate(kind, rounds, seed, eve):
    checked = [r.cm_pass for r in simulate_cm(kind, rounds, seed, eve) if r.cm_pass is not None]
    p = sum(checked) / len(checked)
    return p, math.sqrt(p * (1 - p) / len(checked)), len(checked)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 1000, 10_000])
    args = ap.parse_args()

    print(f"{'protocol':<14}{'rounds':>8}{'checked':>9}{'clean':>8}{'attacked':>10}{'std err':>9}")
    for kind in ProtocolKind:
        for n in args.sizes:
            clean, _, _ = pass_rate(kind, n, args.seed, None)
            hit, se, checked = pass_rate(kind, n, args.seed, InterceptResend())
            print(f"{kind.value:<14}{n:>8}{checked:>9}{clean:>8.4f}{hit:>10.4f}{se:>9.4f}")
    print("expected under attack: 0.75")


if __name__ == "__main__":
    main()
