"""Run message mode, then distill keys both ways and show whether the parties agree.

    python3 scripts/distill_demo.py --protocol epr-qd --rounds 64 --eve passive
"""

import argparse

import numpy as np

from qdleak.adversary import EveModel, make_eve
from qdleak.distill import (
    distill_structural,
    distill_toeplitz,
    keys_from_records,
    random_hash_seed,
    recommend_output_length,
)
from qdleak.protocols import ProtocolKind, simulate_mm


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--protocol", type=ProtocolKind, default=ProtocolKind.EPR_QD)
    ap.add_argument("--rounds", type=int, default=64)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--eve", type=EveModel, default=EveModel.PASSIVE)
    ap.add_argument("--margin-bits", type=int, default=0)
    args = ap.parse_args()

    records = list(simulate_mm(args.protocol, args.rounds, args.seed, make_eve(args.eve)))
    alice, bob = keys_from_records(args.protocol, records)
    print(f"raw material: {len(alice)} bits, parties agree on raw: {alice == bob}")

    sa, sb = distill_structural(alice), distill_structural(bob)
    print(f"structural:  {sa.output_len:>4} bits  agree={sa.bits == sb.bits}  {sa.hex}")

    m = recommend_output_length(args.protocol, args.rounds, args.margin_bits)
    if m == 0:
        print("toeplitz:    nothing left after the leak and margin")
        return
    seed = random_hash_seed(len(alice), m, np.random.default_rng(args.seed))
    ta, tb = distill_toeplitz(alice, seed, m), distill_toeplitz(bob, seed, m)
    print(f"toeplitz:    {ta.output_len:>4} bits  agree={ta.bits == tb.bits}  {ta.hex}")


if __name__ == "__main__":
    main()
