"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 I/O error. Output never contains
timestamps or host details, so identical flags and seed give identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import distill as dist
from .adversary import (
    CLAIMED_BITS,
    VIOLATION_TOL,
    EveModel,
    LeakageReport,
    known_xor,
    leakage_exact,
    leakage_from_records,
    leakage_monte_carlo,
    make_eve,
    signal_ensemble,
)
from .infotheory import DensityMatrix, Ensemble, holevo_chi, vn_entropy
from .protocols import (
    TABLE_I,
    ProtocolKind,
    estimate_fidelity,
    simulate_cm,
    simulate_mm,
    truth_table,
)
from .rng import MASK64, aux_rng, default_seed

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 2, 3
COMMANDS = ("analyze", "simulate", "table", "cm", "distill", "holevo")
TRANSCRIPT_COLUMNS = [
    "round", "mode", "alice_msg", "bob_msg", "announcement",
    "alice_decoded", "bob_decoded", "eve_known_relation",
]  # fmt: skip
SMALL_SAMPLE = 100

_NUMBER = {"type": "number"}
_LEAK_FIELDS = {
    "h_prior_bits": _NUMBER,
    "h_posterior_bits": _NUMBER,
    "i_abe_bits": _NUMBER,
    "holevo_chi_bits": _NUMBER,
    "claimed_bits_per_run": _NUMBER,
    "holevo_violation": {"type": "boolean"},
}
ANALYZE_SCHEMA = {
    "type": "object",
    "required": ["protocol", "exact", "monte_carlo"],
    "properties": {
        "protocol": {"enum": [k.value for k in ProtocolKind]},
        "exact": {
            "type": "object",
            "required": [*_LEAK_FIELDS, "posterior"],
            "properties": {**_LEAK_FIELDS, "posterior": {"type": "object"}},
            "additionalProperties": False,
        },
        "monte_carlo": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "required": [*_LEAK_FIELDS, "rounds", "seed"],
                    "properties": {
                        **_LEAK_FIELDS,
                        "rounds": {"type": "integer", "minimum": 1},
                        "seed": {"type": "integer", "minimum": 0},
                    },
                    "additionalProperties": False,
                },
            ]
        },
        "i_abe_delta_bits": {"type": ["number", "null"]},
    },
    "additionalProperties": False,
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    protocol: ProtocolKind = ProtocolKind.EPR_QD
    rounds: int = 10000
    seed: int = 0
    eve: EveModel = EveModel.PASSIVE
    format: str = "text"
    out: Path | None = None
    margin_bits: int = 0
    threshold: float = 0.9
    ensemble: Path | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.rounds < 0:
            raise UsageError("--rounds must be non-negative")
        if self.rounds == 0 and self.command not in ("analyze", "table", "holevo"):
            raise UsageError(f"{self.command} needs --rounds >= 1")
        if self.margin_bits < 0:
            raise UsageError("--margin-bits must be non-negative")
        if not 0.0 <= self.threshold <= 1.0:
            raise UsageError("--threshold must lie in [0, 1]")
        if self.command == "table" and self.protocol is not ProtocolKind.EPR_QD:
            raise UsageError("table is only defined for --protocol epr-qd")


def num(x: float) -> float:
    """Round to 12 significant digits for stable serialization."""
    return float(f"{x:.12g}")


def fmt(x: float) -> str:
    return f"{x:.12g}"


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _dump_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# -- analyze -----------------------------------------------------------------


def _leak_fields(r: LeakageReport) -> dict:
    return {
        "h_prior_bits": num(r.h_prior_bits),
        "h_posterior_bits": num(r.h_posterior_bits),
        "i_abe_bits": num(r.i_abe_bits),
        "holevo_chi_bits": num(r.holevo_chi_bits),
        "claimed_bits_per_run": num(r.claimed_bits_per_run),
        "holevo_violation": r.holevo_violation,
    }


def analyze_payload(cfg: RunConfig) -> dict:
    exact = leakage_exact(cfg.protocol)
    mc = None
    if cfg.rounds > 0:
        mc = leakage_monte_carlo(cfg.protocol, cfg.rounds, cfg.seed)
    posterior = {
        ann: {k: num(p) for k, p in row.items()}
        for ann, row in exact.posterior.to_json().items()
    }
    return {
        "protocol": cfg.protocol.value,
        "exact": {**_leak_fields(exact), "posterior": posterior},
        "monte_carlo": None
        if mc is None
        else {**_leak_fields(mc), "rounds": mc.rounds, "seed": mc.seed},
        "i_abe_delta_bits": None if mc is None else num(mc.i_abe_bits - exact.i_abe_bits),
    }


def cmd_analyze(cfg: RunConfig) -> str:
    data = analyze_payload(cfg)
    if cfg.format == "json":
        return _dump_json(data)
    fields = list(_LEAK_FIELDS)
    mc = data["monte_carlo"]
    if cfg.format == "csv":
        rows = [[f, data["exact"][f], "" if mc is None else mc[f]] for f in fields]
        return _dump_csv(["field", "exact", "monte_carlo"], rows)
    ex = data["exact"]
    lines = [
        f"protocol: {data['protocol']}",
        f"prior entropy        {fmt(ex['h_prior_bits'])} bits",
        f"posterior entropy    {fmt(ex['h_posterior_bits'])} bits",
        f"Eve's gain I(AB:E)   {fmt(ex['i_abe_bits'])} bits "
        f"({fmt(ex['i_abe_bits'] / ex['h_prior_bits'] * 100)}% of the secret)",
        f"Holevo chi           {fmt(ex['holevo_chi_bits'])} bits",
        f"claimed rate         {fmt(ex['claimed_bits_per_run'])} bits/run",
        f"Holevo violation     {'yes' if ex['holevo_violation'] else 'no'}",
        "posterior P(alice,bob | announcement):",
    ]
    for ann, row in ex["posterior"].items():
        cells = " ".join(f"{k}:{fmt(p)}" for k, p in row.items())
        lines.append(f"  {ann:<6} {cells}")
    if mc is not None:
        lines.append(
            f"monte carlo ({mc['rounds']} rounds, seed {mc['seed']}): "
            f"I(AB:E) = {fmt(mc['i_abe_bits'])} bits, "
            f"delta {fmt(data['i_abe_delta_bits'])}"
        )
    return "\n".join(lines) + "\n"


# -- table -------------------------------------------------------------------


def cmd_table(cfg: RunConfig) -> str:
    table = truth_table()
    diff = [
        (a, b, TABLE_I[(a, b)].value, o.value)
        for (a, b), o in sorted(table.as_dict().items())
        if TABLE_I[(a, b)] is not o
    ]
    rows = [(a.bits, b.bits, o.value) for a, b, o in table.rows]
    if cfg.format == "csv":
        return _dump_csv(["alice_op", "bob_op", "outcome"], rows)
    if cfg.format == "json":
        return _dump_json(
            {
                "rows": [{"alice_op": a, "bob_op": b, "outcome": o} for a, b, o in rows],
                "mismatches": [list(d) for d in diff],
            }
        )
    lines = [f"σ{a.bits}^A σ{b.bits}^B → {o}" for a, b, o in table.rows]
    lines.append(f"differences from the published table: {len(diff) or 'none'}")
    return "\n".join(lines) + "\n"


# -- simulate ----------------------------------------------------------------


def simulate_payload(cfg: RunConfig):
    eve = make_eve(cfg.eve)
    records = list(simulate_mm(cfg.protocol, cfg.rounds, cfg.seed, eve))
    rows = []
    relation_ok = 0
    for i, rec in enumerate(records):
        ann = rec.announcements[0]
        rel = known_xor(cfg.protocol, ann)
        actual = "".join(
            str(int(x) ^ int(y)) for x, y in zip(rec.input.alice_msg, rec.input.bob_msg)
        )
        relation_ok += rel == actual
        rows.append(
            [i, rec.input.mode.value, rec.input.alice_msg, rec.input.bob_msg,
             ann.label(), rec.alice_decoded, rec.bob_decoded, f"xor={rel}"]
        )  # fmt: skip
    emp = leakage_from_records(cfg.protocol, records, seed=cfg.seed)
    summary = {
        "protocol": cfg.protocol.value,
        "rounds": cfg.rounds,
        "seed": cfg.seed,
        "eve": cfg.eve.value,
        "decode_accuracy": num(sum(r.decoded_ok for r in records) / len(records)),
        "eve_relation_accuracy": num(relation_ok / len(records)),
        "i_abe_empirical_bits": num(emp.i_abe_bits),
        "i_abe_exact_bits": num(leakage_exact(cfg.protocol).i_abe_bits),
    }
    return rows, summary


def _summary_text(summary: dict) -> str:
    return "".join(f"{k}: {v}\n" for k, v in summary.items() if v is not None)


def cmd_simulate(cfg: RunConfig) -> str:
    rows, summary = simulate_payload(cfg)
    if cfg.format == "csv":
        sys.stderr.write(_summary_text(summary))
        return _dump_csv(TRANSCRIPT_COLUMNS, rows)
    if cfg.format == "json":
        return _dump_json(
            {"summary": summary, "transcript": [dict(zip(TRANSCRIPT_COLUMNS, r)) for r in rows]}
        )
    return _summary_text(summary)


# -- cm ----------------------------------------------------------------------


def cm_payload(cfg: RunConfig) -> dict:
    records = list(simulate_cm(cfg.protocol, cfg.rounds, cfg.seed, make_eve(cfg.eve)))
    checked = sum(r.cm_pass is not None for r in records)
    rate = estimate_fidelity(records) if checked else None
    stderr = None if rate is None else math.sqrt(rate * (1 - rate) / checked)
    return {
        "protocol": cfg.protocol.value,
        "eve": cfg.eve.value,
        "rounds": cfg.rounds,
        "seed": cfg.seed,
        "checked_rounds": checked,
        "pass_rate": None if rate is None else num(rate),
        "std_error": None if stderr is None else num(stderr),
        "threshold": num(cfg.threshold),
        "abort": True if rate is None else rate < cfg.threshold,
        "warning": "few checked rounds; estimate has wide uncertainty"
        if checked < SMALL_SAMPLE
        else None,
    }


def cmd_cm(cfg: RunConfig) -> str:
    data = cm_payload(cfg)
    if data["warning"]:
        sys.stderr.write(f"warning: {data['warning']}\n")
    if cfg.format == "json":
        return _dump_json(data)
    if cfg.format == "csv":
        return _dump_csv(list(data), [["" if v is None else v for v in data.values()]])
    return _summary_text(data)


# -- distill -----------------------------------------------------------------


def distill_payload(cfg: RunConfig) -> dict:
    kind = cfg.protocol
    records = list(simulate_mm(kind, cfg.rounds, cfg.seed, make_eve(cfg.eve)))
    alice_raw, bob_raw = dist.keys_from_records(kind, records)
    s_alice = dist.distill_structural(alice_raw)
    s_bob = dist.distill_structural(bob_raw)

    out_len = dist.recommend_output_length(kind, cfg.rounds, cfg.margin_bits)
    hash_seed = ""
    if out_len > 0:
        hash_seed = dist.random_hash_seed(len(alice_raw), out_len, aux_rng(cfg.seed, "toeplitz"))
    t_alice = dist.distill_toeplitz(alice_raw, hash_seed, out_len)
    t_bob = dist.distill_toeplitz(bob_raw, hash_seed, out_len)
    return {
        "protocol": kind.value,
        "rounds": cfg.rounds,
        "seed": cfg.seed,
        "eve": cfg.eve.value,
        "raw_bits": len(alice_raw),
        "structural": {
            "output_len": s_alice.output_len,
            "key_hex": s_alice.hex,
            "parties_agree": s_alice.bits == s_bob.bits,
        },
        "toeplitz": {
            "output_len": t_alice.output_len,
            "margin_bits": cfg.margin_bits,
            "hash_seed_len": len(hash_seed),
            "hash_seed_hex": dist.bits_to_hex(hash_seed),
            "key_hex": t_alice.hex,
            "parties_agree": t_alice.bits == t_bob.bits,
        },
    }


def cmd_distill(cfg: RunConfig) -> str:
    data = distill_payload(cfg)
    if data["toeplitz"]["output_len"] == 0:
        sys.stderr.write("warning: recommended Toeplitz output length is zero; key is empty\n")
    if cfg.format == "json":
        return _dump_json(data)
    rows = [
        [m, data[m]["output_len"], data[m]["key_hex"], data[m]["parties_agree"]]
        for m in ("structural", "toeplitz")
    ]
    if cfg.format == "csv":
        return _dump_csv(["method", "output_len", "key_hex", "parties_agree"], rows)
    lines = [f"{data['protocol']}: {data['rounds']} rounds, {data['raw_bits']} raw bits"]
    for m, n, key, ok in rows:
        lines.append(f"{m:<10} {n:>6} bits  agree={ok}  {key}")
    return "\n".join(lines) + "\n"


# -- holevo ------------------------------------------------------------------


def _complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    re, im = v
    return complex(re, im)


def load_ensemble(path: Path) -> Ensemble:
    """Read an ensemble from JSON.

    ``{"members": [{"p": 0.5, "state": [[re, im], ...]},
                   {"p": 0.5, "density": [[[re, im], ...], ...]}]}``
    Plain numbers are accepted wherever a complex pair is.
    """
    data = json.loads(path.read_text(encoding="utf-8"))
    members = []
    for m in data["members"]:
        if "state" in m:
            amps = np.array([_complex(v) for v in m["state"]])
            rho = DensityMatrix.pure(amps / np.linalg.norm(amps))
        else:
            rho = DensityMatrix([[_complex(v) for v in row] for row in m["density"]])
        members.append((float(m["p"]), rho))
    return Ensemble(tuple(members))


def holevo_payload(cfg: RunConfig) -> dict:
    if cfg.ensemble is not None:
        try:
            ens = load_ensemble(cfg.ensemble)
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"bad ensemble file: {exc}") from exc
        source = str(cfg.ensemble)
    else:
        ens = signal_ensemble(cfg.protocol)
        source = "protocol"
    chi = holevo_chi(ens)
    claimed = CLAIMED_BITS[cfg.protocol]
    return {
        "protocol": cfg.protocol.value,
        "ensemble": source,
        "members": [
            {"p": num(p), "dim": rho.dim, "entropy_bits": num(vn_entropy(rho))}
            for p, rho in ens.members
        ],
        "holevo_chi_bits": num(chi),
        "claimed_bits_per_run": num(claimed),
        "holevo_violation": claimed > chi + VIOLATION_TOL,
    }


def cmd_holevo(cfg: RunConfig) -> str:
    data = holevo_payload(cfg)
    if cfg.format == "json":
        return _dump_json(data)
    keys = ["protocol", "ensemble", "holevo_chi_bits", "claimed_bits_per_run", "holevo_violation"]
    if cfg.format == "csv":
        return _dump_csv(keys, [[data[k] for k in keys]])
    lines = [f"protocol: {data['protocol']}  ensemble: {data['ensemble']}"]
    for m in data["members"]:
        lines.append(f"  p={fmt(m['p'])}  dim={m['dim']}  S={fmt(m['entropy_bits'])}")
    lines.append(f"Holevo chi: {fmt(data['holevo_chi_bits'])} bits")
    lines.append(f"claimed:    {fmt(data['claimed_bits_per_run'])} bits/run")
    verdict = "VIOLATES the Holevo bound" if data["holevo_violation"] else "within the Holevo bound"
    lines.append(f"verdict:    {verdict}")
    return "\n".join(lines) + "\n"


HANDLERS = {
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "table": cmd_table,
    "cm": cmd_cm,
    "distill": cmd_distill,
    "holevo": cmd_holevo,
}


# -- argument parsing --------------------------------------------------------


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}")
    if value < 0 or value > MASK64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--protocol", choices=[k.value for k in ProtocolKind], default="epr-qd")
    common.add_argument("--rounds", type=int, default=10000)
    common.add_argument("--seed", type=_seed, default=None, help="default: $QDL_SEED or 0")
    common.add_argument("--eve", choices=[e.value for e in EveModel], default="passive")
    common.add_argument("--format", choices=["json", "csv", "text"], default="text")
    common.add_argument("--out", type=Path, default=None)
    common.add_argument("--margin-bits", type=int, default=0)
    common.add_argument("--threshold", type=float, default=0.9)

    parser = argparse.ArgumentParser(
        prog="qdleak", description="Quantum dialogue leakage analysis and simulation."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="exact and sampled leakage to a listener")
    sub.add_parser("simulate", parents=[common], help="message-mode rounds and transcript")
    sub.add_parser("table", parents=[common], help="regenerate the encoding truth table")
    sub.add_parser("cm", parents=[common], help="control-mode fidelity check")
    sub.add_parser("distill", parents=[common], help="privacy amplification of the raw output")
    hol = sub.add_parser("holevo", parents=[common], help="Holevo quantity vs claimed rate")
    hol.add_argument("--ensemble", type=Path, default=None, help="JSON ensemble file")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command,
        protocol=ProtocolKind(ns.protocol),
        rounds=ns.rounds,
        seed=default_seed() if ns.seed is None else ns.seed,
        eve=EveModel(ns.eve),
        format=ns.format,
        out=ns.out,
        margin_bits=ns.margin_bits,
        threshold=ns.threshold,
        ensemble=getattr(ns, "ensemble", None),
    )


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)  # exits with 2 on bad flags
    try:
        cfg = config_from_args(ns)
        text = HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"qdleak: error: {exc}\n")
        return EXIT_USAGE
    except ValueError as exc:
        sys.stderr.write(f"qdleak: error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"qdleak: I/O error: {exc}\n")
        return EXIT_IO
    try:
        if cfg.out is None:
            sys.stdout.write(text)
        else:
            with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    except OSError as exc:
        sys.stderr.write(f"qdleak: I/O error: {exc}\n")
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
