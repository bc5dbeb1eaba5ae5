"""Experiment driver: subcommands, deterministic traces, reports, verification.

Subcommands: learn, minimize, adversary-pp, adversary-par, diagonalize,
count, verify-trace.  Identical config and seed produce byte-identical JSONL
traces; the process exits 0 only when every runtime certification passed.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import presets
from .adversary_parallel import ParWorld
from .adversary_parallel import config_from_dict as par_config
from .adversary_pp import PPWorld
from .adversary_pp import config_from_dict as pp_config
from .approxcount import Verdict, exact_count, gap_decide
from .circuits import (
    TruthTable,
    circuit_from_text,
    circuit_to_text,
    class_index,
    table_from_hex,
    table_to_hex,
    truth_table,
)
from .diagonalizer import build_hard_language, verify_hardness
from .errors import ConfigError, OracleLabError
from .learner import (
    LearnInstance,
    learn_adaptive,
    learn_nplog,
    learn_parallel,
    minimize_blackbox,
)
from .tracing import dump_record, parse_frac, read_trace, write_trace

SEED_ENV = "ORACLELAB_SEED"


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


def _parse_fraction(text: str) -> Fraction:
    num, _, den = text.partition("/")
    return Fraction(int(num), int(den) if den else 1)


def _rounds_bound(n: int, s: int, theta: Fraction) -> int:
    size = class_index(n, s).class_size(s)
    bound = 0
    shrink = Fraction(1)
    while shrink * size > 1:
        shrink *= 1 - theta
        bound += 1
    return bound


def _ledger_dict(ledger) -> dict:
    return ledger.as_dict()


# ---------------------------------------------------------------------------
# learn


def _load_target(args) -> TruthTable:
    spec = args.f
    path = Path(spec)
    if path.exists():
        return truth_table(circuit_from_text(path.read_text()))
    try:
        return table_from_hex(args.n, spec)
    except (ValueError, OracleLabError) as exc:
        raise ConfigError(f"--f is neither a circuit file nor a hex table: {exc}")


def _learn_one(mode: str, table: TruthTable, s: int, theta: Fraction, seed: int) -> dict:
    inst = LearnInstance.from_table(table, s, theta)
    if mode == "parallel":
        out = learn_parallel(inst)
    elif mode == "nplog":
        out = learn_nplog(inst)
    elif mode == "adaptive":
        out = learn_adaptive(inst, rng=random.Random(seed))
    else:
        raise ConfigError(f"unknown mode {mode!r}")
    exact = truth_table(out.circuit) == table
    record = {
        "record": "instance",
        "f": table_to_hex(table), "n": table.n, "s": s, "mode": mode,
        "circuit": circuit_to_text(out.circuit).strip().split("\n"),
        "size": out.circuit.size,
        "ratio": None if out.ratio is None else f"{out.ratio.numerator}/{out.ratio.denominator}",
        "exact": bool(exact),
        "ledger": _ledger_dict(out.ledger),
        "retries": out.retries,
    }
    if mode == "adaptive":
        record["rounds_bound"] = _rounds_bound(table.n, s, theta)
    if out.advice is not None:
        record["advice"] = out.advice
        record["query_total"] = out.ledger.queries
    return record


def cmd_learn(args) -> int:
    theta = _parse_fraction(args.theta)
    records = [{
        "record": "header", "kind": "learn", "mode": args.mode,
        "theta": f"{theta.numerator}/{theta.denominator}", "seed": args.seed,
        "preset": args.preset,
    }]
    started = time.perf_counter()
    if args.preset == "n2-sweep":
        idx = class_index(2, 4)
        for mask in range(16):
            table = TruthTable.from_mask(2, mask)
            s = idx.min_size_for_mask(mask)
            records.append(_learn_one(args.mode, table, s, theta, args.seed))
    elif args.preset:
        raise ConfigError(f"unknown preset {args.preset!r}")
    else:
        if args.n is None or args.s is None or args.f is None:
            raise ConfigError("learn needs --preset or all of --n/--s/--f")
        table = _load_target(args)
        records.append(_learn_one(args.mode, table, args.s, theta, args.seed))
    instances = [r for r in records if r.get("record") == "instance"]
    ok = all(r["exact"] for r in instances)
    records.append({"record": "summary", "instances": len(instances), "all_exact": ok})
    if args.json:
        write_trace(args.json, records)
    if args.csv:
        _write_learn_csv(args.csv, instances)
    wall = time.perf_counter() - started
    for r in instances:
        print(f"f={r['f']} s={r['s']} size={r['size']} exact={r['exact']} "
              f"batches={r['ledger']['batches']} queries={r['ledger']['queries']}")
    print(f"{len(instances)} instance(s), all_exact={ok}, wall={wall:.2f}s")
    return 0 if ok else 1


def _write_learn_csv(path: str, instances: list[dict]) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["f", "n", "s", "mode", "size", "ratio", "exact",
                         "batches", "queries", "f_probes", "retries"])
        for r in instances:
            writer.writerow([r["f"], r["n"], r["s"], r["mode"], r["size"],
                             r["ratio"] or "", str(r["exact"]).lower(),
                             r["ledger"]["batches"], r["ledger"]["queries"],
                             r["ledger"]["f_probes"], r["retries"]])


def cmd_minimize(args) -> int:
    circuit = circuit_from_text(Path(args.circuit).read_text())
    out = minimize_blackbox(circuit, mode=args.mode, rng=random.Random(args.seed))
    table = truth_table(circuit)
    exact = truth_table(out.circuit) == table
    records = [
        {"record": "header", "kind": "minimize", "mode": args.mode, "seed": args.seed},
        {
            "record": "instance", "f": table_to_hex(table), "n": circuit.n,
            "input_size": circuit.size, "size": out.circuit.size,
            "circuit": circuit_to_text(out.circuit).strip().split("\n"),
            "exact": bool(exact), "ledger": _ledger_dict(out.ledger),
            "mode": args.mode,
        },
        {"record": "summary", "instances": 1, "all_exact": bool(exact)},
    ]
    if args.json:
        write_trace(args.json, records)
    print(f"input size {circuit.size} -> output size {out.circuit.size}, exact={exact}")
    return 0 if exact else 1


# ---------------------------------------------------------------------------
# adversaries


def _load_config(args, preset_book: dict) -> dict:
    if args.config:
        return json.loads(Path(args.config).read_text())
    if args.preset:
        if args.preset not in preset_book:
            raise ConfigError(
                f"unknown preset {args.preset!r}; have {sorted(preset_book)}")
        return dict(preset_book[args.preset])
    raise ConfigError("need --config or --preset")


def cmd_adversary_pp(args) -> int:
    raw = _load_config(args, presets.PP_PRESETS)
    if args.mode:
        raw["mode"] = args.mode
    cfg, machines = pp_config(raw)
    world = PPWorld(cfg, machines)
    result = world.run_construction()
    if args.trace:
        write_trace(args.trace, result.trace)
    print(f"halted={result.halted} advice_row={result.advice_row} "
          f"doublings={result.doublings} mode={cfg.mode}")
    return 0 if result.halted else 1


def cmd_adversary_par(args) -> int:
    raw = _load_config(args, presets.PAR_PRESETS)
    cfg, machines = par_config(raw)
    world = ParWorld(cfg, machines)
    result = world.run_construction()
    if args.trace:
        write_trace(args.trace, result.trace)
    print(f"halted={result.halted} advice_row={result.advice_row} steps={result.steps}")
    return 0 if result.halted else 1


def cmd_diagonalize(args) -> int:
    hard = build_hard_language(args.n, args.s)
    hardness = verify_hardness(hard)
    records = [
        {"record": "header", "kind": "diagonalize", "n": args.n, "s": args.s},
        {
            "record": "result", "bits": list(hard.bits),
            "survivor_counts": list(hard.survivor_counts),
            "N": hard.N, "hardness_verified": int(hardness),
        },
        {"record": "summary", "halted": True, "hard": bool(hardness)},
    ]
    if args.json:
        write_trace(args.json, records)
    print(f"N={hard.N} bits={''.join(map(str, hard.bits))} "
          f"survivors={list(hard.survivor_counts)} verified={bool(hardness)}")
    return 0 if hardness else 1


def cmd_count(args) -> int:
    delta = _parse_fraction(args.delta)
    rng = random.Random(args.seed)
    low_size = (2 * args.threshold) // 3
    high_size = -(-3 * args.threshold // 4)
    records = [{
        "record": "header", "kind": "count", "m": args.m,
        "threshold": args.threshold, "trials": args.trials,
        "delta": f"{delta.numerator}/{delta.denominator}", "seed": args.seed,
        "low_size": low_size, "high_size": high_size,
    }]
    errors = 0
    for trial in range(args.trials):
        for side, size in (("LOW", low_size), ("HIGH", high_size)):
            points = set(rng.sample(range(1 << args.m), size))

            def member(bits, pts=points):
                v = 0
                for b in bits:
                    v = (v << 1) | b
                return v in pts

            verdict = gap_decide(member, args.m, args.threshold, delta, rng,
                                 hash_draws=args.hash_draws, reps=args.reps)
            hit = verdict.verdict.value == side
            errors += 0 if hit else 1
            records.append({
                "record": "trial", "trial": trial, "truth": side,
                "planted": size, "exact": exact_count(member, args.m),
                "verdict": verdict.verdict.value, "correct": bool(hit),
            })
    rate_ok = errors <= delta * (2 * args.trials)
    records.append({"record": "summary", "errors": errors,
                    "trials": 2 * args.trials, "within_delta": bool(rate_ok)})
    if args.json:
        write_trace(args.json, records)
    print(f"{errors} errors over {2 * args.trials} decisions (delta={delta})")
    return 0 if rate_ok else 1


# ---------------------------------------------------------------------------
# verify-trace


def _fail(msg: str) -> None:
    raise OracleLabError(msg)


def _verify_pp(records: list[dict], header: dict) -> int:
    doubles = 0
    for rec in records:
        if rec.get("record") != "iteration":
            continue
        if rec["action"] == "double":
            doubles += 1
            q_before, q_after = parse_frac(rec["q_before"]), parse_frac(rec["q_after"])
            if q_after < 2 * q_before:
                _fail(f"iteration {rec['iter']}: Q ratio below 2")
            if not rec.get("certified"):
                _fail(f"iteration {rec['iter']}: uncertified doubling")
        elif rec["action"] == "halt":
            if rec["row_cells"] != rec["machine_outputs"]:
                _fail("condition (C) rows disagree at halt")
            if "xor_parity_ok" in rec and not rec["xor_parity_ok"]:
                _fail("XOR parity identity failed")
        elif rec["action"] == "stalled":
            _fail("trace records a stalled run")
    if doubles > header["doubling_bound"] + 1:
        _fail(f"{doubles} doublings exceed bound {header['doubling_bound']} + 1")
    summary = records[-1]
    if not summary.get("halted"):
        _fail("run did not halt")
    if summary.get("advice_bits") != header.get("rho"):
        _fail("advice size is not the configured row width")
    return doubles


def _verify_par(records: list[dict], header: dict) -> int:
    steps = 0
    for rec in records:
        if rec.get("record") != "iteration":
            continue
        if rec["action"] == "w-step":
            steps += 1
            values = [parse_frac(v) for v in rec["w_values"]]
            ex_k = sum(values, Fraction(0)) / len(values)
            if ex_k != parse_frac(rec["ex_k"]):
                _fail(f"iteration {rec['iter']}: EX_k mismatch")
            slack = Fraction(rec["d"] * rec["q_max"], rec["n_prime"])
            rhs = parse_frac(rec["w_before"]) * (1 - slack) + Fraction(1, 6) - slack
            if rhs != parse_frac(rec["bound_rhs"]):
                _fail(f"iteration {rec['iter']}: bound mismatch")
            if ex_k < rhs:
                _fail(f"iteration {rec['iter']}: mean-progress inequality fails")
            if max(values) != parse_frac(rec["w_after"]):
                _fail(f"iteration {rec['iter']}: committed W is not the argmax")
            if parse_frac(rec["w_after"]) < ex_k:
                _fail(f"iteration {rec['iter']}: argmax below mean")
            if parse_frac(rec["w_after"]) > parse_frac(header["w_max"]):
                _fail("W exceeds its finite bound")
        elif rec["action"] == "halt":
            for entry in rec["promise"]:
                if not entry["ok"]:
                    _fail(f"promise column {entry['col']} has wrong advice cell")
        elif rec["action"] == "stalled":
            _fail("trace records a stalled run")
    if not records[-1].get("halted"):
        _fail("run did not halt")
    return steps


def _verify_learn(records: list[dict], header: dict) -> int:
    count = 0
    for rec in records:
        if rec.get("record") != "instance":
            continue
        count += 1
        if not rec["exact"]:
            _fail(f"instance {rec['f']}: output not exact")
        mode = rec["mode"]
        if mode in ("parallel",) and rec["ledger"]["batches"] != 1:
            _fail(f"instance {rec['f']}: parallel mode used "
                  f"{rec['ledger']['batches']} batches")
        if mode == "adaptive" and rec["ledger"]["batches"] > rec["rounds_bound"]:
            _fail(f"instance {rec['f']}: adaptive rounds exceed the halving bound")
        if mode == "nplog":
            total = rec["query_total"]
            if rec["advice"] > total:
                _fail("advice exceeds query count")
            if rec["advice"].bit_length() > (total + 1).bit_length():
                _fail("advice bit-length above the counting bound")
    if not records[-1].get("all_exact"):
        _fail("summary reports inexact instances")
    return count


def _verify_diag(records: list[dict], header: dict) -> int:
    result = next(r for r in records if r.get("record") == "result")
    counts = result["survivor_counts"]
    for before, after in zip(counts, counts[1:]):
        if after > before // 2:
            _fail(f"survivor halving fails: {before} -> {after}")
    if counts[-1] != 0:
        _fail("class not empty at the end")
    if len(result["bits"]) != result["N"]:
        _fail("bit count differs from N")
    if not result["hardness_verified"]:
        _fail("hardness verification failed")
    return len(counts) - 1


def _verify_count(records: list[dict], header: dict) -> int:
    trials = [r for r in records if r.get("record") == "trial"]
    errors = sum(0 if t["correct"] else 1 for t in trials)
    delta = parse_frac(header["delta"])
    if trials and Fraction(errors, len(trials)) > delta:
        _fail(f"empirical error {errors}/{len(trials)} above delta")
    return len(trials)


def cmd_verify_trace(args) -> int:
    failures = 0
    for path in args.trace:
        records = read_trace(path)
        header = next((r for r in records if r.get("record") == "header"), None)
        if header is None:
            print(f"{path}: FAIL (no header)")
            failures += 1
            continue
        kind = header.get("kind")
        try:
            if kind == "adversary-pp":
                n = _verify_pp(records, header)
                detail = f"{n} doubling(s)"
            elif kind == "adversary-par":
                n = _verify_par(records, header)
                detail = f"{n} W step(s)"
            elif kind in ("learn", "minimize"):
                n = _verify_learn(records, header)
                detail = f"{n} instance(s)"
            elif kind == "diagonalize":
                n = _verify_diag(records, header)
                detail = f"{n} halving step(s)"
            elif kind == "count":
                n = _verify_count(records, header)
                detail = f"{n} trial(s)"
            else:
                raise OracleLabError(f"unknown trace kind {kind!r}")
            print(f"{path}: OK ({kind}, {detail})")
        except OracleLabError as exc:
            print(f"{path}: FAIL ({exc})")
            failures += 1
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oraclelab",
        description="Exact circuit learning and adversarial oracle constructions")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="run a learner on a target function")
    p.add_argument("--mode", choices=["adaptive", "parallel", "nplog"],
                   default="parallel")
    p.add_argument("--n", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--f", help="hex truth table or circuit file path")
    p.add_argument("--theta", default="1/3")
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--preset", choices=["n2-sweep"])
    p.add_argument("--json")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("minimize", help="black-box minimize a circuit file")
    p.add_argument("--mode", choices=["adaptive", "parallel"], default="parallel")
    p.add_argument("--circuit", required=True)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--json")
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("adversary-pp", help="threshold-machine oracle construction")
    p.add_argument("--config")
    p.add_argument("--preset", choices=sorted(presets.PP_PRESETS))
    p.add_argument("--mode", choices=["plain", "timestamp", "xor"])
    p.add_argument("--trace")
    p.set_defaults(func=cmd_adversary_pp)

    p = sub.add_parser("adversary-par", help="parallel-NP-machine oracle construction")
    p.add_argument("--config")
    p.add_argument("--preset", choices=sorted(presets.PAR_PRESETS))
    p.add_argument("--trace")
    p.set_defaults(func=cmd_adversary_par)

    p = sub.add_parser("diagonalize", help="majority-halving hard language")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--json")
    p.set_defaults(func=cmd_diagonalize)

    p = sub.add_parser("count", help="planted gap-counting trials")
    p.add_argument("--m", type=int, default=10)
    p.add_argument("--threshold", type=int, default=3)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--delta", default="1/10")
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--hash-draws", type=int, default=4, dest="hash_draws")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--json")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("verify-trace", help="re-check certified claims in traces")
    p.add_argument("--trace", nargs="+", required=True)
    p.set_defaults(func=cmd_verify_trace)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OracleLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
