"""Command-line entry point: ``tcountopt <command> ...``.

Exit codes: 0 success, 2 input error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path
from typing import List, Optional

from .circuit import Circuit, QasmError, parse_qasm
from .compiler import CompileError, compile_circuit
from .decomposition import Decomposition, InvalidDecompositionError
from .game import DemoParams, synthetic_demo
from .resynth import verify
from .search.mcts import SearchConfig
from .search.optimizer import optimize
from .search.oracle import OracleBoundsError, min_waring_rank
from .tensor import SignatureTensor

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VERIFY = 3


class InputError(Exception):
    pass


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _read_json(path: str):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg})") from None


def _load_tensor(path: str) -> SignatureTensor:
    try:
        return SignatureTensor.from_dict(_read_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: not a tensor file ({exc})") from None


def _load_decomposition(path: str) -> Decomposition:
    try:
        return Decomposition.from_dict(_read_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: not a decomposition file ({exc})") from None


def _load_circuit(path: str) -> Circuit:
    try:
        return parse_qasm(_read_text(path))
    except QasmError as exc:
        raise InputError(f"{path}: {exc}") from None


def _write(path: Optional[str], text: str) -> None:
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def _search_config(args) -> SearchConfig:
    return SearchConfig(
        simulations=args.simulations,
        samples_per_expansion=args.samples,
        max_moves=args.max_moves,
        gadgets_enabled=args.gadgets,
        toffoli_favoring=args.toffoli_favoring,
        games=args.games,
        basis_changes=args.basis_changes,
        seed=args.seed,
    )


# -- commands ------------------------------------------------------------------


def cmd_compile(args) -> int:
    c = _load_circuit(args.qasm)
    targets = compile_circuit(c, args.threshold, args.trials, args.seed)
    out_dir = Path(args.out or ".")
    stem = Path(args.qasm).stem
    parts = []
    for i, t in enumerate(targets):
        tensor_path = out_dir / f"{stem}.part{i}.tensor.json"
        baseline_path = out_dir / f"{stem}.part{i}.baseline.json"
        _write(str(tensor_path), t.tensor.to_json() + "\n")
        _write(str(baseline_path), Decomposition(t.n, t.factor_matrix).to_json() + "\n")
        parts.append({
            "tensor": str(tensor_path),
            "baseline": str(baseline_path),
            "n": t.n,
            "initial_r": t.initial_r,
            "ancillas": t.ancilla_count,
        })
        print(f"part {i}: qubits {len(t.qubit_map)} -> {t.n} ({t.ancilla_count} ancillas), initial R = {t.initial_r}")
    manifest = {"parts": parts, "source": Path(args.qasm).name}
    _write(str(out_dir / f"{stem}.manifest.json"), json.dumps(manifest, indent=2) + "\n")
    print(f"{Path(args.qasm).name}: {c.num_qubits} qubits, {len(parts)} part(s)")
    return EXIT_OK


def cmd_optimize(args) -> int:
    target = _load_tensor(args.tensor)
    baseline = None
    if args.baseline:
        base = _load_decomposition(args.baseline)
        if base.n != target.n:
            raise InputError(f"baseline has n={base.n} but the tensor has n={target.n}")
        baseline = base.factors
    result = optimize(target, _search_config(args), baseline=baseline, workers=args.workers)
    d = result.decomposition
    _write(args.out, d.to_json() + "\n")
    report = result.report()
    _write(args.report, json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(f"cost: {report['cost']} (equivalent T-count {report['equivalent_t']})")
    return EXIT_OK


def cmd_verify(args) -> int:
    target = _load_tensor(args.tensor)
    d = _load_decomposition(args.decomposition)
    report = verify(target, d)
    print(json.dumps(report.to_dict(), sort_keys=True))
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_oracle(args) -> int:
    target = _load_tensor(args.tensor)
    try:
        result = min_waring_rank(target, args.max_rank)
    except OracleBoundsError as exc:
        raise InputError(str(exc)) from None
    if result.proven:
        print(f"rank = {result.rank}, proven")
        _write(args.out, result.decomposition.to_json() + "\n")
    else:
        print(f"no decomposition with rank <= {args.max_rank}")
    return EXIT_OK


def cmd_demo(args) -> int:
    params = DemoParams(n=args.n)
    batch = []
    for i in range(args.count):
        t, d = synthetic_demo(f"{args.seed}:{i}", params)
        batch.append({"tensor": t.to_dict(), "decomposition": d.to_dict()})
    text = json.dumps(batch, sort_keys=True)
    if args.out:
        _write(args.out, text + "\n")
        print(f"wrote {len(batch)} demonstrations to {args.out}")
    else:
        print(text)
    return EXIT_OK


def _corpus_files(path: Optional[str]) -> List[Path]:
    if path:
        p = Path(path)
        if not p.is_dir():
            raise InputError(f"{path} is not a directory")
        return sorted(p.glob("*.qasm"))
    root = resources.files("tcountopt") / "corpus"
    return sorted(Path(str(f)) for f in root.iterdir() if f.name.endswith(".qasm"))


def bench_rows(files: List[Path], config: SearchConfig, threshold: float, trials: int, workers: int) -> List[dict]:
    rows = []
    for f in files:
        c = _load_circuit(str(f))
        targets = compile_circuit(c, threshold, trials, config.seed)
        plain = SearchConfig(**{**config.__dict__, "gadgets_enabled": False, "toffoli_favoring": False})
        gadget = SearchConfig(**{**config.__dict__, "gadgets_enabled": True, "toffoli_favoring": True})
        t_plain = 0
        tof = cs = t = 0
        for tg in targets:
            r1 = optimize(tg.tensor, plain, baseline=tg.factor_matrix, workers=workers)
            t_plain += r1.decomposition.cost().equivalent_t
            c2 = optimize(tg.tensor, gadget, baseline=tg.factor_matrix, workers=workers).decomposition.cost()
            tof, cs, t = tof + c2.toffoli, cs + c2.cs, t + c2.t
        rows.append({
            "name": f.stem,
            "qubits": c.num_qubits,
            "compiled": max((tg.n for tg in targets), default=0),
            "initial_r": sum(tg.initial_r for tg in targets),
            "t_no_gadgets": t_plain,
            "with_gadgets": f"{tof}Tof + {cs}CS + {t}T",
            "equivalent_t": t + 2 * tof + 2 * cs,
        })
    return rows


def cmd_bench(args) -> int:
    files = _corpus_files(args.corpus)
    rows = bench_rows(files, _search_config(args), args.threshold, args.trials, args.workers)
    header = f"{'circuit':<16} {'qubits':>6} {'compiled':>8} {'R':>5} {'T (no gadgets)':>15}  with gadgets"
    print(header)
    for r in rows:
        print(
            f"{r['name']:<16} {r['qubits']:>6} {r['compiled']:>8} {r['initial_r']:>5} "
            f"{r['t_no_gadgets']:>15}  {r['with_gadgets']} ({r['equivalent_t']})"
        )
    _write(args.out, json.dumps(rows, indent=2) + "\n")
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--games", type=int, default=8)
    p.add_argument("--simulations", type=int, default=800)
    p.add_argument("--samples", type=int, default=32, help="actions sampled per expansion")
    p.add_argument("--max-moves", type=int, default=250)
    p.add_argument("--basis-changes", type=int, default=1000, help="size of the basis-change pool")
    p.add_argument("--gadgets", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--toffoli-favoring", action=argparse.BooleanOptionalAction, default=False)
    p.add_argument("--workers", type=int, default=1, help="parallel games (TCOUNTOPT_WORKERS overrides)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tcountopt", description="T-count optimization via tensor decomposition")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile a QASM circuit into signature tensors")
    p.add_argument("qasm")
    p.add_argument("--out", help="output directory (default: current directory)")
    p.add_argument("--threshold", type=int, default=60)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("optimize", help="search for a cheap decomposition of a tensor")
    p.add_argument("tensor")
    p.add_argument("--baseline", help="decomposition JSON admitted as a starting candidate")
    p.add_argument("--out", help="write the best decomposition here")
    p.add_argument("--report", help="write the run report here")
    _add_search_flags(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("verify", help="check a decomposition against a tensor")
    p.add_argument("tensor")
    p.add_argument("decomposition")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exact minimum rank by exhaustive search")
    p.add_argument("tensor")
    p.add_argument("--max-rank", type=int, default=10)
    p.add_argument("--out", help="write the witness decomposition here")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("demo", help="generate synthetic demonstrations")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=6, help="tensor dimension")
    p.add_argument("--out")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("bench", help="compile and optimize every circuit in a corpus")
    p.add_argument("corpus", nargs="?", help="directory of .qasm files (default: bundled corpus)")
    p.add_argument("--threshold", type=int, default=60)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--out", help="write the table as JSON here")
    _add_search_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, CompileError, InvalidDecompositionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
