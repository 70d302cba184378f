"""Command-line front end: ``pauligroup <subcommand> ...``.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
``PAULIGROUP_THREADS`` caps the worker count of multi-input subcommands.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import acceptance
from .circuit import export_qasm
from .fermion import FcidumpError, build_fermionic_hamiltonian, jordan_wigner_transform, parse_fcidump
from .fixtures import FIXTURES, fixture_integrals
from .grouping import (
    FULL,
    NEAR_QWC,
    ClassificationError,
    fit_scaling,
    format_report,
    group_hamiltonian,
    grouping_stats,
    stats_csv,
)
from .pauli import DEFAULT_PRUNE, PauliHamiltonian, PauliParseError, format_hamiltonian, parse_hamiltonian
from .synth import evolve_then_measure, synthesize_group_evolution, synthesize_measurement_circuit
from .synthetic import dense_pattern_hamiltonian

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    input: str = ""
    kind: str = "auto"
    mode: str = FULL
    prune: float = DEFAULT_PRUNE
    steps: int = 1
    time: float = 1.0
    seed: int = 0
    out_dir: Path = Path("out")
    emit: list[str] = field(default_factory=lambda: ["json"])

    def __post_init__(self):
        if self.prune < 0:
            raise InputError("--prune must be >= 0")
        if self.steps < 1:
            raise InputError("--steps must be >= 1")


@dataclass
class LoadedInput:
    name: str
    hamiltonian: PauliHamiltonian
    n_electrons: int | None = None


_SYNTH = re.compile(r"^synthetic(?:_dense)?[:_]N?(\d+)$")
_SYNTH_RANGE = re.compile(r"^synthetic(?:_dense)?_N(\d+)\.\.N(\d+)$")


def expand_inputs(specs: list[str]) -> list[str]:
    """Expand ``synthetic_dense_N8..N20`` into even sizes; other specs pass through."""
    out = []
    for s in specs:
        m = _SYNTH_RANGE.match(s)
        if m:
            lo, hi = int(m.group(1)), int(m.group(2))
            out += [f"synthetic:{n}" for n in range(lo, hi + 1, 2)]
        else:
            out.append(s)
    return out


def load_input(spec: str, kind: str = "auto", prune: float = DEFAULT_PRUNE, seed: int = 0) -> LoadedInput:
    """Resolve a path, a bundled fixture name (``lih`` or ``fixture:lih``) or ``synthetic:N``."""
    m = _SYNTH.match(spec)
    if m:
        n = int(m.group(1))
        return LoadedInput(f"synthetic_dense_N{n}", dense_pattern_hamiltonian(n, seed))
    name = spec.removeprefix("fixture:")
    path = Path(spec)
    if not path.exists() and name in FIXTURES:
        mi = fixture_integrals(name)
        h = jordan_wigner_transform(build_fermionic_hamiltonian(mi), prune)
        return LoadedInput(name, h, mi.n_electrons)
    if not path.exists():
        raise InputError(f"no such input: {spec}")
    text = path.read_text()
    if kind == "auto":
        kind = "fcidump" if path.suffix.lower() == ".fcidump" or "&FCI" in text.upper()[:200] else "pauli-text"
    try:
        if kind == "fcidump":
            mi = parse_fcidump(text)
            h = jordan_wigner_transform(build_fermionic_hamiltonian(mi), prune)
            return LoadedInput(path.stem, h, mi.n_electrons)
        return LoadedInput(path.stem, parse_hamiltonian(text, prune=prune))
    except (FcidumpError, PauliParseError) as exc:
        raise InputError(f"{spec}: {exc}") from exc


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("PAULIGROUP_THREADS", "1")))
    except ValueError:
        return 1


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _config(args) -> RunConfig:
    return RunConfig(
        input=getattr(args, "input", "") or "",
        kind=getattr(args, "kind", "auto"),
        mode=getattr(args, "mode", FULL),
        prune=getattr(args, "prune", DEFAULT_PRUNE),
        steps=getattr(args, "steps", 1),
        time=getattr(args, "time", 1.0),
        seed=args.seed,
        out_dir=Path(args.out_dir),
        emit=getattr(args, "emit", ["json"]),
    )


# ---- subcommands -----------------------------------------------------------------


def cmd_ingest(args) -> int:
    cfg = _config(args)
    inp = load_input(cfg.input, cfg.kind, cfg.prune, cfg.seed)
    h = inp.hamiltonian
    out = _write(cfg.out_dir / f"{inp.name}.pauli", format_hamiltonian(h))
    print(f"{inp.name}: n_qubits={h.n_qubits} terms={len(h)} -> {out}")
    return EXIT_OK


def cmd_group(args) -> int:
    cfg = _config(args)
    inp = load_input(cfg.input, cfg.kind, cfg.prune, cfg.seed)
    g = group_hamiltonian(inp.hamiltonian, cfg.mode)
    rec = grouping_stats(g, inp.name)
    report = _write(cfg.out_dir / f"{inp.name}.{cfg.mode}.groups", format_report(g))
    _write(cfg.out_dir / f"{inp.name}.{cfg.mode}.stats.json", _dump(rec.to_dict()))
    if "csv" in cfg.emit:
        _write(cfg.out_dir / f"{inp.name}.{cfg.mode}.stats.csv", stats_csv([rec]))
    print(
        f"{inp.name}: terms={rec.n_terms} groups={rec.n_groups} bound={rec.bound} "
        f"bound_ok={rec.bound_ok} -> {report}"
    )
    return EXIT_OK


def _group_file(i: int) -> str:
    return f"group_{i:04d}"


def cmd_compile(args) -> int:
    cfg = _config(args)
    inp = load_input(cfg.input, cfg.kind, cfg.prune, cfg.seed)
    g = group_hamiltonian(inp.hamiltonian, cfg.mode)
    base = cfg.out_dir / f"{inp.name}.compile"
    manifest = []
    for i, (label, terms) in enumerate(g.items()):
        if all(p.is_identity for _, p in terms):
            manifest.append({"group": i, "label": str(label), "terms": len(terms), "file": None})
            continue
        c = synthesize_group_evolution(terms, cfg.time, cfg.steps, label, g.n_qubits)
        stem = _group_file(i)
        if "qasm" in cfg.emit:
            _write(base / f"{stem}.qasm", export_qasm(c))
        if "json" in cfg.emit:
            _write(base / f"{stem}.json", c.to_json() + "\n")
        manifest.append(
            {
                "group": i,
                "label": str(label),
                "terms": len(terms),
                "file": stem,
                "qubits": c.n_qubits,
                "depth": c.depth(),
                "cnot_depth": c.depth(("CNOT",)),
                "gates": len(c),
            }
        )
    _write(base / "manifest.json", _dump({"input": inp.name, "time": cfg.time, "steps": cfg.steps, "groups": manifest}))
    print(f"{inp.name}: compiled {len(manifest)} groups -> {base}")
    return EXIT_OK


def cmd_measure_plan(args) -> int:
    cfg = _config(args)
    inp = load_input(cfg.input, cfg.kind, cfg.prune, cfg.seed)
    g = group_hamiltonian(inp.hamiltonian, cfg.mode)
    base = cfg.out_dir / f"{inp.name}.measure"
    plans = []
    for i, label in enumerate(g.groups):
        ops = g.operators(label)
        if args.fuse_time is not None:
            c, mapping = evolve_then_measure(label, g.terms(label), args.fuse_time, cfg.steps, fuse=True)
        else:
            c, mapping = synthesize_measurement_circuit(label, ops, g.n_qubits)
        stem = _group_file(i)
        if "qasm" in cfg.emit:
            _write(base / f"{stem}.qasm", export_qasm(c))
        plans.append(
            {
                "group": i,
                "label": str(label),
                "file": stem,
                "observables": [
                    {"term": idx, "pauli": str(p), "z_string": str(z), "sign": s}
                    for idx, p, (z, s) in zip(g.groups[label], ops, mapping)
                ],
            }
        )
    _write(base / "plan.json", _dump({"input": inp.name, "mode": cfg.mode, "groups": plans}))
    print(f"{inp.name}: {len(plans)} measurement settings -> {base}")
    return EXIT_OK


def _print_results(results) -> bool:
    ok = True
    for r in results:
        print(r.line())
        ok &= r.passed
    return ok


def cmd_verify(args) -> int:
    cfg = _config(args)
    if args.acceptance:
        name = "acceptance"
        results = acceptance.run_all(cfg.seed)
    elif cfg.input:
        inp = load_input(cfg.input, cfg.kind, cfg.prune, cfg.seed)
        name = inp.name
        results = acceptance.verify_hamiltonian(inp.hamiltonian, inp.n_electrons, cfg.seed)
    else:
        print("verify: give --input or --acceptance", file=sys.stderr)
        return EXIT_USAGE
    ok = _print_results(results)
    path = _write(
        cfg.out_dir / f"{name}.verify.json",
        _dump({"input": name, "ok": ok, "checks": [r.to_dict() for r in results]}),
    )
    if not ok:
        print(f"verification failed; report: {path}", file=sys.stderr)
        return EXIT_FAIL
    print(f"all checks passed; report: {path}")
    return EXIT_OK


def cmd_stats(args) -> int:
    cfg = _config(args)
    specs = expand_inputs(args.inputs)
    inputs = [load_input(s, "auto", cfg.prune, cfg.seed) for s in specs]

    def one(inp: LoadedInput):
        return grouping_stats(group_hamiltonian(inp.hamiltonian, cfg.mode), inp.name)

    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        records = list(pool.map(one, inputs))
    fit = fit_scaling(records) if args.fit else None
    text = stats_csv(records, fit)
    if args.out:
        _write(Path(args.out), text)
    sys.stdout.write(text)
    return EXIT_OK if all(r.bound_ok for r in records) else EXIT_FAIL


def cmd_bench(args) -> int:
    cfg = _config(args)
    inp = load_input(cfg.input, cfg.kind, cfg.prune, cfg.seed)
    h = inp.hamiltonian
    best = float("inf")
    for _ in range(args.repeat):
        t0 = time.perf_counter()
        group_hamiltonian(h, cfg.mode)
        best = min(best, time.perf_counter() - t0)
    rate = len(h) / best if best > 0 else float("inf")
    print(json.dumps({"input": inp.name, "terms": len(h), "seconds": best, "terms_per_second": rate}))
    return EXIT_OK


# ---- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pauligroup", description="Commuting-group compiler for molecular Hamiltonians")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="FCIDUMP, Pauli text file, fixture name or synthetic:N")
            p.add_argument("--kind", choices=["auto", "fcidump", "pauli-text"], default="auto")
        p.add_argument("--mode", choices=[FULL, NEAR_QWC], default=FULL)
        p.add_argument("--prune", type=float, default=DEFAULT_PRUNE)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out-dir", default="out")
        return p

    common(sub.add_parser("ingest", help="map an FCIDUMP to a Pauli Hamiltonian")).set_defaults(func=cmd_ingest)

    p = common(sub.add_parser("group", help="group terms and write the report"))
    p.add_argument("--emit", nargs="+", choices=["json", "csv"], default=["json"])
    p.set_defaults(func=cmd_group)

    p = common(sub.add_parser("compile", help="per-group evolution circuits"))
    p.add_argument("--time", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--emit", nargs="+", choices=["qasm", "json"], default=["qasm"])
    p.set_defaults(func=cmd_compile)

    p = common(sub.add_parser("measure-plan", help="per-group measurement circuits and estimator maps"))
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--fuse-time", type=float, default=None, help="prepend the group's evolution and drop the W^dag W pair")
    p.add_argument("--emit", nargs="+", choices=["qasm"], default=["qasm"])
    p.set_defaults(func=cmd_measure_plan)

    p = sub.add_parser("verify", help="run the oracle checks")
    p.add_argument("--input")
    p.add_argument("--kind", choices=["auto", "fcidump", "pauli-text"], default="auto")
    p.add_argument("--acceptance", action="store_true", help="run every acceptance criterion")
    p.add_argument("--prune", type=float, default=DEFAULT_PRUNE)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default="out")
    p.set_defaults(func=cmd_verify)

    p = common(sub.add_parser("stats", help="group counts and scaling fit over many inputs"), needs_input=False)
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--fit", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = common(sub.add_parser("bench", help="time grouping throughput"))
    p.add_argument("--repeat", type=int, default=5)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (InputError, ClassificationError, ValueError) as exc:
        print(f"pauligroup {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
