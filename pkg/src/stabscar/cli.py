"""``stabscar`` command line: build models, scan factorizations, verify scars, run spectra.

Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 resource
limit.  Every flag may also be given through ``--config FILE.json`` whose
keys are the flag names with dashes replaced by underscores; explicit
flags win over the file.  The thread count for the numerical libraries
is read from ``STABSCAR_THREADS`` only.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from .errors import ResourceLimitError, StabscarError, StatisticsError
from .factorize import scan_group, verify_annihilator
from .hamiltonian import CouplingScheme, HamiltonianTerms, term_multiset_equal, verify_scar
from .models import MODELS, ModelSpec, build_model, pxp_reduction
from .pauli import DENSE_CAP
from .spectral import (
    FULL_CAP,
    SECTOR_CAP,
    ZERO_TOL,
    FewLevelsWarning,
    ZeroModeWarning,
    level_statistics,
    near_zero_eigenpairs,
    reference_band,
    run_spectrum,
    scar_entropy,
    state_entropies,
    write_histogram_csv,
    write_scatter_csv,
)
from .stabilizer import load_generators, mask_from_sites

SCHEMA_VERSION = 1

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

# model name -> accepted keyword arguments (CLI dest -> constructor keyword)
MODEL_ARGS: dict[str, dict[str, str]] = {
    "cluster": {"n": "n", "theta": "theta", "seed": "seed"},
    "toric": {"nx": "nx", "ny": "ny", "theta": "theta", "theta_w1": "theta_w1", "theta_w2": "theta_w2",
              "seed": "seed", "wilson": "wilson"},
    "atc": {"nx": "nx", "ranges": "ranges", "wilson_terms": "include_wilson_terms", "theta": "theta",
            "theta_w1": "theta_w1", "theta_w2": "theta_w2"},
    "product": {"n": "n", "theta": "theta", "regime": "regime", "seed": "seed"},
    "bell": {"variant": "variant", "n": "n", "theta": "theta", "seed": "seed"},
    "cluster_family": {"variant": "variant", "n": "n", "theta": "theta", "seed": "seed"},
    "rainbow_cluster": {"n": "n", "theta": "theta", "seed": "seed"},
    "antipodal_cluster": {"n": "n", "theta": "theta", "seed": "seed"},
    "pxp": {"n": "n"},
}
_NON_CONFIG = {"command", "config", "save_config", "func"}


class UsageError(StabscarError):
    """Bad flag combination or value detected after parsing."""


# ----------------------------------------------------------------------
# argument handling


def _theta(text: str):
    if text == "random":
        return text
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("theta must be +1, -1 or 'random'") from None
    if v not in (1, -1):
        raise argparse.ArgumentTypeError("theta must be +1 or -1")
    return v


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_model_flags(p: argparse.ArgumentParser, l_is_range: bool = True) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--model", choices=sorted(MODELS), help="registered model name")
    g.add_argument("--n", type=int, help="chain length / qubit count")
    g.add_argument("--nx", type=int, help="lattice extent in x")
    g.add_argument("--ny", type=int, help="lattice extent in y (toric)")
    g.add_argument("--theta", type=_theta, help="uniform generator phase (+1/-1, or 'random')")
    g.add_argument("--theta-w1", type=int, choices=(1, -1), help="first Wilson loop phase")
    g.add_argument("--theta-w2", type=int, choices=(1, -1), help="second Wilson loop phase")
    g.add_argument("--wilson", choices=("row_column", "crossing"), help="toric Wilson loop choice")
    g.add_argument("--variant", help="bell: ladder/rainbow/antipodal; cluster_family: rainbow/antipodal")
    g.add_argument("--regime", choices=("generic", "disordered"), help="product-state coupling regime")
    g.add_argument("--wilson-terms", action="store_true", default=None, help="atc: add Wilson-loop families")
    if l_is_range:
        g.add_argument("--l", dest="ranges", type=_int_list, help="atc interaction ranges, e.g. 1,2")
    g.add_argument("--seed", type=int, help="seed for every random draw (default: the model's own)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stabscar", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file mirroring the flags")
    parser.add_argument("--save-config", help="write the effective configuration to this JSON file")
    sub = parser.add_subparsers(dest="command", required=True)

    f = sub.add_parser("factorize", help="scan a model's stabilizer group for annihilator pairs")
    _add_model_flags(f, l_is_range=False)
    f.add_argument("--l", type=int, default=2, help="locality budget")
    f.add_argument("--b", type=int, default=2, help="body budget")
    f.add_argument("--max-factors", type=int, default=3, help="generators multiplied per candidate element")
    f.add_argument("--format", choices=("text", "json"), default="text")
    f.add_argument("--out", help="write the report to this file")
    f.set_defaults(func=cmd_factorize)

    s = sub.add_parser("spectrum", help="exact diagonalization, entropies and level statistics")
    _add_model_flags(s)
    s.add_argument("--hamiltonian", help="Hamiltonian JSON file instead of the model's")
    s.add_argument("--coupling-range", type=float, nargs=2, metavar=("LO", "HI"),
                   help="draw every coupling uniformly from [LO, HI] with --seed")
    s.add_argument("--sector", help="parity sector 'px,pz', e.g. 1,1")
    s.add_argument("--mask", type=_int_list, help="subsystem sites (default: model's half system)")
    s.add_argument("--zero-tol", type=float, default=ZERO_TOL)
    s.add_argument("--window", type=float, default=0.5, help="central fraction of levels for statistics")
    s.add_argument("--bins", type=int, default=40)
    s.add_argument("--reference", choices=("GOE", "GUE", "Poisson"), help="compare r-bar with this ensemble")
    s.add_argument("--band-samples", type=int, default=100)
    s.add_argument("--sparse", type=int, metavar="K",
                   help="shift-invert for K levels near zero instead of full diagonalization")
    s.add_argument("--emit", default="json,csv", help="comma list of json,csv")
    s.add_argument("--no-plots", action="store_true", default=None, help="skip PNG rendering")
    s.add_argument("--out", default="stabscar-output", help="output directory")
    s.set_defaults(func=cmd_spectrum)

    v = sub.add_parser("verify", help="symbolic and numeric scar verification")
    _add_model_flags(v)
    v.add_argument("--hamiltonian", help="Hamiltonian JSON file to check against the model's state")
    v.add_argument("--generators", help="generator file (one Pauli string per line) defining the state")
    v.add_argument("--tol", type=float, default=1e-10, help="relative numeric residual tolerance")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("build-model", help="write model, Hamiltonian and generator files")
    _add_model_flags(b)
    b.add_argument("--out", default="stabscar-model", help="output directory")
    b.set_defaults(func=cmd_build_model)
    return parser


def _load_config(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def parse_args(argv: list[str] | None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg = _load_config(args.config)
        cfg.pop("command", None)
        sub = parser._subparsers._group_actions[0].choices[args.command]  # noqa: SLF001
        known = {a.dest for a in sub._actions}  # noqa: SLF001
        unknown = sorted(set(cfg) - known)
        if unknown:
            raise UsageError(f"unknown config keys for {args.command}: {unknown}")
        for key in ("ranges", "mask"):
            if isinstance(cfg.get(key), str):
                cfg[key] = _int_list(cfg[key])
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    if args.save_config:
        Path(args.save_config).write_text(json.dumps(effective_config(args), indent=1, sort_keys=True) + "\n")
    return args


def effective_config(args: argparse.Namespace) -> dict:
    """Flag values as a JSON-compatible dict (round-trips through ``--config``)."""
    return {k: v for k, v in vars(args).items() if k not in _NON_CONFIG and v is not None}


def model_from_args(args: argparse.Namespace) -> ModelSpec:
    if not args.model:
        raise UsageError("--model is required")
    kwargs = {}
    for dest, kw in MODEL_ARGS[args.model].items():
        val = getattr(args, dest, None)
        if val is not None:
            kwargs[kw] = val
    for dest in ("n", "nx", "ny", "variant", "regime", "wilson", "ranges", "wilson_terms",
                 "theta_w1", "theta_w2"):
        if getattr(args, dest, None) is not None and dest not in MODEL_ARGS[args.model]:
            raise UsageError(f"--{dest.replace('_', '-')} does not apply to model {args.model}")
    try:
        return build_model(args.model, **kwargs)
    except TypeError as exc:
        raise UsageError(f"bad parameters for {args.model}: {exc}") from exc


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")


# ----------------------------------------------------------------------
# commands


def cmd_factorize(args: argparse.Namespace) -> int:
    spec = model_from_args(args)
    families = {p.key(): p.family for p in spec.pairs}
    pairs = scan_group(spec.group, spec.geometry, args.l, args.b, args.max_factors)
    rows = []
    for p in pairs:
        ok = verify_annihilator(spec.group, p)
        rows.append({"parent": p.parent.to_text(), "p1": p.p1.to_text(), "p2": p.p2.to_text(),
                     "l": p.l_cert, "b": p.b_cert, "family": families.get(p.key(), ""), "certified": ok})
    report = {
        "schema_version": SCHEMA_VERSION, "model": spec.name, "params": spec.to_json()["params"],
        "l": args.l, "b": args.b, "max_factors": args.max_factors,
        "count": len(rows), "all_certified": all(r["certified"] for r in rows), "pairs": rows,
    }
    if args.format == "json":
        text = json.dumps(report, indent=1, sort_keys=True)
    else:
        lines = [f"# {spec.name} l={args.l} b={args.b} max_factors={args.max_factors} count={len(rows)}"]
        if rows:
            w = max(len(r["p1"]) for r in rows)
            lines.append(f"{'parent':<{w + 1}} {'p1':<{w}} {'p2':<{w + 1}} l b {'family':<10} cert")
            for r in rows:
                lines.append(f"{r['parent']:<{w + 1}} {r['p1']:<{w}} {r['p2']:<{w + 1}} {r['l']} {r['b']} "
                             f"{r['family'] or '-':<10} {'ok' if r['certified'] else 'FAIL'}")
        text = "\n".join(lines)
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(f"{len(rows)} pairs written to {args.out}")
    else:
        print(text)
    return EXIT_OK if report["all_certified"] else EXIT_FAIL


def _parse_sector(text):
    if text is None:
        return None
    vals = _int_list(text) if isinstance(text, str) else list(text)
    if len(vals) != 2 or any(v not in (1, -1) for v in vals):
        raise UsageError("--sector expects two parities, e.g. 1,-1")
    return tuple(vals)


def _spectrum_inputs(args):
    spec = model_from_args(args) if args.model else None
    if args.hamiltonian:
        h = HamiltonianTerms.load(args.hamiltonian, n_qubits=args.n if spec is None else spec.n_qubits)
    elif spec is not None:
        scheme = None
        if args.coupling_range:
            scheme = CouplingScheme.uniform(*args.coupling_range, seed=args.seed or 0)
        h = spec.hamiltonian(scheme)
    else:
        raise UsageError("give --model or --hamiltonian")
    if spec is not None and spec.n_qubits != h.n_qubits:
        raise UsageError("Hamiltonian size does not match the model")
    return spec, h


def cmd_spectrum(args: argparse.Namespace) -> int:
    spec, h = _spectrum_inputs(args)
    n = h.n_qubits
    sector = _parse_sector(args.sector)
    emit = {e.strip() for e in args.emit.split(",") if e.strip()}
    if emit - {"json", "csv"}:
        raise UsageError("--emit accepts json and csv")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.mask:
        mask = mask_from_sites(args.mask)
    elif spec is not None:
        mask = spec.default_mask
    else:
        mask = (1 << (n // 2)) - 1
    scar = spec.scar_state() if spec is not None else None
    summary = {
        "schema_version": SCHEMA_VERSION,
        "model": None if spec is None else spec.name,
        "params": None if spec is None else spec.to_json()["params"],
        "n_qubits": n, "n_terms": len(h), "sector": None if sector is None else list(sector),
        "mask": [k for k in range(n) if (mask >> k) & 1], "seed": args.seed, "zero_tol": args.zero_tol,
        "rank_entropy": None if spec is None else spec.rank_entropy(mask),
        "expected_scar_entropy": None if spec is None else spec.expected_scar_entropy,
    }
    files = []
    if args.sparse:
        summary.update(_sparse_summary(h, scar, mask, args))
    else:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            rep = run_spectrum(h, scar, mask, sector, args.zero_tol)
        summary["warnings"] = sorted({str(w.message) for w in caught
                                      if issubclass(w.category, (ZeroModeWarning, FewLevelsWarning))})
        summary["dim"] = rep.dim
        summary["route"] = "dense"
        summary["scar_overlap"] = rep.scar_overlap
        summary["n_near_zero"] = int(len(rep.near_zero(args.zero_tol)))
        summary["scar_entropy"] = None
        scar_idx = None
        if scar is not None and summary["n_near_zero"] and rep.scar_overlap:
            summary["scar_entropy"] = scar_entropy(rep, scar, mask, args.zero_tol)
            scar_idx = int(np.argmax(rep.overlaps_with_scar))
        stats = None
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", FewLevelsWarning)
                stats = level_statistics(rep, args.window, args.bins)
        except StatisticsError as exc:
            summary["degenerate_spectrum"] = True
            summary["statistics_error"] = str(exc)
        else:
            summary["degenerate_spectrum"] = False
        summary["mean_r"] = None if stats is None else stats.mean_r
        summary["n_levels_window"] = None if stats is None else stats.n_levels
        if stats is not None and args.reference:
            band = reference_band(args.reference, rep.dim, args.window, args.band_samples, args.seed or 0)
            summary["reference"] = {"ensemble": band.ensemble, "mean": band.mean, "std": band.std,
                                    "lo": band.lo, "hi": band.hi, "contains": band.contains(stats.mean_r)}
        if "csv" in emit:
            write_scatter_csv(out / "scatter.csv", rep)
            files.append("scatter.csv")
            if stats is not None:
                write_histogram_csv(out / "spacings.csv", stats)
                files.append("spacings.csv")
        if not args.no_plots:
            from .plotting import histogram_png, scatter_png

            title = f"{summary['model'] or 'hamiltonian'} N={n}"
            scatter_png(out / "scatter.png", rep, scar_idx, title)
            files.append("scatter.png")
            if stats is not None:
                histogram_png(out / "spacings.png", stats, title=title)
                files.append("spacings.png")
    if "json" in emit:
        files.append("summary.json")
        summary["files"] = files
        _write_json(out / "summary.json", summary)
    print(json.dumps({k: summary.get(k) for k in ("model", "n_qubits", "scar_overlap", "scar_entropy",
                                                  "mean_r", "degenerate_spectrum")}))
    return EXIT_OK


def _sparse_summary(h: HamiltonianTerms, scar, mask: int, args) -> dict:
    if args.sector:
        raise UsageError("--sparse does not combine with --sector")
    vals, vecs, width = near_zero_eigenpairs(h, k=args.sparse, seed=args.seed or 0)
    idx = np.flatnonzero(np.abs(vals) < args.zero_tol * width)
    out = {"route": "sparse", "dim": 1 << h.n_qubits, "k": args.sparse, "width": width,
           "n_near_zero": int(len(idx)), "near_zero_complete": bool(len(idx) < len(vals)),
           "scar_overlap": None, "scar_entropy": None, "mean_r": None, "degenerate_spectrum": None}
    if scar is not None and len(idx):
        v = vecs[:, idx]
        amps = v.conj().T @ scar
        out["scar_overlap"] = float(np.sum(np.abs(amps) ** 2))
        proj = v @ amps
        if np.linalg.norm(proj) > 0:
            out["scar_entropy"] = float(state_entropies(proj / np.linalg.norm(proj), mask, h.n_qubits)[0])
    return out


def cmd_verify(args: argparse.Namespace) -> int:
    spec = model_from_args(args) if args.model else None
    if args.generators:
        group = load_generators(args.generators)
    elif spec is not None:
        group = spec.group
    else:
        raise UsageError("give --model or --generators for the state")
    if args.hamiltonian:
        h = HamiltonianTerms.load(args.hamiltonian, n_qubits=group.n_qubits)
    elif spec is not None:
        h = spec.hamiltonian()
    else:
        raise UsageError("give --model or --hamiltonian")
    cert = verify_scar(h, group)
    for row in cert.table():
        print(row)
    ok = cert.passed
    print(f"symbolic: {len(cert.entries)} pairs, {len(cert.failures)} failed, "
          f"{len(cert.unverifiable)} terms without provenance")
    if cert.unverifiable:
        print("warning: some terms carry no factorization provenance; relying on the numeric check",
              file=sys.stderr)
    if group.n_qubits <= DENSE_CAP + 2:
        psi = group.state_vector()
        res = float(np.linalg.norm(h.apply(psi)))
        scale = max(h.coupling_norm, 1.0)
        num_ok = res < args.tol * scale
        print(f"numeric: |H psi| = {res:.3e} (tolerance {args.tol * scale:.3e}) {'ok' if num_ok else 'FAIL'}")
        ok = ok and num_ok
    else:
        print(f"numeric: skipped, N = {group.n_qubits} exceeds the state-vector cap", file=sys.stderr)
        if cert.unverifiable:
            ok = False
    if spec is not None and spec.name == "pxp" and not args.hamiltonian:
        same = term_multiset_equal(h, pxp_reduction(spec.n_qubits)[1])
        print(f"identity: pair Hamiltonian equals H_PXP term by term: {same}")
        ok = ok and same
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_build_model(args: argparse.Namespace) -> int:
    spec = model_from_args(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "model.json", spec.to_json())
    spec.hamiltonian().save(out / "hamiltonian.json")
    (out / "generators.txt").write_text("\n".join(spec.group.to_lines()) + "\n")
    print(f"{spec.name}: N={spec.n_qubits}, {len(spec.pairs)} pairs -> {out}")
    return EXIT_OK


# ----------------------------------------------------------------------


def main(argv: list[str] | None = None) -> int:
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(f"stabscar: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse
        return int(exc.code or 0) and EXIT_USAGE
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"stabscar: resource limit: {exc} (dense cap N={FULL_CAP}, sector cap N={SECTOR_CAP})",
              file=sys.stderr)
        return EXIT_RESOURCE
    except (UsageError, StabscarError, ValueError) as exc:
        print(f"stabscar: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
