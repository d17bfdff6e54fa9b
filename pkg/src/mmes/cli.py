"""Command-line front end.

Exit codes: 0 on success, 2 when flags fail validation, 1 when a run fails.
Every command that consumes randomness logs its resolved seed to stderr so
the run can be replayed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .bipartitions import Bipartition
from .canonical import (CanonicalConfig, EnergySamples, cumulants,
                        effective_samples, mean_energy_scan, metropolis_chain,
                        reweight)
from .entanglement import potential, purity, purity_profile
from .errors import DomainError, FormatError, MmesError
from .search import AnnealSchedule, anneal, certify
from .state import (PureState, _check_n, _from_json, deserialize, haar_sample,
                    load_state, serialize)
from .theory import Histogram, asymptotic_kappa2, balanced_typical_mean, balanced_typical_variance

log = logging.getLogger("mmes")


def _resolve_seed(args) -> int:
    seed = getattr(args, "seed", None)
    if seed is None:
        seed = int.from_bytes(os.urandom(8), "little") >> 1
    return int(seed)


def _emit_text(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj, out: str | None) -> None:
    _emit_text(json.dumps(obj, indent=2) + "\n", out)


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([x if isinstance(x, str)
                         else repr(x.item() if isinstance(x, np.generic) else x)
                         for x in row])
    return buf.getvalue()


def _parse_partition(text: str, n: int) -> Bipartition:
    t = text.strip().lower()
    try:
        if t.startswith("mask:"):
            mask = int(t[5:], 0)
        elif t.startswith(("0b", "0x")):
            mask = int(t, 0)
        else:
            qubits = [int(p) for p in t.split(",")]
            if len(set(qubits)) != len(qubits):
                raise DomainError(f"duplicate qubits in partition {text!r}")
            for q in qubits:
                if not 0 <= q < n:
                    raise DomainError(f"qubit {q} out of range for n={n}")
            mask = sum(1 << q for q in qubits)
    except ValueError as exc:
        raise DomainError(f"cannot parse partition {text!r}: {exc}") from exc
    return Bipartition(n, mask)


def _parse_betas(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",")]
    except ValueError as exc:
        raise DomainError(f"cannot parse beta list {text!r}: {exc}") from exc


def _read_energy_csv(path: str) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FormatError(f"{path} is empty")
    start = 0
    try:
        float(rows[0][-1])
    except (ValueError, IndexError):
        start = 1  # header row
    try:
        values = np.array([float(r[-1]) for r in rows[start:] if r], dtype=np.float64)
    except (ValueError, IndexError) as exc:
        raise FormatError(f"cannot parse energies from {path}: {exc}") from exc
    if values.size == 0:
        raise FormatError(f"{path} holds no samples")
    return values


def _samples_from_csv(path: str, n: int, beta: float) -> EnergySamples:
    values = _read_energy_csv(path)
    return EnergySamples(beta=beta, n=n, seed=0, energies=values[np.newaxis, :],
                         acceptance_rates=(float("nan"),), step_sizes=(float("nan"),))


def _chain_config(args, seed: int, beta: float) -> CanonicalConfig:
    return CanonicalConfig(beta=beta, steps=args.steps, burn_in=args.burn_in,
                           thin=args.thin, seed=seed, chains=args.chains)


def _state_payload(state: PureState) -> dict:
    return json.loads(serialize(state, "json").decode("ascii"))


# ---------------------------------------------------------------- handlers

def _cmd_haar_sample(args):
    n = _check_n(args.n)
    seed = _resolve_seed(args)
    if args.format not in ("json", "binary"):
        raise DomainError(f"haar-sample writes json or binary, not {args.format!r}")

    def run():
        log.info("haar-sample n=%d seed=%d", n, seed)
        state = haar_sample(n, seed)
        data = serialize(state, args.format)
        if args.out:
            Path(args.out).write_bytes(data)
        elif args.format == "json":
            sys.stdout.write(data.decode("ascii") + "\n")
        else:
            sys.stdout.buffer.write(data)
    return run


def _cmd_purity(args):
    if args.partition is None:
        raise DomainError("purity needs --partition")

    def run():
        state = load_state(args.infile)
        b = _parse_partition(args.partition, state.n)
        _emit_json(purity(state, b), args.out)
    return run


def _cmd_profile(args):
    if args.format not in ("json", "csv"):
        raise DomainError(f"profile writes json or csv, not {args.format!r}")

    def run():
        prof = purity_profile(load_state(args.infile))
        if args.format == "csv":
            _emit_text(_csv_text(["mask", "purity"],
                                 zip(prof.masks, prof.purities)), args.out)
        else:
            _emit_json({"n": prof.n, "masks": list(prof.masks),
                        "purities": [float(p) for p in prof.purities],
                        "mean": prof.mean, "std": prof.std,
                        "min": prof.min, "max": prof.max}, args.out)
    return run


def _cmd_potential(args):
    def run():
        _emit_json(potential(load_state(args.infile)), args.out)
    return run


def _cmd_canonical(args):
    n = _check_n(args.n)
    seed = _resolve_seed(args)
    cfg = _chain_config(args, seed, args.beta)
    if args.format not in ("json", "csv"):
        raise DomainError(f"canonical writes json or csv, not {args.format!r}")

    def run():
        log.info("canonical n=%d beta=%s seed=%d", n, args.beta, seed)
        samples = metropolis_chain(n, cfg)
        if args.format == "csv":
            _emit_text(samples.to_csv_text(), args.out)
        else:
            _emit_json(samples.summary(), args.out)
    return run


def _cmd_beta_scan(args):
    n = _check_n(args.n)
    seed = _resolve_seed(args)
    betas = _parse_betas(args.betas)
    cfg = _chain_config(args, seed, 0.0)
    if args.format not in ("json", "csv"):
        raise DomainError(f"beta-scan writes json or csv, not {args.format!r}")

    def run():
        log.info("beta-scan n=%d betas=%s seed=%d", n, betas, seed)
        rows = mean_energy_scan(n, betas, cfg)
        if args.format == "json":
            _emit_json([{"beta": r.beta, "mean": r.mean, "std_error": r.std_error,
                         "ess": r.ess, "acceptance": r.acceptance} for r in rows],
                       args.out)
        else:
            _emit_text(_csv_text(["beta", "mean", "std_error"],
                                 ((r.beta, r.mean, r.std_error) for r in rows)),
                       args.out)
    return run


def _cmd_reweight(args):
    seed = _resolve_seed(args)
    beta0 = args.beta_start if args.beta_start is not None else 0.0
    if args.bins < 1:
        raise DomainError(f"bins must be positive, got {args.bins}")
    n = _check_n(args.n)
    cfg = None if args.infile else _chain_config(args, seed, beta0)

    def run():
        if args.infile:
            samples = _samples_from_csv(args.infile, n, beta0)
        else:
            log.info("reweight source chain n=%d beta=%s seed=%d", n, beta0, seed)
            samples = metropolis_chain(n, cfg)
        result = reweight(samples, args.beta, bins=args.bins)
        _emit_json({"beta_source": result.beta_source, "beta": result.beta,
                    "mean": result.mean, "std_error": result.std_error,
                    "ess": result.ess,
                    "histogram": {"edges": [float(e) for e in result.histogram.edges],
                                  "density": [float(w) for w in result.histogram.weights]}},
                   args.out)
    return run


def _cmd_cumulants(args):
    seed = _resolve_seed(args)
    n = _check_n(args.n)
    beta = args.beta if args.beta is not None else 0.0
    cfg = None if args.infile else _chain_config(args, seed, beta)

    def run():
        if args.infile:
            samples = _samples_from_csv(args.infile, n, beta)
        else:
            log.info("cumulants chain n=%d beta=%s seed=%d", n, beta, seed)
            samples = metropolis_chain(n, cfg)
        max_order = 4 if effective_samples(samples) >= 10000.0 else 2
        estimates = cumulants(samples, max_order)
        _emit_json([{"order": e.order, "value": e.value, "std_error": e.std_error}
                    for e in estimates], args.out)
    return run


def _cmd_anneal(args):
    n = _check_n(args.n)
    seed = _resolve_seed(args)
    direction = {"min": "minimize", "max": "maximize"}[args.direction]
    schedule = AnnealSchedule(beta_start=args.beta_start if args.beta_start is not None else 1.0,
                              beta_end=args.beta_end, levels=args.levels,
                              sweeps_per_level=args.sweeps, restarts=args.restarts,
                              seed=seed)
    if args.format not in ("json", "binary"):
        raise DomainError(f"anneal saves the state as json or binary, not {args.format!r}")

    def run():
        log.info("anneal n=%d direction=%s seed=%d", n, direction, seed)
        result = anneal(n, schedule, direction)
        report = {
            "n": n, "direction": direction, "seed": seed,
            "energy": result.energy, "gap": result.gap,
            "spread": result.profile.max - result.profile.min,
            "purity_mean": result.profile.mean, "purity_std": result.profile.std,
            "masks": list(result.profile.masks),
            "purities": [float(p) for p in result.profile.purities],
            "best_restart": result.best_restart, "best_sweep": result.best_sweep,
            "grad_norm": result.grad_norm,
            "polish_iterations": result.polish_iterations,
            "state": _state_payload(result.state),
        }
        _emit_json(report, args.out)
        if args.out:
            base, _ = os.path.splitext(args.out)
            side = base + (".state.json" if args.format == "json" else ".state.bin")
            Path(side).write_bytes(serialize(result.state, args.format))
    return run


def _cmd_certify(args):
    def run():
        data = Path(args.infile).read_bytes()
        state = None
        if data[:4] != b"MMES":
            try:
                doc = json.loads(data.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise FormatError(f"unrecognized certify input: {exc}") from exc
            if isinstance(doc, dict) and "state" in doc:
                state = _from_json(doc["state"])
        if state is None:
            state = deserialize(data)
        report = certify(state)
        _emit_json({"n": report.n, "energy": report.energy, "gap": report.gap,
                    "spread": report.spread, "grad_norm": report.grad_norm,
                    "perfect": report.perfect, "masks": list(report.masks),
                    "purities": [float(p) for p in report.purities]}, args.out)
    return run


def _cmd_theory(args):
    n = _check_n(args.n)

    def run():
        mu = balanced_typical_mean(n)
        kappa2 = asymptotic_kappa2(n)
        doc = {"n": n, "n_a": n // 2, "n_abar": n - n // 2,
               "mu": mu, "sigma2": balanced_typical_variance(n),
               "kappa2_asymptotic": kappa2, "beta_star": mu / kappa2}
        if args.beta is not None:
            doc["beta"] = args.beta
            doc["predicted_mean"] = mu - args.beta * kappa2
        _emit_json(doc, args.out)
    return run


def _cmd_hist(args):
    if args.bins < 1:
        raise DomainError(f"bins must be positive, got {args.bins}")
    if args.format not in ("json", "csv"):
        raise DomainError(f"hist writes json or csv, not {args.format!r}")

    def run():
        values = _read_energy_csv(args.infile)
        hist = Histogram.from_samples(values, bins=args.bins)
        if args.format == "json":
            _emit_json({"edges": [float(e) for e in hist.edges],
                        "density": [float(w) for w in hist.weights],
                        "n_samples": hist.n_samples}, args.out)
        else:
            _emit_text(_csv_text(["center", "density"], hist.plot_rows()), args.out)
    return run


_HANDLERS = {
    "haar-sample": _cmd_haar_sample,
    "purity": _cmd_purity,
    "profile": _cmd_profile,
    "potential": _cmd_potential,
    "canonical": _cmd_canonical,
    "beta-scan": _cmd_beta_scan,
    "reweight": _cmd_reweight,
    "cumulants": _cmd_cumulants,
    "anneal": _cmd_anneal,
    "certify": _cmd_certify,
    "theory": _cmd_theory,
    "hist": _cmd_hist,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmes",
                                     description="Multipartite entanglement toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, *, needs_n=False, chain=False, infile=False,
            out_formats=None):
        p = sub.add_parser(name, help=help_text)
        if needs_n:
            p.add_argument("--n", type=int, required=True, help="qubit count")
        if infile:
            p.add_argument("--in", dest="infile", required=True, help="input file")
        if chain:
            p.add_argument("--steps", type=int, default=20000)
            p.add_argument("--burn-in", dest="burn_in", type=int, default=2000)
            p.add_argument("--thin", type=int, default=1)
            p.add_argument("--chains", type=int, default=1)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="output path (default stdout)")
        if out_formats:
            p.add_argument("--format", choices=out_formats, default=out_formats[0])
        return p

    add("haar-sample", "draw a Haar-random state", needs_n=True,
        out_formats=["json", "binary"])

    p = add("purity", "purity of one bipartition of a stored state", infile=True)
    p.add_argument("--partition", required=True,
                   help="comma-separated qubits (e.g. 0,2) or mask:<int>")

    add("profile", "purity of every balanced bipartition", infile=True,
        out_formats=["json", "csv"])
    add("potential", "entanglement potential of a stored state", infile=True)

    p = add("canonical", "Metropolis chain at fixed beta", needs_n=True, chain=True,
            out_formats=["json", "csv"])
    p.add_argument("--beta", type=float, required=True)

    p = add("beta-scan", "mean potential over a list of betas", needs_n=True,
            chain=True, out_formats=["csv", "json"])
    p.add_argument("--betas", required=True, help="comma-separated list")

    p = add("reweight", "importance-reweight samples to another beta",
            needs_n=True, chain=True)
    p.add_argument("--beta", type=float, required=True, help="target beta")
    p.add_argument("--beta-start", dest="beta_start", type=float, default=None,
                   help="beta of the source samples (default 0)")
    p.add_argument("--in", dest="infile", default=None,
                   help="CSV of source samples; omitted: run a source chain")
    p.add_argument("--bins", type=int, default=100)

    p = add("cumulants", "cumulants of the potential along a chain",
            needs_n=True, chain=True)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--in", dest="infile", default=None, help="CSV of samples")

    p = add("anneal", "search extremal entanglement by simulated annealing",
            needs_n=True, out_formats=["json", "binary"])
    p.add_argument("--direction", choices=["min", "max"], default="min")
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--beta-start", dest="beta_start", type=float, default=None)
    p.add_argument("--beta-end", dest="beta_end", type=float, default=1e5)
    p.add_argument("--levels", type=int, default=60)
    p.add_argument("--sweeps", type=int, default=2000)

    add("certify", "audit a stored state or anneal report", infile=True)

    p = add("theory", "closed-form reference values", needs_n=True)
    p.add_argument("--beta", type=float, default=None)

    p = add("hist", "bin a CSV of samples into plot data", infile=True,
            out_formats=["csv", "json"])
    p.add_argument("--bins", type=int, default=100)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="mmes: %(message)s")
    try:
        run = _HANDLERS[args.command](args)
    except MmesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        run()
    except (MmesError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
