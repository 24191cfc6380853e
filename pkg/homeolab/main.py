"""
homeolab command-line front end.

Classifies interval maps and circle lifts, decides conjugacy, builds
canonical representatives, runs seeded sampling experiments and computes
exact spectra. Every command prints one compact JSON document on stdout
(or CSV with --csv where it applies); logs go to stderr.

Exit codes: 0 success, 2 input error, 3 piece-count ceiling reached,
4 undetermined verdict under --strict.
"""

import json
import logging
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Any, Iterator, Optional

import jsonschema
import pandas as pd
import typer
from rich.console import Console
from rich.logging import RichHandler

from homeolab.config import (
    DEFAULT_BITS,
    DEFAULT_N_ITER,
    DEFAULT_Q_MAX,
    DEFAULT_SEED,
    DEFAULT_WORKERS,
    LOG_LEVEL,
    init_config,
)
from homeolab.core.circle_dynamics import (
    RationalRotation,
    classify_circle,
    conjugate_decision_circle,
    emit_lift,
    orbit_collapse,
    representative_circle,
    rotation_number,
)
from homeolab.core.errors import (
    HomeolabError,
    InvariantViolation,
    MapFormatError,
    PayloadReadError,
    PieceCeilingExceeded,
    PreconditionError,
)
from homeolab.core.interval_dynamics import certificate_json, classify, conjugate_decision, representative
from homeolab.core.loader import PayloadLoader
from homeolab.core.pl_core import Letter, emit_map, format_rat, parse_rat
from homeolab.core.random_lab import UNDETERMINED, ExperimentReport, ExperimentRunner, SamplerConfig
from homeolab.core.report_store import ReportStore, trials_frame
from homeolab.core.spectral import (
    bochner_coeff,
    conjugate_decision_unitary,
    is_uniform_support,
    rotate,
    spectral_data,
)
from homeolab.schemas import validate_document

EXIT_INPUT = 2
EXIT_CEILING = 3
EXIT_UNDETERMINED = 4

app = typer.Typer(
    name="homeolab",
    help="Exact piecewise-linear dynamics on the interval and the circle.",
    add_completion=False,
    no_args_is_help=True,
)

logger = logging.getLogger("homeolab")


class Kind(str, Enum):
    INTERVAL = "interval"
    CIRCLE = "circle"


class Sign(str, Enum):
    POS = "+"
    NEG = "-"


def setup_logging(verbose: bool) -> None:
    """Send logs to stderr through Rich so stdout stays machine-readable."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else LOG_LEVEL,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
    )


def _print(document: Any, schema: str) -> None:
    """Validate against the shipped schema, then print compact JSON."""
    validate_document(schema, document)
    typer.echo(json.dumps(document, separators=(",", ":")))


def _fail(kind: str, detail: str, code: int, violation: Optional[str] = None) -> None:
    error = {"error": kind, "detail": detail}
    if violation:
        error["violation"] = violation
    _print(error, "error")
    raise typer.Exit(code)


@contextmanager
def guard() -> Iterator[None]:
    """Turn library exceptions into the error document and exit code."""
    try:
        yield
    except PayloadReadError as e:
        _fail("io", str(e), EXIT_INPUT)
    except MapFormatError as e:
        _fail("format", str(e), EXIT_INPUT)
    except InvariantViolation as e:
        _fail("invariant", e.detail, EXIT_INPUT, e.violation)
    except PreconditionError as e:
        _fail("precondition", str(e), EXIT_INPUT)
    except PieceCeilingExceeded as e:
        _fail("ceiling", str(e), EXIT_CEILING)
    except HomeolabError as e:
        logger.error(f"Internal error: {e}")
        _fail("internal", str(e), 1)
    except jsonschema.ValidationError as e:
        logger.error(f"Output failed its schema: {e.message}")
        _fail("internal", e.message, 1)


def _undetermined(strict: bool) -> None:
    if strict:
        raise typer.Exit(EXIT_UNDETERMINED)


def _save(report: ExperimentReport, out: Optional[Path]) -> None:
    if out is None:
        return
    store = ReportStore(reports_dir=out / "reports", trials_dir=out / "trials")
    if not store.save(report):
        raise PayloadReadError(f"could not write report files under {out}")


def _sampler_config(**fields) -> SamplerConfig:
    try:
        return SamplerConfig(**fields)
    except ValueError as e:
        raise PreconditionError(str(e)) from e


def _emit_report(report: ExperimentReport, csv: bool) -> None:
    if csv:
        typer.echo(trials_frame(report).to_csv(index=False), nl=False)
        return
    _print(report.model_dump(mode="json"), "experiment_report")


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log at DEBUG level on stderr"),
):
    setup_logging(verbose)
    try:
        init_config()
    except ValueError as e:
        _fail("precondition", str(e), EXIT_INPUT)


@app.command("classify-interval")
def classify_interval_cmd(
    map_file: Path = typer.Option(..., "--map", help="Interval map payload"),
):
    """Classify a PL homeomorphism of [0, 1]."""
    with guard():
        f = PayloadLoader().load_map(map_file)
        _print(classify(f).to_json(), "interval_class")


@app.command("classify-circle")
def classify_circle_cmd(
    lift_file: Path = typer.Option(..., "--lift", help="Normalized lift payload"),
    qmax: int = typer.Option(DEFAULT_Q_MAX, "--qmax", min=1),
    niter: int = typer.Option(DEFAULT_N_ITER, "--niter", min=1),
    ceiling: Optional[int] = typer.Option(None, "--ceiling", min=1),
    strict: bool = typer.Option(False, "--strict", help="Exit 4 when the verdict is undetermined"),
):
    """Classify a circle map through its rotation number and periodic points."""
    with guard():
        F = PayloadLoader().load_lift(lift_file)
        label = classify_circle(F, qmax, niter, ceiling)
        document = label.to_json()
        _print(document, "circle_class")
    if document["verdict"] == UNDETERMINED:
        _undetermined(strict)


@app.command("conjugate")
def conjugate_cmd(
    map_file: Optional[Path] = typer.Option(None, "--map", help="Interval map payload"),
    lift_file: Optional[Path] = typer.Option(None, "--lift", help="Lift payload"),
    other: Path = typer.Option(..., "--other", help="Second payload of the same kind"),
    qmax: int = typer.Option(DEFAULT_Q_MAX, "--qmax", min=1),
    niter: int = typer.Option(DEFAULT_N_ITER, "--niter", min=1),
    ceiling: Optional[int] = typer.Option(None, "--ceiling", min=1),
    strict: bool = typer.Option(False, "--strict"),
):
    """Decide whether two interval maps or two circle maps are conjugate."""
    if (map_file is None) == (lift_file is None):
        raise typer.BadParameter("give exactly one of --map or --lift")
    loader = PayloadLoader()
    with guard():
        if map_file is not None:
            verdict = conjugate_decision(loader.load_map(map_file), loader.load_map(other))
            _print(certificate_json(verdict), "conjugacy_certificate")
            return
        decision = conjugate_decision_circle(loader.load_lift(lift_file), loader.load_lift(other), qmax, niter, ceiling)
        document = decision.to_json()
        _print(document, "circle_conjugacy")
    if document["verdict"] == UNDETERMINED:
        _undetermined(strict)


@app.command("rotnum")
def rotnum_cmd(
    lift_file: Path = typer.Option(..., "--lift"),
    qmax: int = typer.Option(DEFAULT_Q_MAX, "--qmax", min=1),
    niter: int = typer.Option(DEFAULT_N_ITER, "--niter", min=1),
    ceiling: Optional[int] = typer.Option(None, "--ceiling", min=1),
    strict: bool = typer.Option(False, "--strict"),
):
    """Exact rotation number, or a certified enclosure when no period ≤ qmax exists."""
    with guard():
        rotation, _ = rotation_number(PayloadLoader().load_lift(lift_file), qmax, niter, ceiling)
        exact = isinstance(rotation, RationalRotation)
        _print({"rational": rotation.to_json()} if exact else {"interval": rotation.to_json()}, "rotation")
    if not exact:
        _undetermined(strict)


@app.command("represent")
def represent_cmd(
    kind: Kind = typer.Option(..., "--kind"),
    n: int = typer.Option(0, "--n", help="Interior fixed points (interval)"),
    sign: Sign = typer.Option(Sign.POS, "--sign", help="Sign of f - id on the first gap (interval)"),
    p: int = typer.Option(0, "--p", help="Rotation numerator (circle)"),
    q: int = typer.Option(1, "--q", help="Rotation denominator (circle)"),
    k: int = typer.Option(1, "--k", help="Pairs of periodic orbits (circle)"),
):
    """Emit the canonical representative of a non-Haar-null class."""
    with guard():
        if kind is Kind.INTERVAL:
            text = emit_map(representative(n, Letter(sign.value)))
        else:
            text = emit_lift(representative_circle(p, q, k))
        _print(json.loads(text), "map_payload")


@app.command("collapse")
def collapse_cmd(
    lift_file: Path = typer.Option(..., "--lift"),
    qmax: int = typer.Option(DEFAULT_Q_MAX, "--qmax", min=1),
    niter: int = typer.Option(DEFAULT_N_ITER, "--niter", min=1),
    ceiling: Optional[int] = typer.Option(None, "--ceiling", min=1),
):
    """Remove two periodic orbits from a crossing circle map."""
    with guard():
        H, result = orbit_collapse(PayloadLoader().load_lift(lift_file), q_max=qmax, ceiling=ceiling)
        document = {
            "h": json.loads(emit_lift(H)),
            "result": json.loads(emit_lift(result)),
            "classification": classify_circle(result, qmax, niter, ceiling).to_json(),
        }
        _print(document, "collapse")


@app.command("sample-interval")
def sample_interval_cmd(
    g_file: Path = typer.Option(..., "--g", help="Fixed interval map g"),
    trials: int = typer.Option(10_000, "--trials", min=1),
    seed: int = typer.Option(DEFAULT_SEED, "--seed", min=0),
    bits: int = typer.Option(DEFAULT_BITS, "--bits"),
    ceiling: Optional[int] = typer.Option(None, "--ceiling", min=1),
    workers: int = typer.Option(DEFAULT_WORKERS, "--workers", min=1),
    csv: bool = typer.Option(False, "--csv", help="Print the per-trial log as CSV"),
    out: Optional[Path] = typer.Option(None, "--out", help="Directory for the JSON report and CSV log"),
):
    """Classify g⁻¹∘f_a over seeded tent parameters a."""
    with guard():
        g = PayloadLoader().load_map(g_file)
        config = _sampler_config(trials=trials, seed=seed, bits=bits, ceiling=ceiling)
        report = ExperimentRunner(workers).experiment_interval(g, config)
        _save(report, out)
        _emit_report(report, csv)


@app.command("sample-circle")
def sample_circle_cmd(
    lift_file: Path = typer.Option(..., "--lift", help="Fixed circle map f"),
    trials: int = typer.Option(10_000, "--trials", min=1),
    seed: int = typer.Option(DEFAULT_SEED, "--seed", min=0),
    bits: int = typer.Option(DEFAULT_BITS, "--bits"),
    qmax: int = typer.Option(DEFAULT_Q_MAX, "--qmax", min=1),
    niter: int = typer.Option(DEFAULT_N_ITER, "--niter", min=1),
    ceiling: Optional[int] = typer.Option(None, "--ceiling", min=1),
    workers: int = typer.Option(DEFAULT_WORKERS, "--workers", min=1),
    csv: bool = typer.Option(False, "--csv"),
    strict: bool = typer.Option(False, "--strict", help="Exit 4 if any trial is undetermined"),
    out: Optional[Path] = typer.Option(None, "--out"),
):
    """Classify R_α∘f over seeded rotation angles α."""
    with guard():
        f = PayloadLoader().load_lift(lift_file)
        config = _sampler_config(trials=trials, seed=seed, bits=bits, q_max=qmax, n_iter=niter, ceiling=ceiling)
        report = ExperimentRunner(workers).experiment_circle(f, config)
        _save(report, out)
        _emit_report(report, csv)
    if report.counts.get(UNDETERMINED, 0):
        _undetermined(strict)


@app.command("spectral")
def spectral_cmd(
    op_file: Path = typer.Option(..., "--op", help="Generalized permutation unitary"),
    theta: Optional[str] = typer.Option(None, "--rotate", help="Multiply by e^{2πiθ} first, θ as p/q"),
    other: Optional[Path] = typer.Option(None, "--other", help="Second operator to test for conjugacy"),
    csv: bool = typer.Option(False, "--csv", help="Print the atoms as CSV"),
):
    """Exact spectral data (angles with multiplicity)."""
    loader = PayloadLoader()
    with guard():
        U = loader.load_unitary(op_file)
        if theta is not None:
            U = rotate(U, parse_rat(theta))
        data = spectral_data(U)
        if csv:
            frame = pd.DataFrame(data.to_json(), columns=["angle", "multiplicity"])
            typer.echo(frame.to_csv(index=False), nl=False)
            return
        document = {"dim": U.dim, "atoms": data.to_json(), "uniform_support": is_uniform_support(data)}
        if other is not None:
            document["conjugate"] = conjugate_decision_unitary(U, loader.load_unitary(other))
        _print(document, "spectral")


@app.command("bochner")
def bochner_cmd(
    op_file: Path = typer.Option(..., "--op"),
    index: int = typer.Option(..., "--index", min=0),
    n: int = typer.Option(..., "--n"),
):
    """Bochner coefficient ⟨Uⁿe_i, e_i⟩, exactly."""
    with guard():
        value = bochner_coeff(PayloadLoader().load_unitary(op_file), index, n)
        document = {"index": index, "n": n, "zero": value is None, "angle": None if value is None else format_rat(value)}
        _print(document, "bochner")


@app.command("validate")
def validate_cmd(
    file: Path = typer.Option(..., "--file", help="Map, lift or operator payload"),
):
    """Report every broken invariant of a payload file (exit 2 if any)."""
    with guard():
        report = PayloadLoader().validate(file)
        _print(report.model_dump(mode="json"), "validation_report")
    if not report.valid:
        raise typer.Exit(EXIT_INPUT)


if __name__ == "__main__":
    app()
