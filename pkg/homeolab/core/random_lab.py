"""
Witness-measure samplers and Monte Carlo experiments for homeolab.

This module handles:
- Drawing dyadic tent parameters and rotation angles from seeded generators
- Running interval and circle experiments, in-process or on a process pool
- Aggregating per-trial outcomes into reports with Wilson intervals
- Random PL maps and lifts shared by experiments and tests
"""

import asyncio
import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from homeolab.config import (
    DEFAULT_BITS,
    DEFAULT_N_ITER,
    DEFAULT_Q_MAX,
    DEFAULT_SEED,
    DEFAULT_WORKERS,
    MAX_DYADIC_BITS,
    MIN_DYADIC_BITS,
    REPORT_SCHEMA_VERSION,
    TRIAL_CHUNK_SIZE,
    WILSON_Z,
)
from homeolab.core.circle_dynamics import (
    CircleLift,
    compose_lifts,
    emit_lift,
    normalize_lift,
    parse_lift,
    rigid_rotation,
    rotation_number,
)
from homeolab.core.errors import PieceCeilingExceeded, PreconditionError
from homeolab.core.interval_dynamics import HaarNullReason, NonHaarNull, classify_fix_set, representative
from homeolab.core.pl_core import (
    ONE,
    ZERO,
    FixSegment,
    Letter,
    PLMap,
    coincidence_set,
    compose,
    emit_map,
    format_rat,
    identity,
    invert,
    parse_map,
    sign_word,
    tent_map,
)

logger = logging.getLogger(__name__)

NON_HAAR_NULL = "non-haar-null"
HAAR_NULL = "haar-null"
UNDETERMINED = "undetermined"
RESOURCE_FAILURE = "resource-failure"


class SamplerConfig(BaseModel):
    """Everything that determines an experiment's outcome."""

    model_config = ConfigDict(frozen=True)

    trials: int = Field(..., ge=1)
    seed: int = Field(DEFAULT_SEED, ge=0, lt=2**64)
    bits: int = Field(DEFAULT_BITS, ge=MIN_DYADIC_BITS, le=MAX_DYADIC_BITS)
    q_max: int = Field(DEFAULT_Q_MAX, ge=1)
    n_iter: int = Field(DEFAULT_N_ITER, ge=1)
    ceiling: Optional[int] = Field(None, ge=1)


class Certificate(BaseModel):
    """Exact evidence for a trial that did not land in a non-Haar-null class."""

    certificate_id: str
    trial: int
    parameter: str
    label: str
    reason: str
    detail: Dict[str, Any] = Field(default_factory=dict)


class TrialRecord(BaseModel):
    trial: int
    parameter: str
    verdict: str
    label: str
    certificate_id: Optional[str] = None


class WilsonBounds(BaseModel):
    lo: str
    hi: str


class ExperimentReport(BaseModel):
    schema_version: str = REPORT_SCHEMA_VERSION
    experiment: Literal["interval", "circle"]
    config: SamplerConfig
    input_map: str
    trials: int
    counts: Dict[str, int]
    fractions: Dict[str, str]
    wilson: Dict[str, WilsonBounds]
    histogram: Dict[str, int]
    parity: Dict[str, int] = Field(default_factory=dict)
    resolved: int
    degenerate: int
    certificates: List[Certificate]
    records: List[TrialRecord] = Field(default_factory=list, exclude=True)

    @property
    def non_haar_null_fraction(self) -> Fraction:
        return Fraction(self.counts.get(NON_HAAR_NULL, 0), self.trials)


# Samplers

def trial_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _check_bits(bits: int) -> None:
    if not MIN_DYADIC_BITS <= bits <= MAX_DYADIC_BITS:
        raise PreconditionError(f"bits must lie in [{MIN_DYADIC_BITS}, {MAX_DYADIC_BITS}], got {bits}")


def sample_tent(seed: int, bits: int = DEFAULT_BITS) -> Tuple[Fraction, PLMap]:
    """
    Draw a = 1/4 + j/2^(bits+1) with j uniform on 0..2^bits.

    Returns:
        Tuple[Fraction, PLMap]: The parameter and the tent map through (1/2, a)
    """
    _check_bits(bits)
    j = int(trial_rng(seed).integers(0, 2**bits, endpoint=True))
    a = Fraction(1, 4) + Fraction(j, 2 ** (bits + 1))
    return a, tent_map(a)


def sample_rotation(seed: int, bits: int = DEFAULT_BITS) -> Tuple[Fraction, CircleLift]:
    """Draw α = j/2^bits with j uniform on 0..2^bits − 1; the lift is x + α."""
    _check_bits(bits)
    j = int(trial_rng(seed).integers(0, 2**bits))
    alpha = Fraction(j, 2**bits)
    return alpha, rigid_rotation(alpha)


def _distinct_dyadics(rng: np.random.Generator, count: int, denominator: int) -> List[Fraction]:
    picks = rng.choice(np.arange(1, denominator), size=count, replace=False)
    return sorted(Fraction(int(v), denominator) for v in picks)


def random_pl_map(rng: np.random.Generator, pieces: int) -> PLMap:
    """Random PL homeomorphism of [0, 1] with at most ``pieces`` pieces."""
    if pieces < 1:
        raise PreconditionError("pieces must be positive")
    denominator = max(1024, 4 * pieces)
    xs = _distinct_dyadics(rng, pieces - 1, denominator)
    ys = _distinct_dyadics(rng, pieces - 1, denominator)
    return PLMap(((ZERO, ZERO), *zip(xs, ys), (ONE, ONE)))


def random_lift(rng: np.random.Generator, pieces: int) -> CircleLift:
    """Random normalized PL lift with at most ``pieces`` pieces."""
    if pieces < 1:
        raise PreconditionError("pieces must be positive")
    denominator = max(1024, 4 * pieces)
    start = Fraction(int(rng.integers(0, denominator)), denominator)
    xs = _distinct_dyadics(rng, pieces - 1, denominator)
    ys = [start + y for y in _distinct_dyadics(rng, pieces - 1, denominator)]
    return CircleLift(((ZERO, start), *zip(xs, ys), (ONE, start + 1)))


def stress_set(seed: int = DEFAULT_SEED) -> List[PLMap]:
    """Identity, zigzags with 0..3 interior fixed points of both signs, and one 40-piece random map."""
    family = [identity()]
    for n in range(4):
        for sign in (Letter.POS, Letter.NEG):
            family.append(representative(n, sign))
    family.append(random_pl_map(trial_rng(seed), 40))
    return family


# Wilson score interval

_SQRT_BITS = 64


def _sqrt_bounds(value: Fraction) -> Tuple[Fraction, Fraction]:
    """Rational lower and upper bounds of √value, equal when the root is rational."""
    a, b = value.numerator, value.denominator
    scale = 4 ** _SQRT_BITS
    radicand = a * b * scale
    root = math.isqrt(radicand)
    denominator = b * 2**_SQRT_BITS
    if root * root == radicand:
        return Fraction(root, denominator), Fraction(root, denominator)
    return Fraction(root, denominator), Fraction(root + 1, denominator)


def wilson_interval(successes: int, trials: int, z: Fraction = WILSON_Z) -> Tuple[Fraction, Fraction]:
    """
    95% Wilson score interval in rational arithmetic, rounded outward.

    Args:
        successes (int): Count of successes
        trials (int): Count of trials, at least 1
        z (Fraction): Normal quantile as an exact rational

    Returns:
        Tuple[Fraction, Fraction]: (lo, hi) clamped to [0, 1]
    """
    if trials < 1 or not 0 <= successes <= trials:
        raise PreconditionError(f"need 0 <= successes <= trials and trials >= 1, got {successes}/{trials}")
    n = Fraction(trials)
    p = successes / n
    z2 = z * z
    denom = 1 + z2 / n
    center = (p + z2 / (2 * n)) / denom
    _, root_hi = _sqrt_bounds(p * (1 - p) / n + z2 / (4 * n * n))
    half = z / denom * root_hi
    return max(ZERO, center - half), min(ONE, center + half)


# Per-trial evaluation (module level so worker processes can import it)

def _interval_trial(g: PLMap, g_inv: PLMap, config: SamplerConfig, trial: int) -> Dict[str, Any]:
    a, f = sample_tent(config.seed ^ trial, config.bits)
    parameter = format_rat(a)
    try:
        fs = coincidence_set(f, g, ceiling=config.ceiling)
    except PieceCeilingExceeded as e:
        return _failure(trial, parameter, str(e))
    label = classify_fix_set(fs)
    if isinstance(label, NonHaarNull):
        key = f"n={label.n},{label.first_sign.value}"
        return {"record": TrialRecord(trial=trial, parameter=parameter, verdict=NON_HAAR_NULL, label=key), "bucket": key}
    # Certificates carry the composed map's word, built only on this rare path
    h = compose(g_inv, f)
    detail = {"word": sign_word(h).to_json()}
    if label.reason is HaarNullReason.INTERIOR_SEGMENT:
        seg = next(c for c in fs.components if isinstance(c, FixSegment))
        detail["segment"] = [format_rat(seg.lo), format_rat(seg.hi)]
    else:
        for i in range(1, len(fs.components) - 1):
            if fs.gap_signs[i - 1] == fs.gap_signs[i]:
                detail["point"] = format_rat(fs.components[i].lo)
                break
    return _haar_null(trial, parameter, f"{HAAR_NULL}:{label.reason.value}", label.reason.value, detail)


def _circle_trial(f: CircleLift, config: SamplerConfig, trial: int) -> Dict[str, Any]:
    alpha, rot = sample_rotation(config.seed ^ trial, config.bits)
    parameter = format_rat(alpha)
    try:
        F = normalize_lift(compose_lifts(rot, f, ceiling=config.ceiling))
        rotation, struct = rotation_number(F, config.q_max, config.n_iter, config.ceiling)
    except PieceCeilingExceeded as e:
        return _failure(trial, parameter, str(e))
    if struct is None:
        cert_id = f"c{trial}"
        cert = Certificate(
            certificate_id=cert_id, trial=trial, parameter=parameter, label=UNDETERMINED,
            reason="no period up to q_max", detail={"enclosure": rotation.to_json()},
        )
        record = TrialRecord(trial=trial, parameter=parameter, verdict=UNDETERMINED, label=UNDETERMINED, certificate_id=cert_id)
        return {"record": record, "certificate": cert}
    detail = {"rotation": rotation.to_json(), "q": struct.q}
    if struct.degenerate:
        detail["segments"] = [[format_rat(lo), format_rat(hi)] for lo, hi in struct.segments]
        return _haar_null(trial, parameter, f"{HAAR_NULL}:infinite-periodic", "infinite-periodic", detail)
    if not struct.all_crossing:
        bad = [format_rat(x) for x, flag in zip(struct.points, struct.flags) if not flag.crossing]
        detail["non_crossing_points"] = bad
        return _haar_null(trial, parameter, f"{HAAR_NULL}:non-crossing", "non-crossing", detail)
    K = len(struct.points)
    parity = "conforming" if K % (2 * struct.q) == 0 else "violating"
    key = f"{rotation.to_json()},k={K // (2 * struct.q)}"
    record = TrialRecord(trial=trial, parameter=parameter, verdict=NON_HAAR_NULL, label=key)
    return {"record": record, "bucket": key, "parity": parity}


def _failure(trial: int, parameter: str, message: str) -> Dict[str, Any]:
    cert_id = f"c{trial}"
    cert = Certificate(certificate_id=cert_id, trial=trial, parameter=parameter, label=RESOURCE_FAILURE, reason=message)
    record = TrialRecord(trial=trial, parameter=parameter, verdict=RESOURCE_FAILURE, label=RESOURCE_FAILURE, certificate_id=cert_id)
    return {"record": record, "certificate": cert}


def _haar_null(trial: int, parameter: str, label: str, reason: str, detail: Dict[str, Any]) -> Dict[str, Any]:
    cert_id = f"c{trial}"
    cert = Certificate(certificate_id=cert_id, trial=trial, parameter=parameter, label=label, reason=reason, detail=detail)
    record = TrialRecord(trial=trial, parameter=parameter, verdict=HAAR_NULL, label=label, certificate_id=cert_id)
    return {"record": record, "certificate": cert}


def run_chunk(kind: str, map_text: str, config_json: str, start: int, stop: int) -> List[Dict[str, Any]]:
    """Evaluate trials start..stop-1; arguments are plain text so they pickle cheaply."""
    config = SamplerConfig.model_validate_json(config_json)
    if kind == "interval":
        g = parse_map(map_text)
        g_inv = invert(g)
        return [_interval_trial(g, g_inv, config, t) for t in range(start, stop)]
    f = parse_lift(map_text)
    return [_circle_trial(f, config, t) for t in range(start, stop)]


# Experiments

class ExperimentRunner:
    """Runs trial chunks in-process or across worker processes, aggregating in trial order."""

    def __init__(self, workers: int = DEFAULT_WORKERS, chunk_size: int = TRIAL_CHUNK_SIZE):
        if workers < 1 or chunk_size < 1:
            raise PreconditionError("workers and chunk_size must be positive")
        self.workers = workers
        self.chunk_size = chunk_size
        self.logger = logging.getLogger(__name__)

    def _chunks(self, trials: int) -> List[Tuple[int, int]]:
        return [(s, min(s + self.chunk_size, trials)) for s in range(0, trials, self.chunk_size)]

    async def run_chunks_parallel(self, kind: str, map_text: str, config: SamplerConfig) -> List[Dict[str, Any]]:
        """
        Fan chunks out to a process pool, at most ``workers`` in flight.
        """
        semaphore = asyncio.Semaphore(self.workers)
        loop = asyncio.get_running_loop()
        config_json = config.model_dump_json()

        with ProcessPoolExecutor(max_workers=self.workers) as pool:

            async def run_with_semaphore(start: int, stop: int):
                async with semaphore:
                    result = await loop.run_in_executor(pool, run_chunk, kind, map_text, config_json, start, stop)
                    self.logger.info(f"Chunk {start}-{stop} done")
                    return result

            tasks = [run_with_semaphore(start, stop) for start, stop in self._chunks(config.trials)]
            results = await asyncio.gather(*tasks)

        return [outcome for chunk in results for outcome in chunk]

    def run_trials(self, kind: str, map_text: str, config: SamplerConfig) -> List[Dict[str, Any]]:
        if self.workers == 1:
            config_json = config.model_dump_json()
            outcomes = []
            for start, stop in self._chunks(config.trials):
                outcomes.extend(run_chunk(kind, map_text, config_json, start, stop))
            return outcomes
        return asyncio.run(self.run_chunks_parallel(kind, map_text, config))

    def _report(self, kind: str, map_text: str, config: SamplerConfig, outcomes: List[Dict[str, Any]]) -> ExperimentReport:
        counts: Counter = Counter()
        histogram: Counter = Counter()
        parity: Counter = Counter()
        certificates, records = [], []
        for outcome in outcomes:
            record = outcome["record"]
            records.append(record)
            counts[record.verdict] += 1
            if record.verdict == HAAR_NULL:
                counts[record.label] += 1
            if "bucket" in outcome:
                histogram[outcome["bucket"]] += 1
            if "parity" in outcome:
                parity[outcome["parity"]] += 1
            if "certificate" in outcome:
                certificates.append(outcome["certificate"])
        for label in (NON_HAAR_NULL, HAAR_NULL, RESOURCE_FAILURE) + ((UNDETERMINED,) if kind == "circle" else ()):
            counts.setdefault(label, 0)
        n = config.trials
        wilson = {}
        fractions = {}
        for label, count in sorted(counts.items()):
            lo, hi = wilson_interval(count, n)
            wilson[label] = WilsonBounds(lo=format_rat(lo), hi=format_rat(hi))
            fractions[label] = format_rat(Fraction(count, n))
        degenerate = counts[HAAR_NULL]
        resolved = n - counts.get(UNDETERMINED, 0) - counts[RESOURCE_FAILURE]
        if degenerate:
            self.logger.warning(f"{degenerate} of {n} trials did not land in a non-Haar-null class")
        return ExperimentReport(
            experiment=kind,
            config=config,
            input_map=map_text,
            trials=n,
            counts=dict(sorted(counts.items())),
            fractions=fractions,
            wilson=wilson,
            histogram=dict(sorted(histogram.items())),
            parity=dict(sorted(parity.items())),
            resolved=resolved,
            degenerate=degenerate,
            certificates=certificates,
            records=records,
        )

    def experiment_interval(self, g: PLMap, config: SamplerConfig) -> ExperimentReport:
        """
        Classify g⁻¹∘f_a for every sampled tent parameter a.

        Args:
            g (PLMap): Fixed translate
            config (SamplerConfig): Trial count, seed and sampling resolution

        Returns:
            ExperimentReport: Counts, histogram over (n, first_sign) and certificates
        """
        self.logger.info(f"Interval experiment: {config.trials} trials, seed {config.seed}, {self.workers} workers")
        map_text = emit_map(g)
        return self._report("interval", map_text, config, self.run_trials("interval", map_text, config))

    def experiment_circle(self, f: CircleLift, config: SamplerConfig) -> ExperimentReport:
        """Classify R_α∘f for every sampled rotation α."""
        self.logger.info(f"Circle experiment: {config.trials} trials, seed {config.seed}, {self.workers} workers")
        map_text = emit_lift(normalize_lift(f))
        return self._report("circle", map_text, config, self.run_trials("circle", map_text, config))


def experiment_interval(g: PLMap, config: SamplerConfig, workers: int = DEFAULT_WORKERS) -> ExperimentReport:
    return ExperimentRunner(workers).experiment_interval(g, config)


def experiment_circle(f: CircleLift, config: SamplerConfig, workers: int = DEFAULT_WORKERS) -> ExperimentReport:
    return ExperimentRunner(workers).experiment_circle(f, config)
