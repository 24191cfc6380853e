"""Tests for payload loading, validation reports and report storage."""

import json
from fractions import Fraction

import pandas as pd
import pytest

from homeolab.core.circle_dynamics import CircleLift
from homeolab.core.errors import InvariantViolation, MapFormatError, PayloadReadError
from homeolab.core.loader import PayloadLoader, detect_kind
from homeolab.core.pl_core import PLMap, identity, tent_map
from homeolab.core.random_lab import SamplerConfig, experiment_interval
from homeolab.core.report_store import TRIAL_COLUMNS, ReportStore, report_json, report_stem, trials_frame
from homeolab.core.spectral import GenPermUnitary


@pytest.fixture
def loader():
    return PayloadLoader()


@pytest.fixture
def small_report():
    return experiment_interval(identity(), SamplerConfig(trials=12, seed=4))


def interval(*points):
    return {"kind": "interval", "breakpoints": [list(p) for p in points]}


def lift(*points):
    return {"kind": "lift", "breakpoints": [list(p) for p in points]}


def violations(report):
    return [d.violation for d in report.diagnostics]


class TestLoad:
    def test_dispatch(self, loader, tent_file, rotation_file, write_payload):
        unitary_file = write_payload("u.json", {"dim": 2, "perm": [1, 0], "phases": ["0", "1/2"]})
        assert loader.load(tent_file) == tent_map("2/3")
        assert isinstance(loader.load(rotation_file), CircleLift)
        assert isinstance(loader.load(unitary_file), GenPermUnitary)

    def test_typed_loaders(self, loader, tent_file, rotation_file):
        assert isinstance(loader.load_map(tent_file), PLMap)
        assert loader.load_lift(rotation_file)(0) == Fraction(2, 5)

    def test_missing_file(self, loader, tmp_path):
        with pytest.raises(PayloadReadError):
            loader.load(tmp_path / "missing.json")

    def test_oversized_file(self, tent_file):
        with pytest.raises(PayloadReadError):
            PayloadLoader(max_payload_mb=1e-6).load(tent_file)

    def test_not_utf8(self, loader, tmp_path):
        path = tmp_path / "bin.json"
        path.write_bytes(b"\xff\xfe\x00")
        with pytest.raises(PayloadReadError):
            loader.read_text(path)

    def test_read_error_is_os_error(self, loader, tmp_path):
        with pytest.raises(OSError):
            loader.load(tmp_path / "missing.json")

    def test_not_json(self, loader, write_payload):
        with pytest.raises(MapFormatError):
            loader.load(write_payload("bad.json", "nope"))

    def test_unknown_kind(self, loader, write_payload):
        with pytest.raises(MapFormatError):
            loader.load(write_payload("x.json", {"kind": "sphere"}))

    def test_detect_kind(self):
        assert detect_kind({"kind": "lift"}) == "lift"
        assert detect_kind({"perm": [0]}) == "unitary"
        assert detect_kind({"kind": 3}) is None
        assert detect_kind({}) is None


class TestValidate:
    def test_valid_interval(self, loader, tent_file):
        report = loader.validate(tent_file)
        assert report.valid
        assert report.kind == "interval"
        assert report.diagnostics == []

    def test_valid_lift(self, loader, representative_file):
        assert loader.validate(representative_file).valid

    def test_monotonicity(self, loader, write_payload):
        path = write_payload("m.json", interval(("0", "0"), ("1/2", "3/4"), ("3/4", "1/2"), ("1", "1")))
        report = loader.validate(path)
        assert not report.valid
        assert violations(report) == ["monotonicity"]
        assert report.diagnostics[0].index == 2

    def test_unsorted_abscissae(self, loader, write_payload):
        path = write_payload("u.json", interval(("0", "0"), ("3/4", "5/8"), ("1/2", "1/4"), ("1", "1")))
        report = loader.validate(path)
        assert violations(report) == ["monotonicity"]
        assert report.diagnostics[0].index == 2
        with pytest.raises(InvariantViolation):
            loader.load_map(path)

    def test_domain_and_range(self, loader, write_payload):
        report = loader.validate(write_payload("d.json", interval(("1/8", "1/8"), ("1", "3/4"))))
        assert set(violations(report)) == {"domain", "range"}

    def test_lift_period(self, loader, write_payload):
        report = loader.validate(write_payload("l.json", lift(("0", "1/4"), ("1/2", "1/2"), ("1", "1"))))
        assert violations(report) == ["lift-period"]

    def test_lift_normalization(self, loader, write_payload):
        report = loader.validate(write_payload("n.json", lift(("0", "3/2"), ("1", "5/2"))))
        assert violations(report) == ["lift-normalization"]

    def test_all_problems_reported(self, loader, write_payload):
        path = write_payload("many.json", interval(("0", "1/4"), ("1/2", "1/8"), ("3/4", "1/16"), ("1", "1")))
        report = loader.validate(path)
        assert violations(report).count("monotonicity") == 2
        assert "range" in violations(report)

    def test_permutation(self, loader, write_payload):
        report = loader.validate(write_payload("p.json", {"dim": 3, "perm": [0, 2, 2], "phases": ["0", "0", "0"]}))
        assert violations(report) == ["permutation"]

    def test_angle_range(self, loader, write_payload):
        report = loader.validate(write_payload("a.json", {"dim": 2, "perm": [1, 0], "phases": ["1/2", "5/4"]}))
        assert violations(report) == ["angle-range"]
        assert report.diagnostics[0].index == 1

    def test_dimension(self, loader, write_payload):
        report = loader.validate(write_payload("dim.json", {"dim": 3, "perm": [1, 0], "phases": ["0", "0"]}))
        assert violations(report).count("dimension") == 2

    def test_not_json(self, loader, write_payload):
        report = loader.validate(write_payload("j.json", "{"))
        assert violations(report) == ["json"]
        assert report.kind is None

    def test_schema(self, loader, write_payload):
        assert violations(loader.validate(write_payload("s.json", {"kind": "sphere"}))) == ["schema"]
        bad_rational = interval(("0", "0"), ("0.5", "1/2"), ("1", "1"))
        assert "schema" in violations(loader.validate(write_payload("r.json", bad_rational)))

    def test_missing_file(self, loader, tmp_path):
        with pytest.raises(PayloadReadError):
            loader.validate(tmp_path / "missing.json")


class TestReportStore:
    def test_save_and_load(self, tmp_path, small_report):
        store = ReportStore(tmp_path / "reports", tmp_path / "trials")
        assert store.save(small_report)
        stem = report_stem(small_report)
        assert stem == "interval_seed4_n12"
        loaded = store.load_report(tmp_path / "reports" / f"{stem}.json")
        assert report_json(loaded) == report_json(small_report)

    def test_trial_csv(self, tmp_path, small_report):
        path = ReportStore(tmp_path / "r", tmp_path / "t").save_trials(small_report, "run")
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
        assert list(frame.columns) == TRIAL_COLUMNS
        assert len(frame) == 12
        assert frame["trial"].tolist() == [str(i) for i in range(12)]

    def test_trials_frame(self, small_report):
        frame = trials_frame(small_report)
        assert list(frame.columns) == TRIAL_COLUMNS
        assert (frame["schema_version"] == "1").all()
        assert (frame["certificate_id"] == "").all()

    def test_report_json_excludes_records(self, small_report):
        assert "records" not in json.loads(report_json(small_report))

    def test_save_failure(self, tmp_path, small_report):
        blocker = tmp_path / "blocker"
        blocker.write_text("file, not a directory")
        store = ReportStore(blocker, blocker)
        assert store.save_report(small_report) is None
        assert not store.save(small_report)

    def test_load_failure(self, tmp_path):
        assert ReportStore(tmp_path, tmp_path).load_report(tmp_path / "absent.json") is None
