"""Service pipeline: sync validation, training, and versioned queries."""

import numpy as np
import pytest

from helpers import pulse_wave
from homevitals.errors import InputError, NotReady, NoWindow
from homevitals.service import JsonlStore, ServiceConfig, VitalsService, series_to_payload
from homevitals.signals import Channel, SampleSeries
from homevitals.simulate import simulate_bp_records

MIN_MS = 60_000


@pytest.fixture
def service(tmp_path):
    config = ServiceConfig(
        storage_path=str(tmp_path / "store.jsonl"),
        forest_n_trees=5,
        forest_max_depth=6,
        bp_boost_estimators=4,
        bp_segment_s=40.0,
        user_tags={1: "alice"},
        location_tags={10: "kitchen"},
    )
    store = JsonlStore(config.storage_path)
    yield VitalsService(config, store)
    store.close()


def stress_payload(subject, stressed, seed=0, duration_s=180.0):
    rng = np.random.default_rng(seed)
    n4 = int(duration_s * 4)
    eda = 2.0 + 0.05 * rng.normal(size=n4) + (0.8 if stressed else 0.0)
    bvp = pulse_wave(duration_s, 64.0, 1.3 if stressed else 1.0, noise=0.02, seed=seed)
    st = 33.5 - (0.5 if stressed else 0.0) + 0.03 * rng.normal(size=n4)
    ibi_value = 0.65 if stressed else 0.85
    ibi = [[int(t * 1000), ibi_value] for t in np.arange(0.5, duration_s, ibi_value)]
    # T1 sits before the recording so windows anchor to T2.
    t1_ms = -10 * MIN_MS
    concentration = 0.4 if stressed else 0.2
    return {
        "subject_id": subject,
        "chunks": [
            {"channel": "EDA", "rate_hz": 4.0, "start_ms": 0, "values": eda.tolist()},
            {"channel": "BVP", "rate_hz": 64.0, "start_ms": 0, "values": bvp.tolist()},
            {"channel": "ST", "rate_hz": 4.0, "start_ms": 0, "values": st.tolist()},
        ],
        "ibi": ibi,
        "cortisol": [
            {"timepoint": "T1", "t_ms": t1_ms, "concentration_ugdl": 0.2},
            {"timepoint": "T2", "t_ms": t1_ms + 20 * MIN_MS, "concentration_ugdl": concentration},
        ],
    }


class TestSync:
    def test_ack_counts(self, service):
        ack = service.sync_signals(stress_payload("S00", stressed=False))
        assert ack["stored"] == 3 + 1 + 2  # chunks + ibi + cortisol
        assert ack["duplicates"] == 0

    def test_resend_is_idempotent(self, service):
        payload = stress_payload("S00", stressed=False)
        service.sync_signals(payload)
        ack = service.sync_signals(payload)
        assert ack["stored"] == 0
        assert ack["duplicates"] == 6

    def test_wrong_rate_rejected_with_field(self, service):
        bad = {
            "subject_id": "S00",
            "chunks": [{"channel": "EDA", "rate_hz": 64.0, "start_ms": 0, "values": [1.0]}],
        }
        with pytest.raises(InputError, match=r"chunks\[0\]"):
            service.sync_signals(bad)
        assert len(service.store) == 0  # nothing persisted from a rejected sync

    def test_missing_subject_rejected(self, service):
        with pytest.raises(InputError, match="subject_id"):
            service.sync_signals({"chunks": []})


class TestStressTrainQuery:
    def test_train_then_query(self, service):
        for i in range(3):
            service.sync_signals(stress_payload(f"R{i}", stressed=False, seed=i))
            service.sync_signals(stress_payload(f"S{i}", stressed=True, seed=10 + i))
        result = service.train_stress(seed=1)
        assert result["model_key"] == "stress"
        assert len(result["version"]) == 12
        response = service.query_stress("S0")
        assert response["label"] == "stressed"
        assert response["probability"] > 0.5
        assert response["model_version"] == result["version"]
        assert response["window_end_ms"] <= 180_000
        calm = service.query_stress("R0")
        assert calm["label"] == "not_stressed"

    def test_query_without_model(self, service):
        service.sync_signals(stress_payload("S00", stressed=False))
        with pytest.raises(NotReady):
            service.query_stress("S00")

    def test_query_without_data(self, service):
        for i in range(2):
            service.sync_signals(stress_payload(f"R{i}", stressed=False, seed=i))
            service.sync_signals(stress_payload(f"S{i}", stressed=True, seed=10 + i))
        service.train_stress(seed=0)
        with pytest.raises(NoWindow):
            service.query_stress("ghost")

    def test_training_is_reproducible(self, service):
        for i in range(2):
            service.sync_signals(stress_payload(f"R{i}", stressed=False, seed=i))
            service.sync_signals(stress_payload(f"S{i}", stressed=True, seed=10 + i))
        v1 = service.train_stress(seed=7)["version"]
        v2 = service.train_stress(seed=7)["version"]
        assert v1 == v2


def bp_payload(subject, unit, offset_s, duration_s=200.0):
    rate = unit.ppg.rate_hz
    i0 = int(offset_s * rate)
    i1 = i0 + int(duration_s * rate)
    ppg = unit.ppg.slice_samples(i0, i1)
    j0, j1 = int(offset_s), int(offset_s + duration_s)
    sbp = SampleSeries(Channel.DERIVED, 1.0, ppg.start_ms, unit.sbp.values[j0:j1])
    dbp = SampleSeries(Channel.DERIVED, 1.0, ppg.start_ms, unit.dbp.values[j0:j1])
    return {
        "subject_id": subject,
        "chunks": [
            series_to_payload(ppg),
            series_to_payload(sbp, name="sbp_mmhg"),
            series_to_payload(dbp, name="dbp_mmhg"),
        ],
    }


class TestBpTrainQuery:
    def test_train_then_query(self, service):
        unit = simulate_bp_records(1, "short_term", seed=0)[0].units[0]
        for i, offset in enumerate((0.0, 300.0, 600.0, 900.0)):
            service.sync_signals(bp_payload(f"P{i}", unit, offset))
        result = service.train_bp(seed=2)
        assert "bp_sbp" in result and "bp_dbp" in result
        response = service.query_bp("P0")
        assert response["sbp_mmhg"] >= response["dbp_mmhg"]
        assert 80 <= response["sbp_mmhg"] <= 200
        assert response["model_version_sbp"] == result["bp_sbp"]
        assert response["segment_end_ms"] - response["segment_start_ms"] == 40_000

    def test_bvp_serves_as_pulse_source(self, service):
        unit = simulate_bp_records(1, "short_term", seed=1)[0].units[0]
        for i, offset in enumerate((0.0, 300.0)):
            service.sync_signals(bp_payload(f"P{i}", unit, offset))
        service.train_bp(seed=0)
        service.sync_signals(stress_payload("W0", stressed=False))
        response = service.query_bp("W0")  # only has wristband BVP
        assert response["sbp_mmhg"] >= response["dbp_mmhg"]

    def test_query_without_model(self, service):
        service.sync_signals(stress_payload("W0", stressed=False))
        with pytest.raises(NotReady):
            service.query_bp("W0")

    def test_inverted_models_trigger_swap_guard(self, service):
        # Sync with the target names crossed so the 'sbp' model learns the
        # lower pressure; the response must come back swapped and flagged.
        unit = simulate_bp_records(1, "short_term", seed=2)[0].units[0]
        for i, offset in enumerate((0.0, 300.0)):
            payload = bp_payload(f"P{i}", unit, offset)
            for chunk in payload["chunks"]:
                if chunk.get("name") == "sbp_mmhg":
                    chunk["name"] = "tmp"
            for chunk in payload["chunks"]:
                if chunk.get("name") == "dbp_mmhg":
                    chunk["name"] = "sbp_mmhg"
            for chunk in payload["chunks"]:
                if chunk.get("name") == "tmp":
                    chunk["name"] = "dbp_mmhg"
            service.sync_signals(payload)
        service.train_bp(seed=0)
        response = service.query_bp("P0")
        assert response["swapped"] is True
        assert response["sbp_mmhg"] >= response["dbp_mmhg"]


class TestLocationThroughService:
    def test_ingest_and_locate(self, service):
        service.ingest_tag_event("user", 1)
        service.ingest_tag_event("location", 10)
        from homevitals.location import LocationFix

        fix = service.locate("alice")
        assert isinstance(fix, LocationFix)
        assert fix.room == "kitchen"
        stored = list(service.store.records(kind="tag_event"))
        assert len(stored) == 2
