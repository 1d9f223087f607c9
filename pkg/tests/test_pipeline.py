import json

import numpy as np
import pytest

from modmi.errors import DataError, InfeasibleError
from modmi.infotheory import info_diagram
from modmi.ingestion import (
    load_manifest,
    resample_nearest,
    write_feature_matrix,
    write_labels,
)
from modmi.pipeline import AnalysisConfig, InfoReport, analyze, sweep_clusters
from modmi.quantizer import assign, fit
from modmi.synthetic import exhaustive_stream, gen_gaussian_mixture, xor_pmf
from util import features, seq


def write_manifest(tmp_path, streams, target_rate=25.0, name="manifest.json"):
    path = tmp_path / name
    path.write_text(json.dumps({"target_rate_hz": target_rate, "streams": streams}))
    return path


@pytest.fixture
def blob_manifest(tmp_path):
    """Two continuous streams plus component labels, all synchronized."""
    centers_a = np.array([[0.0, 0.0, 0.0], [30.0, 0.0, 0.0], [0.0, 30.0, 0.0]])
    centers_b = np.array([[5.0] * 2, [-5.0] * 2, [15.0] * 2])
    feats_a, truth = gen_gaussian_mixture(centers_a, 1.0, 120, seed=1)
    feats_b, _ = gen_gaussian_mixture(centers_b, 1.0, 120, seed=2)
    write_feature_matrix(feats_a, tmp_path / "a.fmx")
    write_feature_matrix(feats_b, tmp_path / "b.fmx")
    write_labels(truth, tmp_path / "t.lbl")
    return write_manifest(
        tmp_path,
        [
            {"name": "a", "path": "a.fmx", "kind": "features", "sample_rate_hz": 25.0},
            {"name": "b", "path": "b.fmx", "kind": "features", "sample_rate_hz": 25.0},
            {"name": "t", "path": "t.lbl", "kind": "labels", "sample_rate_hz": 25.0},
        ],
    )


@pytest.fixture
def xor_manifest(tmp_path):
    streams = exhaustive_stream(xor_pmf(), copies=3, tags=["v", "t", "s"])
    entries = []
    for stream in streams:
        write_labels(stream, tmp_path / f"{stream.modality_tag}.lbl")
        entries.append(
            {
                "name": stream.modality_tag,
                "path": f"{stream.modality_tag}.lbl",
                "kind": "labels",
                "sample_rate_hz": 25.0,
            }
        )
    return write_manifest(tmp_path, entries)


class TestAnalyze:
    def test_composition_identity(self, blob_manifest):
        config = AnalysisConfig(clusters=4, seed=1)
        report = analyze(blob_manifest, config)

        # replicate the pipeline by hand: load, resample, quantize, measure
        manifest = load_manifest(blob_manifest)
        loaded = [
            resample_nearest(manifest.load_stream(s), manifest.target_rate_hz)
            for s in manifest.streams
        ]
        discretized = []
        for position, stream in enumerate(loaded):
            if manifest.streams[position].kind == "features":
                cb = fit(stream, 4, seed=1 + position, tol=config.tol, max_iter=config.max_iter)
                discretized.append(assign(cb, stream))
            else:
                discretized.append(stream)
        # roles: one labels stream -> T; features fill (S, V) in manifest order
        expected = info_diagram(discretized[1], discretized[2], discretized[0], base="2")
        assert report.quantities == expected

    def test_roles_single_labels_stream(self, blob_manifest):
        report = analyze(blob_manifest, AnalysisConfig(clusters=3, seed=0))
        roles = {s.name: s.role for s in report.streams}
        assert roles == {"a": "S", "b": "V", "t": "T"}

    def test_roles_by_explicit_names(self, xor_manifest):
        report = analyze(xor_manifest, AnalysisConfig())
        roles = {s.name: s.role for s in report.streams}
        assert roles == {"v": "V", "t": "T", "s": "S"}

    def test_xor_triple_synergy(self, xor_manifest):
        report = analyze(xor_manifest, AnalysisConfig())
        assert report.quantities.i_vts == pytest.approx(-1.0, abs=1e-12)
        assert report.quantities.i_ts == 0.0

    def test_two_stream_report_has_no_trivariate_fields(self, tmp_path):
        write_labels(seq([0, 1, 0, 1]), tmp_path / "x.lbl")
        write_labels(seq([0, 0, 1, 1]), tmp_path / "y.lbl")
        manifest = write_manifest(
            tmp_path,
            [
                {"name": "x", "path": "x.lbl", "kind": "labels", "sample_rate_hz": 25.0},
                {"name": "y", "path": "y.lbl", "kind": "labels", "sample_rate_hz": 25.0},
            ],
        )
        report = analyze(manifest, AnalysisConfig())
        assert report.quantities.arity == 2
        doc = report.to_json_dict()
        assert "I3" not in doc["quantities"] and "regions" not in doc["quantities"]

    def test_deterministic_reports(self, blob_manifest):
        config = AnalysisConfig(clusters=5, seed=3)
        assert analyze(blob_manifest, config).to_json() == analyze(blob_manifest, config).to_json()

    def test_quantized_entropy_bounded_by_log_k(self, blob_manifest):
        report = analyze(blob_manifest, AnalysisConfig(clusters=5, seed=0))
        assert report.quantities.h_s <= np.log2(5) + 1e-12
        assert report.quantities.h_v <= np.log2(5) + 1e-12

    def test_stream_metadata(self, blob_manifest):
        report = analyze(blob_manifest, AnalysisConfig(clusters=3, seed=0))
        by_name = {s.name: s for s in report.streams}
        assert by_name["a"].dims == 3 and by_name["a"].clusters == 3
        assert by_name["a"].codebook_sha256 is not None
        assert by_name["t"].clusters is None and by_name["t"].codebook_sha256 is None
        assert by_name["t"].rows == 360

    def test_errors_carry_stream_name(self, tmp_path):
        # 2 distinct rows cannot support 5 clusters
        write_feature_matrix(
            features([[0.0], [1.0], [0.0], [1.0]]), tmp_path / "tiny.fmx"
        )
        write_labels(seq([0, 1, 0, 1]), tmp_path / "t.lbl")
        manifest = write_manifest(
            tmp_path,
            [
                {"name": "tiny", "path": "tiny.fmx", "kind": "features", "sample_rate_hz": 25.0},
                {"name": "t", "path": "t.lbl", "kind": "labels", "sample_rate_hz": 25.0},
            ],
        )
        with pytest.raises(InfeasibleError, match="stream 'tiny'"):
            analyze(manifest, AnalysisConfig(clusters=5))

    def test_mixed_rates_align(self, tmp_path):
        write_labels(seq(np.arange(200) % 3, 3), tmp_path / "fast.lbl")
        write_labels(seq(np.arange(100) % 3, 3), tmp_path / "slow.lbl")
        manifest = write_manifest(
            tmp_path,
            [
                {"name": "fast", "path": "fast.lbl", "kind": "labels", "sample_rate_hz": 50.0},
                {"name": "slow", "path": "slow.lbl", "kind": "labels", "sample_rate_hz": 25.0},
            ],
        )
        report = analyze(manifest, AnalysisConfig())
        assert all(s.rows == 100 for s in report.streams)

    def test_stream_count_bounds(self, tmp_path):
        write_labels(seq([0, 1]), tmp_path / "only.lbl")
        manifest = write_manifest(
            tmp_path,
            [{"name": "only", "path": "only.lbl", "kind": "labels", "sample_rate_hz": 25.0}],
        )
        with pytest.raises(DataError, match=">= 2"):
            analyze(manifest, AnalysisConfig())


class TestSweep:
    def test_discrete_entropy_constant_across_ks(self, blob_manifest):
        reports = sweep_clusters(blob_manifest, AnalysisConfig(seed=1), [2, 3, 5])
        h_t = {r.quantities.h_t for r in reports}
        assert len(h_t) == 1

    def test_single_k_equals_analyze(self, blob_manifest):
        config = AnalysisConfig(seed=2)
        [report] = sweep_clusters(blob_manifest, config, [4])
        direct = analyze(blob_manifest, AnalysisConfig(seed=2, clusters=4))
        assert report.to_json() == direct.to_json()

    def test_sweep_overrides_manifest_clusters(self, tmp_path):
        centers = np.array([[0.0], [20.0], [40.0], [60.0]])
        feats, truth = gen_gaussian_mixture(centers, 0.5, 50, seed=3)
        write_feature_matrix(feats, tmp_path / "s.fmx")
        write_labels(truth, tmp_path / "t.lbl")
        manifest = write_manifest(
            tmp_path,
            [
                {
                    "name": "s",
                    "path": "s.fmx",
                    "kind": "features",
                    "sample_rate_hz": 25.0,
                    "clusters": 2,
                },
                {"name": "t", "path": "t.lbl", "kind": "labels", "sample_rate_hz": 25.0},
            ],
        )
        [report] = sweep_clusters(manifest, AnalysisConfig(seed=0), [4])
        assert next(s for s in report.streams if s.name == "s").clusters == 4

    def test_empty_ks_rejected(self, blob_manifest):
        with pytest.raises(DataError, match="non-empty"):
            sweep_clusters(blob_manifest, AnalysisConfig(), [])

    def test_rising_entropy_on_gaussian(self, tmp_path):
        rng = np.random.Generator(np.random.PCG64(123))
        feats = features(rng.standard_normal((2000, 4)))
        write_feature_matrix(feats, tmp_path / "s.fmx")
        write_labels(seq(rng.integers(0, 16, size=2000), 16), tmp_path / "t.lbl")
        manifest = write_manifest(
            tmp_path,
            [
                {"name": "s", "path": "s.fmx", "kind": "features", "sample_rate_hz": 25.0},
                {"name": "t", "path": "t.lbl", "kind": "labels", "sample_rate_hz": 25.0},
            ],
        )
        reports = sweep_clusters(manifest, AnalysisConfig(seed=0), [10, 50, 100])
        h_s = [r.quantities.h_s for r in reports]
        assert h_s == sorted(h_s)


class TestReportSerialization:
    def test_json_round_trip(self, blob_manifest):
        report = analyze(blob_manifest, AnalysisConfig(clusters=3, seed=5, log_base="e"))
        text = report.to_json()
        again = InfoReport.from_json(text)
        assert again.to_json() == text
        assert again.config == report.config

    def test_schema_shape(self, blob_manifest):
        doc = analyze(blob_manifest, AnalysisConfig(clusters=3)).to_json_dict()
        assert set(doc) == {"config", "rng", "streams", "quantities"}
        assert doc["rng"] == "pcg64"
        q = doc["quantities"]
        assert set(q["H"]) == {"T", "S", "V"}
        assert set(q["I2"]) == {"T,V", "T,S", "V,S"}
        assert set(q["cond"]) == {"S|T", "V|T", "T|S", "T|V", "V|S", "S|V"}
        assert set(q["regions"]) == {
            "V|T,S", "T|V,S", "S|V,T", "V;T|S", "T;S|V", "V;S|T", "V;T;S",
        }
        assert q["log_base"] == "2"

    def test_config_rate_defaults_to_manifest(self, tmp_path):
        write_labels(seq([0, 1] * 10), tmp_path / "x.lbl")
        write_labels(seq([0, 1] * 10), tmp_path / "y.lbl")
        manifest = write_manifest(
            tmp_path,
            [
                {"name": "x", "path": "x.lbl", "kind": "labels", "sample_rate_hz": 50.0},
                {"name": "y", "path": "y.lbl", "kind": "labels", "sample_rate_hz": 50.0},
            ],
            target_rate=10.0,
        )
        report = analyze(manifest, AnalysisConfig(target_rate_hz=None))
        assert report.config.target_rate_hz == 10.0
        assert all(s.rows == 4 for s in report.streams)  # 20 frames at 50 Hz -> 10 Hz
