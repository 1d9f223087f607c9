"""End-to-end analysis: load streams, align to one rate, quantize the
continuous ones, and compute the full quantity table into an InfoReport.

Reports serialize as JSON with full configuration provenance, so every
number can be traced to (manifest, config, seed) and regenerated.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import infotheory, quantizer
from .errors import DataError, ModmiError
from .infotheory import InfoQuantities
from .ingestion import (
    FeatureMatrix,
    LabelSequence,
    Manifest,
    _truncated,
    load_manifest,
    resample_nearest,
)
from .quantizer import RNG_NAME


@dataclass(frozen=True)
class AnalysisConfig:
    """Knobs of one analysis run.

    ``target_rate_hz=None`` means "use the manifest's target_rate_hz".
    ``clusters`` is the default k for continuous streams; a manifest entry's
    ``clusters`` field overrides it per stream.
    """

    target_rate_hz: float | None = 25.0
    clusters: int = 2000
    seed: int = 0
    tol: float = 1e-4
    max_iter: int = 300
    normalize: bool = False
    log_base: str = "2"

    def __post_init__(self):
        object.__setattr__(self, "log_base", infotheory.normalize_base(self.log_base))
        if self.clusters < 1:
            raise DataError(f"clusters must be >= 1, got {self.clusters}")
        if self.target_rate_hz is not None and not self.target_rate_hz > 0:
            raise DataError(f"target_rate_hz must be > 0, got {self.target_rate_hz}")

    def as_dict(self, effective_rate: float | None = None) -> dict:
        return {
            "target_rate_hz": effective_rate if effective_rate is not None else self.target_rate_hz,
            "clusters": self.clusters,
            "seed": self.seed,
            "tol": self.tol,
            "max_iter": self.max_iter,
            "normalize": self.normalize,
            "log_base": self.log_base,
        }


@dataclass(frozen=True)
class StreamSummary:
    """Per-stream provenance recorded in a report."""

    name: str
    role: str
    kind: str
    rows: int
    dims: int | None = None
    clusters: int | None = None
    distinct: int | None = None
    codebook_sha256: str | None = None


@dataclass(frozen=True)
class InfoReport:
    """The quantity table plus everything needed to reproduce it."""

    quantities: InfoQuantities
    streams: tuple[StreamSummary, ...]
    config: AnalysisConfig

    def to_json_dict(self) -> dict:
        streams = []
        for s in self.streams:
            entry = {"name": s.name, "role": s.role, "kind": s.kind, "L": s.rows}
            if s.dims is not None:
                entry["d"] = s.dims
            if s.clusters is not None:
                entry["k"] = s.clusters
            if s.distinct is not None:
                entry["distinct"] = s.distinct
            if s.codebook_sha256 is not None:
                entry["codebook_sha256"] = s.codebook_sha256
            streams.append(entry)
        return {
            "config": self.config.as_dict(),
            "rng": RNG_NAME,
            "streams": streams,
            "quantities": self.quantities.as_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "InfoReport":
        doc = json.loads(text)
        cfg = doc["config"]
        config = AnalysisConfig(
            target_rate_hz=cfg["target_rate_hz"],
            clusters=cfg["clusters"],
            seed=cfg["seed"],
            tol=cfg["tol"],
            max_iter=cfg["max_iter"],
            normalize=cfg["normalize"],
            log_base=cfg["log_base"],
        )
        streams = tuple(
            StreamSummary(
                name=e["name"],
                role=e["role"],
                kind=e["kind"],
                rows=e["L"],
                dims=e.get("d"),
                clusters=e.get("k"),
                distinct=e.get("distinct"),
                codebook_sha256=e.get("codebook_sha256"),
            )
            for e in doc["streams"]
        )
        q = doc["quantities"]
        if "I3" in q:
            quantities = InfoQuantities(
                log_base=q["log_base"],
                h_t=q["H"]["T"],
                h_s=q["H"]["S"],
                h_v=q["H"]["V"],
                i_ts=q["I2"]["T,S"],
                i_tv=q["I2"]["T,V"],
                i_vs=q["I2"]["V,S"],
                i_vts=q["I3"],
                h_s_given_t=q["cond"]["S|T"],
                h_v_given_t=q["cond"]["V|T"],
                h_t_given_s=q["cond"]["T|S"],
                h_t_given_v=q["cond"]["T|V"],
                h_v_given_s=q["cond"]["V|S"],
                h_s_given_v=q["cond"]["S|V"],
                regions=dict(q["regions"]),
            )
        else:
            quantities = InfoQuantities(
                log_base=q["log_base"],
                h_t=q["H"]["T"],
                h_s=q["H"]["S"],
                i_ts=q["I2"]["T,S"],
                h_s_given_t=q["cond"]["S|T"],
                h_t_given_s=q["cond"]["T|S"],
            )
        return cls(quantities=quantities, streams=streams, config=config)


def _assign_roles(specs) -> dict[str, str]:
    """Map stream names to roles V/T/S.

    Explicit names v/t/s win; otherwise a unique labels stream becomes T and
    features fill (S, V) in manifest order; otherwise roles follow manifest
    order ((V, T, S) for three streams, (T, S) for two).
    """
    names = [s.name for s in specs]
    lowered = [n.lower() for n in names]
    wanted = {"v", "t", "s"} if len(specs) == 3 else {"t", "s"}
    if set(lowered) == wanted:
        return {name: low.upper() for name, low in zip(names, lowered)}
    label_streams = [s.name for s in specs if s.kind == "labels"]
    if len(label_streams) == 1:
        feature_roles = iter(["S", "V"])
        roles = {}
        for s in specs:
            roles[s.name] = "T" if s.kind == "labels" else next(feature_roles)
        return roles
    order = ["V", "T", "S"] if len(specs) == 3 else ["T", "S"]
    return {name: role for name, role in zip(names, order)}


def _named(e: Exception, name: str) -> ModmiError:
    wrapped = type(e) if isinstance(e, ModmiError) else DataError
    return wrapped(f"stream {name!r}: {e}")


def _prepare(manifest: Manifest, config: AnalysisConfig):
    """Load, resample and truncate all manifest streams to a common grid."""
    if len(manifest.streams) < 2:
        raise DataError(f"analysis needs >= 2 streams, got {len(manifest.streams)}")
    if len(manifest.streams) > 3:
        raise DataError("reports support 2 or 3 streams; larger sets are out of scope")
    rate = config.target_rate_hz if config.target_rate_hz is not None else manifest.target_rate_hz
    loaded = []
    for spec in manifest.streams:
        try:
            loaded.append(resample_nearest(manifest.load_stream(spec), rate))
        except ModmiError as e:
            raise _named(e, spec.name) from e
    rows = min(s.rows for s in loaded)
    loaded = [_truncated(s, rows) for s in loaded]
    roles = _assign_roles(manifest.streams)
    return loaded, roles, rate


def _quantize(spec, stream, config: AnalysisConfig, position: int):
    """Fit/assign one continuous stream; returns (labels, summary fields)."""
    k = spec.clusters if spec.clusters is not None else config.clusters
    try:
        cb = quantizer.fit(
            stream,
            k,
            seed=config.seed + position,
            tol=config.tol,
            max_iter=config.max_iter,
            normalize=config.normalize,
        )
        labels = quantizer.assign(cb, stream)
    except ModmiError as e:
        raise _named(e, spec.name) from e
    digest = hashlib.sha256(quantizer.codebook_to_bytes(cb)).hexdigest()
    return labels, k, digest


def analyze(manifest, config: AnalysisConfig | None = None) -> InfoReport:
    """Run the whole estimation pipeline for one manifest.

    Deterministic given (manifest, config): per-stream fit seeds are
    config.seed + the stream's position in the manifest.
    """
    if not isinstance(manifest, Manifest):
        manifest = load_manifest(manifest)
    if config is None:
        config = AnalysisConfig()
    loaded, roles, rate = _prepare(manifest, config)

    discretized: list[LabelSequence] = []
    summaries: list[StreamSummary] = []
    for position, (spec, stream) in enumerate(zip(manifest.streams, loaded)):
        if isinstance(stream, FeatureMatrix):
            labels, k, digest = _quantize(spec, stream, config, position)
            discretized.append(labels)
            summaries.append(
                StreamSummary(
                    name=spec.name,
                    role=roles[spec.name],
                    kind=spec.kind,
                    rows=stream.rows,
                    dims=stream.dims,
                    clusters=k,
                    distinct=int(np.unique(labels.symbols).size),
                    codebook_sha256=digest,
                )
            )
        else:
            discretized.append(stream)
            summaries.append(
                StreamSummary(
                    name=spec.name,
                    role=roles[spec.name],
                    kind=spec.kind,
                    rows=stream.rows,
                    distinct=int(np.unique(stream.symbols).size),
                )
            )

    by_role = {s.role: seq for s, seq in zip(summaries, discretized)}
    if len(discretized) == 3:
        quantities = infotheory.info_diagram(
            by_role["V"], by_role["T"], by_role["S"], config.log_base
        )
    else:
        quantities = infotheory.pair_quantities(by_role["T"], by_role["S"], config.log_base)
    return InfoReport(
        quantities=quantities,
        streams=tuple(summaries),
        config=replace(config, target_rate_hz=rate),
    )


def sweep_clusters(manifest, config: AnalysisConfig | None, ks: list[int]) -> list[InfoReport]:
    """One analysis per cluster count, sharing seed, alignment and streams.

    Each k overrides the cluster count of every continuous stream (including
    manifest per-stream values); discrete streams are untouched, so their
    entropies are constant down the sweep.
    """
    if not ks:
        raise DataError("sweep needs a non-empty list of cluster counts")
    if not isinstance(manifest, Manifest):
        manifest = load_manifest(manifest)
    if config is None:
        config = AnalysisConfig()
    reports = []
    for k in ks:
        stripped = Manifest(
            target_rate_hz=manifest.target_rate_hz,
            streams=tuple(replace(s, clusters=None) for s in manifest.streams),
        )
        reports.append(analyze(stripped, replace(config, clusters=int(k))))
    return reports
