"""YAML experiment configuration.

Every key has a default, so an empty (or absent) file yields a runnable
config.  Unknown keys are rejected rather than ignored; a typo should fail
loudly, not silently run the default.
"""

from __future__ import annotations

from pathlib import Path

import yaml

from .errors import ConfigError
from .grid import GridSpec
from .simulation import ALGORITHMS, CorpusSource, ExperimentConfig, SynthParams

_TOP_KEYS = {
    "seed",
    "repetitions",
    "workers",
    "grid",
    "history",
    "k_values",
    "path_lengths",
    "algorithms",
    "pool_multiplier",
    "exhaustive_subset_cap",
    "adaptive_adversary",
    "rdg_carry",
}
_GRID_KEYS = {"n", "origin_lat", "origin_lon", "cell_size_km"}
_HISTORY_KEYS = {
    "source",
    "skew",
    "locality",
    "cluster_radius",
    "trunk_bias",
    "trunk_span",
    "trunk_fanout",
    "records",
    "record_length",
    "path",
}


def _check_keys(section: dict, allowed: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} keys: {sorted(unknown)}")


def build_config(data: dict | None) -> ExperimentConfig:
    """Construct an ExperimentConfig from a parsed mapping."""
    data = data or {}
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    _check_keys(data, _TOP_KEYS, "config")

    grid_data = data.get("grid") or {}
    hist_data = data.get("history") or {}
    if not isinstance(grid_data, dict) or not isinstance(hist_data, dict):
        raise ConfigError("'grid' and 'history' must be mappings")
    _check_keys(grid_data, _GRID_KEYS, "grid")
    _check_keys(hist_data, _HISTORY_KEYS, "history")

    try:
        grid = GridSpec(
            n=int(grid_data.get("n", 16)),
            origin_lat=float(grid_data.get("origin_lat", 0.0)),
            origin_lon=float(grid_data.get("origin_lon", 0.0)),
            cell_size_km=float(grid_data.get("cell_size_km", 0.01)),
        )
        source = hist_data.get("source", "synthetic")
        if source == "synthetic":
            synth_kwargs: dict = {}
            for key, conv in (
                ("skew", float),
                ("locality", float),
                ("cluster_radius", float),
                ("trunk_bias", float),
                ("trunk_span", int),
                ("trunk_fanout", int),
                ("records", int),
                ("record_length", int),
            ):
                if key in hist_data:
                    synth_kwargs[key] = conv(hist_data[key])
            history: SynthParams | CorpusSource = SynthParams(**synth_kwargs)
        elif source == "corpus":
            if "path" not in hist_data:
                raise ConfigError("history.source 'corpus' needs history.path")
            history = CorpusSource(path=str(hist_data["path"]))
        else:
            raise ConfigError(f"unknown history.source {source!r}")

        cfg = ExperimentConfig(
            grid=grid,
            history_source=history,
            k_values=tuple(int(k) for k in data.get("k_values", range(2, 31))),
            path_lengths=tuple(
                int(l) for l in data.get("path_lengths", (2, 3, 4))
            ),
            repetitions=int(data.get("repetitions", 300)),
            algorithms=tuple(data.get("algorithms", ALGORITHMS)),
            seed=int(data.get("seed", 0)),
            pool_multiplier=int(data.get("pool_multiplier", 4)),
            exhaustive_subset_cap=int(data.get("exhaustive_subset_cap", 1000)),
            adaptive_adversary=bool(data.get("adaptive_adversary", False)),
            rdg_carry=str(data.get("rdg_carry", "posterior")),
            workers=int(data.get("workers", 1)),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad config value: {exc}") from exc
    return cfg


def load_config(path: str | Path | None) -> ExperimentConfig:
    """Load a YAML config file; None loads the all-defaults config."""
    if path is None:
        return build_config({})
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    return build_config(data)
