"""Service configuration: a flat `key = value` text format.

Lines are `key = value`; `#` starts a comment. Tag registrations use
`tags.user.<index> = identity` and `tags.location.<index> = room`. A run is
reproducible from the config plus the stored inputs: every training seed and
pipeline parameter lives here.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from ..errors import ConfigError
from ..location import MatchConfig
from ..signals import FilterConfig, WindowSpec


@dataclass(frozen=True)
class ServiceConfig:
    listen_host: str = "127.0.0.1"
    listen_port: int = 8700
    storage_path: str = "homevitals-store.jsonl"
    window_length_s: float = 90.0
    window_overlap_s: float = 45.0
    filter_order: int = 4
    filter_cutoff_hz: float = 8.0
    match_tolerance_s: float = 5.0
    match_search_window_s: float = 60.0
    label_threshold: float = 0.10
    forest_n_trees: int = 100
    forest_max_depth: int = 12
    forest_min_samples_leaf: int = 3
    bp_segment_s: float = 40.0
    bp_boost_estimators: int = 30
    bp_tree_max_depth: int = 12
    seed: int = 0
    user_tags: dict[int, str] = field(default_factory=dict)
    location_tags: dict[int, str] = field(default_factory=dict)

    @property
    def window_spec(self) -> WindowSpec:
        return WindowSpec(self.window_length_s, self.window_overlap_s)

    @property
    def match_config(self) -> MatchConfig:
        return MatchConfig(self.match_tolerance_s, self.match_search_window_s)

    def filter_config(self, rate_hz: float) -> FilterConfig:
        return FilterConfig.for_rate(rate_hz, self.filter_cutoff_hz, self.filter_order)

    def with_storage(self, path: str | Path) -> "ServiceConfig":
        return replace(self, storage_path=str(path))


_SCALAR_KEYS = {
    "listen_host": str,
    "listen_port": int,
    "storage_path": str,
    "window.length_s": float,
    "window.overlap_s": float,
    "filter.order": int,
    "filter.cutoff_hz": float,
    "match.tolerance_s": float,
    "match.search_window_s": float,
    "label.threshold": float,
    "forest.n_trees": int,
    "forest.max_depth": int,
    "forest.min_samples_leaf": int,
    "bp.segment_s": float,
    "bp.boost_estimators": int,
    "bp.tree_max_depth": int,
    "seed": int,
}

_KEY_TO_FIELD = {key: key.replace(".", "_") for key in _SCALAR_KEYS}


def parse_config(text: str) -> ServiceConfig:
    values: dict[str, object] = {}
    user_tags: dict[int, str] = {}
    location_tags: dict[int, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in _SCALAR_KEYS:
            try:
                values[_KEY_TO_FIELD[key]] = _SCALAR_KEYS[key](value)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc
        elif key.startswith("tags.user."):
            user_tags[int(key.rsplit(".", 1)[1])] = value
        elif key.startswith("tags.location."):
            location_tags[int(key.rsplit(".", 1)[1])] = value
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    return ServiceConfig(user_tags=user_tags, location_tags=location_tags, **values)


def format_config(config: ServiceConfig) -> str:
    lines = []
    for key, caster in _SCALAR_KEYS.items():
        value = getattr(config, _KEY_TO_FIELD[key])
        lines.append(f"{key} = {value}")
    for index, identity in sorted(config.user_tags.items()):
        lines.append(f"tags.user.{index} = {identity}")
    for index, room in sorted(config.location_tags.items()):
        lines.append(f"tags.location.{index} = {room}")
    return "\n".join(lines) + "\n"


def load_config(path: str | Path) -> ServiceConfig:
    return parse_config(Path(path).read_text())


def save_config(config: ServiceConfig, path: str | Path) -> None:
    Path(path).write_text(format_config(config))
