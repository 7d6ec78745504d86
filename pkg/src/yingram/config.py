"""Shared analysis configuration with the package-wide defaults."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from .grid import NoteGrid, tau_max_for

__all__ = ["AnalysisConfig", "load_config_file"]


@dataclass(frozen=True)
class AnalysisConfig:
    """Every tunable of the analysis pipeline; reports echo the resolved
    values so results stay reproducible."""

    sample_rate: int = 22050
    window: int = 2048
    hop: int = 256
    start_note: int = -5
    num_channels: int = 80
    bins_per_octave: int = 24
    reference_note: int = 69
    reference_hz: float = 440.0
    lambda_yin: float = 45.0
    f0_threshold: float = 0.1
    voicing_cutoff: float = 0.25
    f_min: float = 52.0
    f_max: float = 508.0
    shift_tolerance: float = 0.5  # semitones
    min_overlap: float = 0.5
    seed: int = 0

    @property
    def grid(self) -> NoteGrid:
        return NoteGrid(
            start_note=self.start_note,
            num_channels=self.num_channels,
            bins_per_octave=self.bins_per_octave,
            reference_note=self.reference_note,
            reference_hz=self.reference_hz,
        )

    @property
    def tau_max(self) -> int:
        return tau_max_for(self.grid, self.sample_rate)

    @property
    def frame_length(self) -> int:
        return self.window + self.tau_max

    def replace(self, **overrides) -> "AnalysisConfig":
        return dataclasses.replace(self, **overrides)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(AnalysisConfig)}
_INT_FIELDS = {name for name, t in _FIELD_TYPES.items() if t == "int"}


def _coerce(name: str, value) -> int | float:
    if name not in _FIELD_TYPES:
        raise ValueError(f"unknown config key: {name}")
    return int(value) if name in _INT_FIELDS else float(value)


def load_config_file(path: str | Path, base: AnalysisConfig | None = None) -> AnalysisConfig:
    """Read a config file, either JSON or key=value lines, over `base`.

    Unknown keys are rejected so typos fail loudly.
    """
    text = Path(path).read_text()
    overrides: dict = {}
    stripped = text.lstrip()
    if stripped.startswith("{"):
        for key, value in json.loads(text).items():
            overrides[key] = _coerce(key, value)
    else:
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line {lineno}: {line!r}")
            key, _, value = line.partition("=")
            overrides[key.strip()] = _coerce(key.strip(), value.strip())
    return (base or AnalysisConfig()).replace(**overrides)
