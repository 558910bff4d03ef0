"""Run records (JSON) and trajectory tables (CSV)."""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__

TRAJECTORY_COLUMNS = (
    "t",
    "t_tilde",
    "omega_t",
    "coupling_t",
    "X",
    "Y",
    "Z",
    "U_over_Eg",
    "nu",
    "thermal_residual_y",
    "thermal_residual_hyp",
)


def to_plain(obj):
    """Convert dataclasses, numpy scalars/arrays and enums to JSON-ready values."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


@dataclass
class RunRecord:
    command: str
    parameters: dict
    outputs: dict
    tool_version: str = __version__
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))

    def to_json(self, indent: int | None = 2) -> str:
        # repr-based float output is the shortest string that round-trips exactly
        return json.dumps(to_plain(dataclasses.asdict(self)), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        data = json.loads(text)
        return cls(**data)

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "RunRecord":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


def trajectory_rows(traj):
    """Yield one tuple per sample, in ``TRAJECTORY_COLUMNS`` order."""
    w0 = traj.base_omega
    e_g = 0.5 * w0
    hyp = np.abs(traj.x**2 - traj.z**2 - 1.0)
    nu = traj.nu
    for i in range(len(traj)):
        yield (
            traj.t[i],
            traj.t[i] * w0 / (2 * math.pi),
            traj.omega[i],
            traj.coupling[i],
            traj.x[i],
            traj.y[i],
            traj.z[i],
            traj.energy[i] / e_g,
            nu[i],
            abs(traj.y[i]),
            hyp[i],
        )


def write_trajectory_csv(traj, fh, extra: dict | None = None) -> None:
    """
    Write ``traj`` as CSV.  ``extra`` maps an additional column name to a
    per-row sequence of strings, appended after the standard columns.
    """
    writer = csv.writer(fh, lineterminator="\n")
    extra = extra or {}
    writer.writerow(list(TRAJECTORY_COLUMNS) + list(extra))
    extra_cols = list(extra.values())
    for i, row in enumerate(trajectory_rows(traj)):
        writer.writerow([repr(float(v)) for v in row] + [col[i] for col in extra_cols])


def trajectory_csv(traj, extra: dict | None = None) -> str:
    buf = io.StringIO()
    write_trajectory_csv(traj, buf, extra)
    return buf.getvalue()


def read_trajectory_csv(fh) -> tuple[list[str], list[dict]]:
    reader = csv.DictReader(fh)
    return list(reader.fieldnames or []), list(reader)
