"""Experiment report container with deterministic serialization.

CSV output is byte-identical for identical (seed, parameters, grid):
floats are rendered with repr (shortest round-trip), header keys are
sorted, and the wall-clock time is kept out of the CSV (it lives only
in the JSON sidecar).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .conventions import VERSION as CONVENTIONS_VERSION

__all__ = ["ExperimentReport", "format_value"]


def format_value(x) -> str:
    if isinstance(x, bool):
        return str(x)
    if isinstance(x, float):
        # np.float64 subclasses float; coerce so repr is the plain
        # shortest round-trip form
        return repr(float(x))
    if isinstance(x, int):
        return str(x)
    try:
        import numpy as np

        if isinstance(x, np.integer):
            return str(int(x))
        if isinstance(x, np.floating):
            return repr(float(x))
    except ImportError:  # pragma: no cover
        pass
    return str(x)


@dataclass
class ExperimentReport:
    """Rows of (parameters, measured LHS, RHS, ratio) plus provenance.

    Every row is reproducible from (seed, parameters, grid); the random
    data model is Gaussian block fields, so reported suprema are
    empirical, not worst-case (recorded in the header caveat).
    """

    experiment: str
    columns: list
    rows: list = field(default_factory=list)
    seed: int = 0
    grid_desc: str = ""
    wall_clock: float = 0.0
    extra: dict = field(default_factory=dict)

    def add_row(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(
                f"row has {len(values)} values for {len(self.columns)} columns"
            )
        self.rows.append(tuple(values))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def validate_finite(self, name: str = "ratio") -> None:
        """Abort (raise) on any non-finite value in the named column."""
        import numpy as np

        vals = np.asarray(self.column(name), dtype=float)
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise FloatingPointError(
                f"{self.experiment}: non-finite {name} in row {bad}: {self.rows[bad]}"
            )

    def header_items(self) -> list:
        base = {
            "experiment": self.experiment,
            "conventions_version": CONVENTIONS_VERSION,
            "seed": self.seed,
            "grid": self.grid_desc,
            "data_model": "gaussian block fields; empirical suprema only",
        }
        base.update(self.extra)
        return sorted(base.items())

    def to_csv(self) -> str:
        lines = [f"# {k} = {format_value(v)}" for k, v in self.header_items()]
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(format_value(v) for v in row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = dict(self.header_items())
        payload["wall_clock_seconds"] = self.wall_clock
        payload["columns"] = list(self.columns)
        payload["rows"] = [[_jsonable(v) for v in row] for row in self.rows]
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def write(self, out_dir, stem: str | None = None) -> tuple:
        import os

        stem = stem or self.experiment
        os.makedirs(out_dir, exist_ok=True)
        csv_path = os.path.join(out_dir, stem + ".csv")
        json_path = os.path.join(out_dir, stem + ".json")
        with open(csv_path, "w") as fh:
            fh.write(self.to_csv())
        with open(json_path, "w") as fh:
            fh.write(self.to_json())
        return csv_path, json_path


def _jsonable(v):
    import numpy as np

    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v
