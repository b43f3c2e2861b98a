"""Diagnostics reports: a deterministic JSON payload, a metadata block and one CSV per curve."""

import json
import logging
import math
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional

import numpy as np
import pandas as pd

from gchains import __version__
from gchains.config import Config
from gchains.kernels.series import INCONCLUSIVE

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = '%.17g'


def to_jsonable(value):
    """Plain JSON types; NaN and infinities become null."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, pd.DataFrame):
        return [to_jsonable(r) for r in value.to_dict(orient='records')]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


@dataclass
class DiagnosticsReport:
    name: str
    kind: str
    anchor: str
    config: dict
    model: dict
    root_seed: int
    overrides: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    curves: dict = field(default_factory=dict)
    caveats: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def inconclusive(self) -> bool:
        return any(v == INCONCLUSIVE for v in self.verdicts.values())

    def add_curve(self, key: str, frame: pd.DataFrame):
        self.curves[key] = frame

    def payload(self) -> dict:
        """Everything that depends on the configuration only; no clocks, no worker counts."""
        return to_jsonable({
            'schema_version': Config.SCHEMA_VERSION,
            'name': self.name,
            'kind': self.kind,
            'anchor': self.anchor,
            'root_seed': self.root_seed,
            'config': self.config,
            'overrides': self.overrides,
            'model': self.model,
            'verdicts': self.verdicts,
            'results': self.results,
            'curves': {k: self.curves[k] for k in sorted(self.curves)},
            'caveats': self.caveats,
        })

    def payload_json(self) -> str:
        return json.dumps(self.payload(), sort_keys=True, indent=2, allow_nan=False)

    def stamp(self, started: datetime, workers: int, wall_time: float):
        self.metadata = {
            'started': started.isoformat(),
            'finished': datetime.now(timezone.utc).isoformat(),
            'wall_time': wall_time,
            'workers': workers,
            'version': __version__,
        }

    def write(self, out_dir: Optional[str] = None) -> str:
        """Write <out>/<name>/report.json and <out>/<name>/<curve>.csv; returns the report directory."""
        target = os.path.join(out_dir or Config.OUTPUT_DIR, self.name)
        os.makedirs(target, exist_ok=True)
        document = {'payload': self.payload(), 'metadata': to_jsonable(self.metadata)}
        with open(os.path.join(target, 'report.json'), 'w') as f:
            json.dump(document, f, sort_keys=True, indent=2, allow_nan=False)
            f.write('\n')
        for key, frame in sorted(self.curves.items()):
            frame.to_csv(os.path.join(target, f"{key}.csv"), index=False, float_format=CSV_FLOAT_FORMAT)
        logger.info("[report] wrote %s (%d curves)", target, len(self.curves))
        return target


def load_report(path: str) -> dict:
    with open(path) as f:
        return json.load(f)
