"""File artifacts: deterministic JSON, spectrum CSV, binary PGM rasters
and per-run manifests.  All writes are atomic (temp file + rename) and all
floats serialize via Python's shortest round-trip repr."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .eigensolve import FilteredSpectrum
from .inequalities import ExclusionRaster


def json_dumps(data) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def atomic_write_bytes(path: str | Path, payload: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: str | Path, payload: str) -> None:
    atomic_write_bytes(path, payload.encode("utf-8"))


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def spectrum_csv(filtered: FilteredSpectrum) -> str:
    """Rows `re,im,kept(0|1),reason`, kept first, then rejects."""
    lines = ["re,im,kept,reason"]
    for z in filtered.kept:
        lines.append(f"{z.real!r},{z.imag!r},1,")
    for rej in filtered.rejected:
        lines.append(f"{rej.value.real!r},{rej.value.imag!r},0,{rej.reason}")
    return "\n".join(lines) + "\n"


def write_pgm(path: str | Path, raster: ExclusionRaster) -> None:
    """Binary PGM (P5), 255 = excluded pixel, 0 = allowed.  Row 0 is the
    top of the window (im_max)."""
    ny, nx = raster.mask.shape
    header = f"P5\n{nx} {ny}\n255\n".encode("ascii")
    body = np.where(raster.mask, 255, 0).astype(np.uint8).tobytes(order="C")
    atomic_write_bytes(path, header + body)


def raster_sidecar(raster: ExclusionRaster) -> dict:
    return {
        "window": list(raster.window),
        "resolution": list(raster.resolution),
        "gamma": raster.gamma,
        "norms": raster.norms,
        "encoding": {"format": "P5", "excluded": 255, "allowed": 0, "row0": "im_max"},
    }


@dataclass
class RunManifest:
    command: str
    inputs: dict = field(default_factory=dict)  # path -> sha256
    seed: Optional[int] = None
    version: str = ""
    wall_time_s: float = 0.0
    outputs: list = field(default_factory=list)

    def add_input(self, path: str | Path) -> None:
        self.inputs[str(path)] = sha256_file(path)

    def to_json_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "seed": self.seed,
            "version": self.version,
            "wall_time_s": self.wall_time_s,
            "outputs": [str(p) for p in self.outputs],
        }

    def write(self, path: str | Path) -> None:
        atomic_write_text(path, json_dumps(self.to_json_dict()))


class Stopwatch:
    def __enter__(self) -> "Stopwatch":
        self._start = time.monotonic()
        self.elapsed = 0.0
        return self

    def __exit__(self, *exc) -> None:
        self.elapsed = time.monotonic() - self._start
