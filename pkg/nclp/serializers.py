"""JSON and CSV formats for matrices, densities, subspace bases and report streams."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np
import pandas as pd

from config import settings

from .density import Density, make_density
from .embedding import SubspaceBasis
from .exceptions import InvalidParameter, NotNormalized, ReportIOError
from .matcore import SquareMatrix, as_square_matrix

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv")


# --- files -------------------------------------------------------------------

def _entries_text(entries) -> str:
    return "[" + ", ".join(f"[{float(re):.17g}, {float(im):.17g}]" for re, im in entries) + "]"


def dumps_json(payload: Any) -> str:
    """Indented JSON; matrix entries are written with 17 significant digits."""
    chunks: dict[str, str] = {}

    def swap(obj):
        if isinstance(obj, Mapping):
            out = {k: swap(v) for k, v in obj.items()}
            if "dim" in obj and "entries" in obj:
                key = f"@entries-{len(chunks)}@"
                chunks[key] = _entries_text(obj["entries"])
                out["entries"] = key
            return out
        if isinstance(obj, (list, tuple)):
            return [swap(v) for v in obj]
        return obj

    text = json.dumps(swap(payload), indent=2)
    for key, chunk in chunks.items():
        text = text.replace(json.dumps(key), chunk)
    return text


def write_json(path: str | Path, payload: Any):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps_json(payload) + "\n")
    except OSError as exc:
        raise ReportIOError(f"cannot write {path}: {exc}") from exc


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise ReportIOError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidParameter(f"{path} is not valid JSON: {exc}") from exc


# --- matrices ----------------------------------------------------------------

def matrix_to_dict(x) -> dict:
    """{"dim": n, "entries": [[re, im], ...]} with the n² entries in row-major order."""
    x = as_square_matrix(x)
    return {
        "dim": int(x.shape[0]),
        "entries": [[float(v.real), float(v.imag)] for v in x.ravel()],
    }


def matrix_from_dict(data: Mapping) -> SquareMatrix:
    """Accepts the flat row-major pair list, or one list of pairs per row."""
    try:
        n = int(data["dim"])
        entries = np.asarray(data["entries"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidParameter(f"malformed matrix record: {exc}") from exc
    if entries.shape == (n * n, 2):
        entries = entries.reshape(n, n, 2)
    if entries.shape != (n, n, 2):
        raise InvalidParameter(f"matrix entries have shape {entries.shape}, expected ({n * n}, 2) or ({n}, {n}, 2)")
    return as_square_matrix(entries[..., 0] + 1j * entries[..., 1])


def save_matrix(path: str | Path, x):
    write_json(path, matrix_to_dict(x))


def load_matrix(path: str | Path) -> SquareMatrix:
    return matrix_from_dict(read_json(path))


# --- densities ---------------------------------------------------------------

def density_to_dict(d: Density, trace_tol: float = settings.TRACE_TOL) -> dict:
    payload = matrix_to_dict(d.matrix)
    payload["trace_tol"] = float(trace_tol)
    payload["blocks"] = d.blocks.export()
    return payload


def density_from_dict(data: Mapping) -> Density:
    """Rebuild a density; a trace off by more than the stored trace_tol is rejected."""
    x = matrix_from_dict(data)
    trace_tol = float(data.get("trace_tol", settings.TRACE_TOL))
    trace = complex(np.trace(x))
    if abs(trace - 1.0) > trace_tol:
        raise NotNormalized(f"stored density has trace {trace.real:.15g}{trace.imag:+.3g}j")
    return make_density(x)


def save_density(path: str | Path, d: Density):
    write_json(path, density_to_dict(d))


def load_density(path: str | Path) -> Density:
    return density_from_dict(read_json(path))


# --- subspace bases ----------------------------------------------------------

def load_basis(manifest: str | Path) -> SubspaceBasis:
    """Read {"vectors": ["b0.json", ...]}; paths are relative to the manifest."""
    manifest = Path(manifest)
    data = read_json(manifest)
    try:
        files = list(data["vectors"])
    except (KeyError, TypeError) as exc:
        raise InvalidParameter(f"{manifest} does not list any vectors") from exc
    vectors = [load_matrix(manifest.parent / name) for name in files]
    logger.info(f"loaded subspace basis of {len(vectors)} vectors from {manifest}")
    return SubspaceBasis(tuple(vectors))


def save_basis(manifest: str | Path, basis: SubspaceBasis):
    manifest = Path(manifest)
    names = []
    for k, v in enumerate(basis.vectors):
        name = f"{manifest.stem}-{k}.json"
        save_matrix(manifest.parent / name, v)
        names.append(name)
    write_json(manifest, {"vectors": names})


# --- report streams ----------------------------------------------------------

def repro_path(out: str | Path, check_name: str, trial: int) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".repro") / f"{check_name}-{trial}.json"


def write_repro(out: str | Path, record: Mapping, inputs: Mapping[str, SquareMatrix]) -> Path:
    """Dump a failing trial with every input matrix so it can be replayed."""
    path = repro_path(out, record["check_name"], record["trial"])
    write_json(path, {
        "record": dict(record),
        "inputs": {name: matrix_to_dict(x) for name, x in inputs.items()},
    })
    return path


def dumps_records(records: Iterable[Mapping], fmt: str = "json") -> str:
    """Newline-delimited JSON, or a CSV table of the scalar fields."""
    records = list(records)
    if fmt == "json":
        return "".join(json.dumps(dict(r)) + "\n" for r in records)
    if fmt == "csv":
        rows = []
        for r in records:
            row = dict(r)
            for key in ("p_q_params", "notes"):
                if key in row:
                    row[key] = ";".join(str(v) for v in row[key])
            rows.append(row)
        return pd.DataFrame(rows).to_csv(index=False)
    raise InvalidParameter(f"format must be one of {', '.join(FORMATS)}, got {fmt!r}")


def write_records(path: str | Path, records: Iterable[Mapping], fmt: str = "json"):
    text = dumps_records(records, fmt)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise ReportIOError(f"cannot write {path}: {exc}") from exc


def read_records(path: str | Path) -> list[dict]:
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ReportIOError(f"cannot read {path}: {exc}") from exc
    return [json.loads(line) for line in lines if line.strip()]
