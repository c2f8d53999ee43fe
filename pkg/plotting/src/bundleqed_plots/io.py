"""Readers for the bundleqed CSV/JSON output schemas.

This package renders what the simulation CLI wrote; it never computes
physics.  The only transformations applied here are unit relabelings based
on metadata the files themselves carry (hbar constant, g, gamma).
"""

import csv
import json

import numpy as np


class SchemaError(ValueError):
    """An input file is missing required columns or metadata."""


def read_table(path):
    """Parse a '#'-metadata CSV into (meta, header, columns).

    Columns come back as float arrays with NaN for blank fields; purely
    textual columns (e.g. status) stay as object arrays.
    """
    meta, header, rows = {}, None, []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = value
                continue
            cells = next(csv.reader([line]))
            if header is None:
                header = cells
                continue
            rows.append(cells)
    if header is None:
        raise SchemaError(f"{path}: no header row found")
    columns = {}
    for j, name in enumerate(header):
        raw = [row[j] if j < len(row) else "" for row in rows]
        try:
            columns[name] = np.array(
                [np.nan if cell == "" else float(cell) for cell in raw])
        except ValueError:
            columns[name] = np.array(raw, dtype=object)
    return meta, header, columns


def require_columns(columns, names, path):
    missing = [name for name in names if name not in columns]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing}; "
                          f"have {sorted(columns)}")


def meta_float(meta, key, path):
    if key not in meta:
        raise SchemaError(f"{path}: missing metadata '{key}'")
    return float(meta[key])


def energy_label(meta):
    return "meV" if meta.get("unit_system", "per_ps") == "per_ps" else "ueV"


def read_steady_json(path):
    with open(path) as fh:
        payload = json.load(fh)
    for key in ("P", "params"):
        if key not in payload:
            raise SchemaError(f"{path}: missing key '{key}'")
    return payload


def read_wigner_csv(path):
    """Reshape the flat re/im/w table back onto its rectangular grid."""
    meta, _header, columns = read_table(path)
    require_columns(columns, ["re_alpha", "im_alpha", "w"], path)
    re_axis = np.unique(columns["re_alpha"])
    im_axis = np.unique(columns["im_alpha"])
    values = np.full((len(im_axis), len(re_axis)), np.nan)
    iy = np.searchsorted(im_axis, columns["im_alpha"])
    ix = np.searchsorted(re_axis, columns["re_alpha"])
    values[iy, ix] = columns["w"]
    if np.any(np.isnan(values)):
        raise SchemaError(f"{path}: grid is not a complete rectangle")
    return meta, re_axis, im_axis, values
