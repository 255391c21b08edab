"""Delimited-table output and spectrum ingestion."""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np


def write_table(path, header: list[str], columns) -> Path:
    """Write columns as comma-delimited text with a plain header row.

    Header entries name the columns including units (e.g. ``tau_s``,
    ``deviation``); all columns must share one length.
    """
    path = Path(path)
    cols = [np.asarray(c) for c in columns]
    if len(cols) != len(header):
        raise ValueError("one header entry per column required")
    if any(c.shape != cols[0].shape for c in cols):
        raise ValueError("columns must share one length")
    data = np.column_stack(cols)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, data, delimiter=",", header=",".join(header),
               comments="", fmt="%.12g")
    return path


def read_table(path):
    """Read a table written by :func:`write_table`; returns (header, data)."""
    path = Path(path)
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def read_psd_table(path):
    """Two-column (frequency_Hz, density) spectrum file, comma or
    whitespace delimited; '#' comments and one header row are allowed."""
    path = Path(path)
    data = None
    for delimiter in (",", None):
        for skip in (0, 1):
            try:
                data = np.loadtxt(path, delimiter=delimiter, skiprows=skip,
                                  ndmin=2)
                break
            except ValueError:
                continue
        if data is not None:
            break
    if data is None or data.ndim != 2 or data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns (frequency, density)")
    freqs, density = data[:, 0], data[:, 1]
    if np.any(np.diff(freqs) <= 0):
        raise ValueError(f"{path}: frequencies must increase")
    if np.any(density < 0):
        raise ValueError(f"{path}: density must be non-negative")
    return freqs, density


def file_digest(path) -> str:
    """Hex SHA-256 digest of a file's bytes."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()
