"""Trace and dataset file formats.

Three formats are read and written here, and nowhere else:

* trace CSV: header ``freq_hz,s21_re,s21_im``, UTF-8, '.' decimal, LF or
  CRLF line endings;
* Touchstone v1, 2-port subset (``.s2p``): S21 extracted from the 8-column
  data lines, Hz/kHz/MHz/GHz unit honored, RI/MA/DB formats converted to
  real/imaginary;
* sweep manifest: JSON listing per-power trace files with their metadata.

Frequencies live in Hz inside the files and are converted to angular
internal payloads at this boundary.  Floats are written with 17 significant
digits so a write/parse cycle is bit-exact.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import TWO_PI, ComplexTrace, PowerSweep
from .errors import DataFormatError
from .trace_fit import DEFAULT_ATTENUATION_DB, calibrate_power

TRACE_CSV_COLUMNS = ("freq_hz", "s21_re", "s21_im")
QI_CSV_COLUMNS = ("n_ph", "qi")
SIM_CSV_COLUMNS = ("ls_h_per_sq", "f0_hz")

MANIFEST_SCHEMA_VERSION = 1

_TOUCHSTONE_UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}


@dataclass
class TraceFile:
    """A trace file on disk plus the acquisition metadata not stored in it."""

    path: str | Path
    format: str = "auto"  # csv | touchstone | auto (by extension)
    power_dbm: float | None = None
    attenuation_db: float = DEFAULT_ATTENUATION_DB
    temperature_k: float | None = None
    sweep_direction: str = "up"
    device_id: str | None = None
    extra: dict = field(default_factory=dict)

    def resolved_format(self):
        if self.format != "auto":
            return self.format
        suffix = Path(self.path).suffix.lower()
        return "touchstone" if suffix in (".s2p", ".snp", ".ts") else "csv"


def _fmt(x):
    return f"{x:.17g}"


def _parse_float(token, path, line_no, column):
    try:
        value = float(token)
    except ValueError:
        raise DataFormatError(
            f"column {column!r}: cannot parse {token!r} as a number",
            line=line_no,
            path=path,
        ) from None
    if not math.isfinite(value):
        raise DataFormatError(
            f"column {column!r}: non-finite value {token!r}",
            line=line_no,
            path=path,
        )
    return value


def read_columns_csv(path, columns):
    """Strict CSV reader: exact header, float cells, error with line number."""
    path = Path(path)
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise DataFormatError("empty file", path=path)
    header = tuple(name.strip() for name in lines[0].split(","))
    if header != tuple(columns):
        raise DataFormatError(
            f"expected header {','.join(columns)!r}, got {lines[0]!r}",
            line=1,
            path=path,
        )
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != len(columns):
            raise DataFormatError(
                f"expected {len(columns)} columns, got {len(cells)}",
                line=line_no,
                path=path,
            )
        rows.append(
            [
                _parse_float(cell.strip(), path, line_no, col)
                for cell, col in zip(cells, columns)
            ]
        )
    if not rows:
        raise DataFormatError("no data rows", path=path)
    return np.asarray(rows, dtype=float)


def read_trace_csv(path):
    """(freq_hz, s21) arrays from a trace CSV."""
    data = read_columns_csv(path, TRACE_CSV_COLUMNS)
    freq = data[:, 0]
    if np.any(np.diff(freq) <= 0):
        raise DataFormatError("frequency column must be strictly increasing", path=path)
    return freq, data[:, 1] + 1j * data[:, 2]


def write_trace_csv(trace: ComplexTrace, path):
    path = Path(path)
    lines = [",".join(TRACE_CSV_COLUMNS)]
    for f, z in zip(trace.freq_hz, trace.s21):
        lines.append(f"{_fmt(f)},{_fmt(z.real)},{_fmt(z.imag)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_touchstone_s21(path):
    """(freq_hz, s21) from a 2-port Touchstone v1 file."""
    path = Path(path)
    unit_scale = 1e9  # touchstone default unit is GHz
    fmt = "MA"  # touchstone default format
    freqs, s21 = [], []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("!", 1)[0].strip()
            if not line:
                continue
            if line.startswith("#"):
                tokens = line[1:].upper().split()
                for tok in tokens:
                    if tok in _TOUCHSTONE_UNITS:
                        unit_scale = _TOUCHSTONE_UNITS[tok]
                    elif tok in ("RI", "MA", "DB"):
                        fmt = tok
                    elif tok not in ("S", "R") and not _is_number(tok):
                        raise DataFormatError(
                            f"unsupported option token {tok!r}",
                            line=line_no,
                            path=path,
                        )
                continue
            cells = line.split()
            if len(cells) != 9:
                raise DataFormatError(
                    f"expected 9 columns of 2-port data, got {len(cells)}",
                    line=line_no,
                    path=path,
                )
            values = [
                _parse_float(c, path, line_no, f"col{j}")
                for j, c in enumerate(cells)
            ]
            freqs.append(values[0] * unit_scale)
            a, b = values[3], values[4]  # S21 pair
            if fmt == "RI":
                s21.append(a + 1j * b)
            elif fmt == "MA":
                s21.append(a * np.exp(1j * np.deg2rad(b)))
            else:  # DB
                s21.append(10.0 ** (a / 20.0) * np.exp(1j * np.deg2rad(b)))
    if not freqs:
        raise DataFormatError("no data rows", path=path)
    freq = np.asarray(freqs)
    if np.any(np.diff(freq) <= 0):
        raise DataFormatError("frequency column must be strictly increasing", path=path)
    return freq, np.asarray(s21, dtype=complex)


def _is_number(token):
    try:
        float(token)
        return True
    except ValueError:
        return False


def parse_trace(file: TraceFile) -> ComplexTrace:
    """Read a trace file into the internal representation.

    The device-plane power is computed here from (power_dbm,
    attenuation_db), keeping the fitting layer unit-clean.
    """
    fmt = file.resolved_format()
    if fmt == "csv":
        freq_hz, s21 = read_trace_csv(file.path)
    elif fmt == "touchstone":
        freq_hz, s21 = read_touchstone_s21(file.path)
    else:
        raise DataFormatError(f"unknown trace format {fmt!r}", path=file.path)
    power_w = (
        calibrate_power(file.power_dbm, file.attenuation_db).watts
        if file.power_dbm is not None
        else None
    )
    return ComplexTrace(
        omega=TWO_PI * freq_hz,
        s21=s21,
        power_w=power_w,
        power_dbm=file.power_dbm,
        attenuation_db=file.attenuation_db,
        temperature_k=file.temperature_k,
        sweep_direction=file.sweep_direction,
        device_id=file.device_id,
    )


def write_sweep(sweep: PowerSweep, out_dir, name="sweep") -> Path:
    """Write a power sweep as per-trace CSVs plus a JSON manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, trace in enumerate(sweep.traces):
        fname = f"{name}_trace_{i:03d}.csv"
        write_trace_csv(trace, out_dir / fname)
        entry = {"path": fname}
        if trace.power_dbm is not None:
            entry["power_dbm"] = trace.power_dbm
        entries.append(entry)
    first = sweep.traces[0] if sweep.traces else None
    manifest = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "device_id": sweep.device_id,
        "attenuation_db": (
            first.attenuation_db
            if first is not None and first.attenuation_db is not None
            else DEFAULT_ATTENUATION_DB
        ),
        "temperature_k": first.temperature_k if first is not None else None,
        "sweep_direction": first.sweep_direction if first is not None else "up",
        "traces": entries,
    }
    manifest_path = out_dir / f"{name}.json"
    manifest_path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest_path


def load_sweep_manifest(path) -> PowerSweep:
    """Read a sweep manifest and all trace files it references."""
    path = Path(path)
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"invalid JSON: {exc}", path=path) from None
    if not isinstance(manifest.get("traces"), list) or not manifest["traces"]:
        raise DataFormatError("manifest has no 'traces' list", path=path)
    attenuation = manifest.get("attenuation_db", DEFAULT_ATTENUATION_DB)
    traces = []
    for entry in manifest["traces"]:
        traces.append(
            parse_trace(
                TraceFile(
                    path=path.parent / entry["path"],
                    format="auto",
                    power_dbm=entry.get("power_dbm"),
                    attenuation_db=attenuation,
                    temperature_k=manifest.get("temperature_k"),
                    sweep_direction=manifest.get("sweep_direction", "up"),
                    device_id=manifest.get("device_id"),
                )
            )
        )
    return PowerSweep(traces=tuple(traces), device_id=manifest.get("device_id"))


def read_pairs_csv(path, columns):
    """Generic two-column reader for (n_ph, qi)-style files."""
    data = read_columns_csv(path, columns)
    return [(float(a), float(b)) for a, b in data]


def write_pairs_csv(pairs, path, columns):
    path = Path(path)
    lines = [",".join(columns)]
    for a, b in pairs:
        lines.append(f"{_fmt(a)},{_fmt(b)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
