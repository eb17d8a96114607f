"""Machine-readable result reports and the ageing comparison.

Reports are deterministic given inputs and seed: JSON with sorted keys and
repr-precision floats (no timestamps), plus a CSV mirror of the per-device
parameter table.  Keys of dimensioned quantities carry unit suffixes; the
``units`` block maps every tabulated field to its unit ("1" when
dimensionless).
"""

import csv
import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .data import TWO_PI, ComplexTrace
from .errors import InvalidParameterError

REPORT_SCHEMA_VERSION = 1

#: Per-device table mirroring the reference device-parameter layout.
TABLE_COLUMNS = (
    "device_id",
    "width_nm",
    "f0_ghz",
    "kappa_khz",
    "gamma_khz",
    "kerr_hz",
    "f_delta_tls",
    "n_c",
    "delta_f_age_mhz",
)

UNITS = {
    "device_id": "",
    "width_nm": "nm",
    "f0_ghz": "GHz",
    "kappa_khz": "kHz",
    "gamma_khz": "kHz",
    "kerr_hz": "Hz",
    "f_delta_tls": "1",
    "n_c": "1",
    "delta_f_age_mhz": "MHz",
}


@dataclass
class PerPowerEntry:
    """Per-drive-power results of a global fit."""

    power_dbm: float | None
    power_w: float
    n_ph: float
    n_cavity_peak: float
    gamma_hz: float
    gamma_hz_err: float
    qi: float


@dataclass
class DeviceReport:
    """Fitted parameters of one device, Hz-denominated for the outside world."""

    device_id: str
    f0_hz: float
    kappa_hz: float
    gamma_hz: float
    kerr_hz: float | None = None
    width_nm: float | None = None
    f0_hz_err: float = 0.0
    kappa_hz_err: float = 0.0
    gamma_hz_err: float = 0.0
    kerr_hz_err: float | None = None
    kerr_hz_sys_lo: float | None = None
    kerr_hz_sys_hi: float | None = None
    phi_rad: float = 0.0
    f_delta_tls: float | None = None
    f_delta_tls_err: float | None = None
    n_c: float | None = None
    n_c_err: float | None = None
    beta: float | None = None
    delta_f_age_hz: float | None = None
    converged: bool = True
    per_power: list = field(default_factory=list)


@dataclass
class Report:
    """Top-level run report."""

    devices: list
    seed: int | None = None
    input_digests: dict = field(default_factory=dict)
    tool_version: str = __version__
    schema_version: int = REPORT_SCHEMA_VERSION


def sha256_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def device_report_from_global_fit(device_id, gfit, tls=None, width_nm=None,
                                  delta_f_age_hz=None) -> DeviceReport:
    """Assemble a device entry from a global power fit (+ optional TLS fit)."""
    fit = gfit.fit
    gammas = gfit.gammas
    gamma_errs = gfit.gamma_errors
    i_low = int(np.argmin(gfit.n_ph))
    per_power = [
        PerPowerEntry(
            power_dbm=None if np.isnan(gfit.powers_dbm[i]) else float(gfit.powers_dbm[i]),
            power_w=float(gfit.powers_w[i]),
            n_ph=float(gfit.n_ph[i]),
            n_cavity_peak=float(gfit.n_cavity_peak[i]),
            gamma_hz=float(gammas[i] / TWO_PI),
            gamma_hz_err=float(gamma_errs[i] / TWO_PI),
            qi=float(gfit.omega0 / gammas[i]),
        )
        for i in range(len(gammas))
    ]
    entry = DeviceReport(
        device_id=device_id,
        width_nm=width_nm,
        f0_hz=gfit.omega0 / TWO_PI,
        f0_hz_err=fit.error("omega0") / TWO_PI,
        kappa_hz=gfit.kappa / TWO_PI,
        kappa_hz_err=fit.error("kappa") / TWO_PI,
        gamma_hz=float(gammas[i_low] / TWO_PI),
        gamma_hz_err=float(gamma_errs[i_low] / TWO_PI),
        kerr_hz=gfit.kerr / TWO_PI,
        kerr_hz_err=fit.error("kerr") / TWO_PI,
        kerr_hz_sys_lo=gfit.kerr_sys_band[0] / TWO_PI,
        kerr_hz_sys_hi=gfit.kerr_sys_band[1] / TWO_PI,
        phi_rad=gfit.phi,
        delta_f_age_hz=delta_f_age_hz,
        converged=bool(fit.converged),
        per_power=per_power,
    )
    if tls is not None:
        res = tls.fixed_beta_result
        entry.f_delta_tls = res.value("f_delta_tls")
        entry.f_delta_tls_err = res.error("f_delta_tls")
        entry.n_c = res.value("n_c")
        entry.n_c_err = res.error("n_c")
        entry.beta = tls.beta_fixed_value
    return entry


def report_to_dict(report: Report) -> dict:
    out = asdict(report)
    out["units"] = dict(UNITS)
    return out


def report_to_json_str(report: Report) -> str:
    return json.dumps(report_to_dict(report), sort_keys=True, indent=2) + "\n"


def _table_row(dev: DeviceReport):
    def cell(x, scale=1.0):
        return "" if x is None else f"{x * scale:.17g}"

    return [
        dev.device_id,
        cell(dev.width_nm),
        cell(dev.f0_hz, 1e-9),
        cell(dev.kappa_hz, 1e-3),
        cell(dev.gamma_hz, 1e-3),
        cell(dev.kerr_hz),
        cell(dev.f_delta_tls),
        cell(dev.n_c),
        cell(dev.delta_f_age_hz, 1e-6),
    ]


def write_report_csv(report: Report, path):
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TABLE_COLUMNS)
        for dev in report.devices:
            writer.writerow(_table_row(dev))
    return path


def emit_report(report: Report, out_dir, formats=("json", "csv"), basename="report"):
    """Write the report files; returns the list of paths written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if "json" in formats:
        p = out_dir / f"{basename}.json"
        p.write_text(report_to_json_str(report), encoding="utf-8")
        written.append(p)
    if "csv" in formats:
        written.append(write_report_csv(report, out_dir / f"{basename}.csv"))
    return written


def load_report(path) -> Report:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    devices = []
    for d in raw.get("devices", []):
        d = dict(d)
        per_power = [PerPowerEntry(**p) for p in d.pop("per_power", [])]
        devices.append(DeviceReport(per_power=per_power, **d))
    return Report(
        devices=devices,
        seed=raw.get("seed"),
        input_digests=raw.get("input_digests", {}),
        tool_version=raw.get("tool_version", ""),
        schema_version=raw.get("schema_version", REPORT_SCHEMA_VERSION),
    )


@dataclass
class AgeingEntry:
    device_id: str
    delta_f_age_hz: float  # f_before - f_after; positive when f decreased
    delta_f_age_err_hz: float
    gamma_ratio: float  # gamma_after / gamma_before at the lowest power
    qi_vs_nph: list = field(default_factory=list)


@dataclass
class AgeingTable:
    matched: list
    unmatched_before: list
    unmatched_after: list

    def as_dict(self):
        return asdict(self)


def age_diff(report_before: Report, report_after: Report) -> AgeingTable:
    """Per-device ageing observables between two runs.

    ``delta_f_age_hz = f_before - f_after`` (positive for the usual drift
    towards lower frequency) with the two fit errors combined in
    quadrature, plus per-power Q_i deltas where the drive powers match.
    Devices present in only one report land in the unmatched lists.
    """
    before = {d.device_id: d for d in report_before.devices}
    after = {d.device_id: d for d in report_after.devices}
    matched = []
    for device_id in before:
        if device_id not in after:
            continue
        b, a = before[device_id], after[device_id]
        qi_rows = []
        a_powers = {
            p.power_dbm: p for p in a.per_power if p.power_dbm is not None
        }
        for pb in b.per_power:
            pa = a_powers.get(pb.power_dbm)
            if pa is None:
                continue
            qi_rows.append(
                {
                    "power_dbm": pb.power_dbm,
                    "n_ph_before": pb.n_ph,
                    "qi_before": pb.qi,
                    "qi_after": pa.qi,
                    "qi_ratio": pa.qi / pb.qi,
                }
            )
        matched.append(
            AgeingEntry(
                device_id=device_id,
                delta_f_age_hz=b.f0_hz - a.f0_hz,
                delta_f_age_err_hz=float(np.hypot(b.f0_hz_err, a.f0_hz_err)),
                gamma_ratio=a.gamma_hz / b.gamma_hz,
                qi_vs_nph=qi_rows,
            )
        )
    return AgeingTable(
        matched=matched,
        unmatched_before=sorted(set(before) - set(after)),
        unmatched_after=sorted(set(after) - set(before)),
    )


def write_ageing_json(table: AgeingTable, path):
    Path(path).write_text(
        json.dumps(table.as_dict(), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    return Path(path)


def write_trace_table(trace: ComplexTrace, path, model=None):
    """Plot-ready trace file: frequency, magnitude and phase columns."""
    path = Path(path)
    header = ["freq_hz", "s21_abs", "s21_phase_rad"]
    cols = [trace.freq_hz, np.abs(trace.s21), np.unwrap(np.angle(trace.s21))]
    if model is not None:
        if len(model) != trace.npoints:
            raise InvalidParameterError("model must match the trace length")
        header += ["model_abs", "model_phase_rad"]
        cols += [np.abs(model), np.unwrap(np.angle(model))]
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join(f"{v:.17g}" for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_qi_table(entries, path):
    """Plot-ready photon-number/quality-factor file from per-power entries."""
    path = Path(path)
    lines = ["n_ph,qi"]
    for e in entries:
        lines.append(f"{e.n_ph:.17g},{e.qi:.17g}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
