"""Command-line interface.

Subcommands: fit-trace, fit-sweep, fit-tls, fit-temp, estimate-lk, bcs,
synth, age-diff, report.  Exit codes: 0 success, 1 bad input, 2 fit not
converged (or no resonance), 3 internal error.  All outputs land in the
--out directory (default: $KINRES_OUT or the working directory); --seed
makes runs reproducible and --format selects the report flavor.
"""

import argparse
import json
import os
import sys
import traceback
from pathlib import Path

import numpy as np

from .baseline import normalize_baseline
from .data import TWO_PI, BaselineEnv
from .errors import (
    FitDivergenceError,
    InvalidParameterError,
    KinresError,
    NoResonanceError,
)
from .fileio import (
    SIM_CSV_COLUMNS,
    TraceFile,
    load_sweep_manifest,
    parse_trace,
    read_columns_csv,
    read_pairs_csv,
    write_pairs_csv,
    write_sweep,
)
from .film import LossModelParams, gap_energy, lk_bcs
from .leastsq import FitConfig
from .lkest import average_film_lk, compare_bcs_vs_resonator, fit_hyperbola, invert_frequency
from .loss_fit import DEFAULT_BETA, fit_temperature, fit_tls_power
from .model import KerrResonatorParams
from .presets import DEVICES, FILMS
from .report import (
    DeviceReport,
    Report,
    age_diff,
    device_report_from_global_fit,
    emit_report,
    load_report,
    sha256_digest,
    write_ageing_json,
    write_qi_table,
    write_trace_table,
)
from .synth import NoiseSpec, SweepPlan, generate_ageing_pair, generate_power_sweep, \
    generate_qi_curve, generate_temperature_sweep
from .trace_fit import fit_global_power, fit_single_trace

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_NOT_CONVERGED = 2
EXIT_INTERNAL = 3

OUT_ENV_VAR = "KINRES_OUT"


class _Parser(argparse.ArgumentParser):
    # Exit 1 (not argparse's default 2) on bad flags, usage to stderr.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_BAD_INPUT)


def _default_out():
    return os.environ.get(OUT_ENV_VAR, ".")


def _add_common(p):
    p.add_argument("--out", default=_default_out(),
                   help="output directory (default: $KINRES_OUT or '.')")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--format", choices=("json", "csv", "both"), default="both",
                   help="report format")


def _formats(args):
    return ("json", "csv") if args.format == "both" else (args.format,)


def build_parser() -> _Parser:
    parser = _Parser(prog="kinres", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bcs", help="kinetic inductance of a film from BCS theory")
    p.add_argument("--tc-k", type=float, required=True, help="critical temperature (K)")
    p.add_argument("--rsq-ohm", type=float, required=True,
                   help="normal-state sheet resistance (ohm/sq)")
    p.add_argument("--temperature-k", type=float, default=0.0,
                   help="film temperature (K), 0 for the T=0 limit")
    p.set_defaults(func=_cmd_bcs)

    p = sub.add_parser("fit-trace", help="fit one trace with the linear hanger model")
    p.add_argument("--input", required=True, help="trace file (csv or touchstone)")
    p.add_argument("--input-format", choices=("auto", "csv", "touchstone"),
                   default="auto")
    p.add_argument("--power-dbm", type=float, default=None)
    p.add_argument("--attenuation-db", type=float, default=68.0)
    p.add_argument("--device-id", default=None)
    p.add_argument("--no-normalize", action="store_true",
                   help="skip baseline normalization")
    _add_common(p)
    p.set_defaults(func=_cmd_fit_trace)

    p = sub.add_parser("fit-sweep", help="global Kerr fit of a power sweep manifest")
    p.add_argument("--manifest", required=True, help="sweep manifest JSON")
    p.add_argument("--no-normalize", action="store_true")
    _add_common(p)
    p.set_defaults(func=_cmd_fit_sweep)

    p = sub.add_parser("fit-tls", help="TLS loss fit of Q_i versus photon number")
    p.add_argument("--input", required=True, help="CSV with columns n_ph,qi")
    p.add_argument("--temperature-k", type=float, required=True)
    p.add_argument("--fr-hz", type=float, required=True)
    p.add_argument("--beta", type=float, default=DEFAULT_BETA,
                   help="fixed saturation exponent variant (default 0.2)")
    _add_common(p)
    p.set_defaults(func=_cmd_fit_tls)

    p = sub.add_parser("fit-temp", help="joint temperature fit of Q_i and df/f")
    p.add_argument("--qi", default=None, help="CSV with columns t_k,qi")
    p.add_argument("--df", default=None, help="CSV with columns t_k,df_over_f")
    p.add_argument("--fr-hz", type=float, required=True)
    p.add_argument("--n-ph", type=float, default=50.0)
    p.add_argument("--n-c", type=float, required=True,
                   help="TLS saturation photon number frozen from the power fit")
    p.add_argument("--beta", type=float, default=DEFAULT_BETA,
                   help="saturation exponent frozen from the power fit")
    _add_common(p)
    p.set_defaults(func=_cmd_fit_temp)

    p = sub.add_parser("estimate-lk",
                       help="film sheet inductance from simulated design points")
    p.add_argument("--sim", action="append", required=True,
                   help=f"CSV with columns {','.join(SIM_CSV_COLUMNS)}; repeatable")
    p.add_argument("--f0-hz", action="append", type=float, required=True,
                   help="measured resonant frequency per design; repeatable")
    p.add_argument("--tc-k", type=float, default=None,
                   help="film critical temperature for a BCS comparison")
    p.add_argument("--rsq-ohm", type=float, default=None,
                   help="film sheet resistance for a BCS comparison")
    p.add_argument("--thickness-m", type=float, default=13e-9)
    _add_common(p)
    p.set_defaults(func=_cmd_estimate_lk)

    p = sub.add_parser("synth", help="generate synthetic datasets from a config")
    p.add_argument("--config", required=True, help="run-config JSON")
    _add_common(p)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("age-diff", help="ageing table between two reports")
    p.add_argument("--before", required=True)
    p.add_argument("--after", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_age_diff)

    p = sub.add_parser("report", help="merge device reports into one table")
    p.add_argument("--inputs", nargs="+", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_report)

    return parser


def _cmd_bcs(args):
    gap = gap_energy(args.tc_k)
    lk = lk_bcs(args.rsq_ohm, gap, args.temperature_k)
    print(f"L_k(T = {args.temperature_k:g} K) = {lk * 1e12:.1f} pH/sq")
    return EXIT_OK


def _fit_config(args):
    return FitConfig(seed=args.seed)


def _cmd_fit_trace(args):
    tf = TraceFile(
        path=args.input,
        format=args.input_format,
        power_dbm=args.power_dbm,
        attenuation_db=args.attenuation_db,
        device_id=args.device_id,
    )
    trace = parse_trace(tf)
    if not args.no_normalize:
        trace, _ = normalize_baseline(trace)
    result = fit_single_trace(trace, _fit_config(args))
    dev = DeviceReport(
        device_id=args.device_id or Path(args.input).stem,
        f0_hz=result.value("omega0") / TWO_PI,
        f0_hz_err=result.error("omega0") / TWO_PI,
        kappa_hz=result.value("kappa") / TWO_PI,
        kappa_hz_err=result.error("kappa") / TWO_PI,
        gamma_hz=result.value("gamma") / TWO_PI,
        gamma_hz_err=result.error("gamma") / TWO_PI,
        phi_rad=result.value("phi"),
        converged=result.converged,
    )
    report = Report(
        devices=[dev],
        seed=args.seed,
        input_digests={Path(args.input).name: sha256_digest(args.input)},
    )
    out = Path(args.out)
    emit_report(report, out, formats=_formats(args))
    from .model import linear_s21

    model = linear_s21(
        trace.omega,
        result.value("omega0"),
        result.value("kappa"),
        result.value("gamma"),
        result.value("phi"),
    )
    write_trace_table(trace, out / f"{dev.device_id}_trace.csv", model=model)
    if not result.converged:
        print("fit did not converge", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _cmd_fit_sweep(args):
    sweep = load_sweep_manifest(args.manifest)
    traces = sweep.traces
    if not args.no_normalize:
        traces = tuple(normalize_baseline(t)[0] for t in traces)
    from .data import PowerSweep

    norm_sweep = PowerSweep(traces=traces, device_id=sweep.device_id)
    gfit = fit_global_power(norm_sweep, _fit_config(args))

    tls = None
    n_ph = gfit.n_ph
    if len(n_ph) >= 6 and n_ph.max() / n_ph.min() >= 1e3:
        try:
            base_t = traces[0].temperature_k or 0.015
            tls = fit_tls_power(
                list(zip(n_ph, gfit.qi_per_power)),
                base_t,
                gfit.omega0 / TWO_PI,
                _fit_config(args),
            )
        except KinresError:
            tls = None

    device_id = sweep.device_id or Path(args.manifest).stem
    dev = device_report_from_global_fit(device_id, gfit, tls=tls)
    manifest_path = Path(args.manifest)
    digests = {manifest_path.name: sha256_digest(manifest_path)}
    for entry in json.loads(manifest_path.read_text())["traces"]:
        tpath = manifest_path.parent / entry["path"]
        digests[entry["path"]] = sha256_digest(tpath)
    report = Report(devices=[dev], seed=args.seed, input_digests=digests)
    out = Path(args.out)
    emit_report(report, out, formats=_formats(args))
    write_qi_table(dev.per_power, out / f"{device_id}_qi_vs_nph.csv")
    for i, trace in enumerate(traces):
        model = gfit.resonator_params(i)
        from .model import kerr_response

        s21, _, _, _ = kerr_response(
            model, trace.omega, gfit.powers_w[i], trace.sweep_direction
        )
        write_trace_table(
            trace, out / f"{device_id}_trace_{i:03d}.csv", model=s21
        )
    if not gfit.converged:
        print("global fit did not converge", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _result_block(result):
    return {
        name: {"value": result.value(name), "stderr": result.error(name)}
        for name in result.param_names
    }


def _cmd_fit_tls(args):
    points = read_pairs_csv(args.input, ("n_ph", "qi"))
    fit = fit_tls_power(
        points, args.temperature_k, args.fr_hz, _fit_config(args),
        beta_fixed=args.beta,
    )
    payload = {
        "free_beta": _result_block(fit.result),
        "fixed_beta": _result_block(fit.fixed_beta_result),
        "beta_fixed_value": fit.beta_fixed_value,
        "ill_conditioned": fit.ill_conditioned,
        "temperature_k": args.temperature_k,
        "fr_hz": args.fr_hz,
        "seed": args.seed,
        "input_digests": {Path(args.input).name: sha256_digest(args.input)},
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "tls_fit.json").write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    if not (fit.result.converged and fit.fixed_beta_result.converged):
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _cmd_fit_temp(args):
    if args.qi is None and args.df is None:
        raise InvalidParameterError("at least one of --qi/--df is required")
    qi_pairs = read_pairs_csv(args.qi, ("t_k", "qi")) if args.qi else None
    df_pairs = read_pairs_csv(args.df, ("t_k", "df_over_f")) if args.df else None
    fit = fit_temperature(
        qi_pairs, df_pairs, args.fr_hz, args.n_ph, args.n_c, args.beta,
        _fit_config(args),
    )
    digests = {}
    for f in (args.qi, args.df):
        if f:
            digests[Path(f).name] = sha256_digest(f)
    payload = {
        "delta0": {"value": fit.delta0, "stderr": fit.stderr_of("delta0")},
        "f_delta_tls": {
            "value": fit.f_delta_tls, "stderr": fit.stderr_of("f_delta_tls")
        },
        "t_c_k": {"value": fit.t_c, "stderr": fit.stderr_of("t_c")},
        "lk_shift_coeff": {
            "value": fit.lk_shift_coeff, "stderr": fit.stderr_of("lk_shift_coeff")
        },
        "frozen": {k: v for k, v in fit.frozen.items()},
        "single_dataset": fit.single_dataset,
        "ill_conditioned": fit.ill_conditioned,
        "seed": args.seed,
        "input_digests": digests,
    }
    payload = json.loads(json.dumps(payload, default=float))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "temperature_fit.json").write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    if not fit.fit.converged:
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _cmd_estimate_lk(args):
    if len(args.sim) != len(args.f0_hz):
        raise InvalidParameterError(
            "--sim and --f0-hz must be given the same number of times"
        )
    designs = []
    estimates = []
    for sim_path, f_meas in zip(args.sim, args.f0_hz):
        data = read_columns_csv(sim_path, SIM_CSV_COLUMNS)
        fit = fit_hyperbola([(ls, f0) for ls, f0 in data])
        ls = invert_frequency(fit, f_meas)
        estimates.append(ls)
        designs.append(
            {
                "sim_file": Path(sim_path).name,
                "f_measured_hz": f_meas,
                "scale": fit.scale,
                "offset_h_per_sq": fit.offset,
                "rms_hz": fit.rms,
                "ls_h_per_sq": ls,
            }
        )
    mean, std = average_film_lk(estimates)
    payload = {
        "designs": designs,
        "lk_mean_h_per_sq": mean,
        "lk_std_h_per_sq": std,
        "input_digests": {
            Path(p).name: sha256_digest(p) for p in args.sim
        },
        "seed": args.seed,
    }
    if args.tc_k is not None and args.rsq_ohm is not None:
        from .film import FilmProperties

        film = FilmProperties(
            tc=args.tc_k, r_sq=args.rsq_ohm, thickness=args.thickness_m,
            lk0=mean,
        )
        payload["bcs_comparison"] = compare_bcs_vs_resonator(film, mean).as_dict()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "lk_estimate.json").write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    print(f"L_k = {mean * 1e12:.2f} +- {std * 1e12:.2f} pH/sq")
    return EXIT_OK


def _check_keys(block, allowed, context):
    unknown = set(block) - set(allowed)
    if unknown:
        raise InvalidParameterError(
            f"unknown keys in {context}: {', '.join(sorted(unknown))}"
        )


def _resonator_from_config(block):
    _check_keys(block, {"preset", "f0_hz", "kappa_hz", "gamma_hz", "kerr_hz",
                        "phi_rad"}, "device")
    if "preset" in block:
        extra = {k: v for k, v in block.items() if k != "preset"}
        dev = DEVICES[block["preset"]]
        params = dev.resonator(phi=extra.get("phi_rad", 0.0))
        return params
    return KerrResonatorParams(
        omega0=TWO_PI * block["f0_hz"],
        kappa=TWO_PI * block["kappa_hz"],
        gamma=TWO_PI * block["gamma_hz"],
        kerr=TWO_PI * block.get("kerr_hz", 0.0),
        phi=block.get("phi_rad", 0.0),
    )


def _plan_from_config(block):
    _check_keys(block, {"powers_dbm", "freq_start_hz", "freq_stop_hz", "points",
                        "attenuation_db", "direction"}, "plan")
    return SweepPlan(
        powers_dbm=tuple(block["powers_dbm"]),
        freq_span=(block["freq_start_hz"], block["freq_stop_hz"], block["points"]),
        attenuation_db=block.get("attenuation_db", 68.0),
        direction=block.get("direction", "up"),
    )


def _baseline_from_config(block):
    if block is None:
        return None
    _check_keys(block, {"amp", "slope_per_hz", "tau_s", "phase0_rad"}, "baseline")
    return BaselineEnv(
        amp=block.get("amp", 1.0),
        slope=block.get("slope_per_hz", 0.0),
        tau=block.get("tau_s", 0.0),
        phase0=block.get("phase0_rad", 0.0),
    )


def _loss_from_config(block):
    _check_keys(block, {"delta0", "f_delta_tls", "n_c", "beta", "tc_k",
                        "alpha_k", "lk_shift_coeff"}, "loss")
    return LossModelParams(
        delta0=block["delta0"],
        f_delta_tls=block["f_delta_tls"],
        n_c=block["n_c"],
        beta=block.get("beta", DEFAULT_BETA),
        gap=gap_energy(block["tc_k"]),
        alpha_k=block.get("alpha_k", 1.0),
        lk_shift_coeff=block.get("lk_shift_coeff", 0.0),
    )


_SYNTH_KEYS = {
    "kind", "name", "device", "plan", "noise", "baseline", "loss",
    "df_age_hz", "qi_scale", "n_grid", "t_grid", "temperature_k", "fr_hz",
    "n_ph", "scatter", "df_sigma",
}


def _cmd_synth(args):
    cfg_path = Path(args.config)
    config = json.loads(cfg_path.read_text(encoding="utf-8"))
    _check_keys(config, _SYNTH_KEYS, "synth config")
    kind = config.get("kind")
    name = config.get("name", "synth")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    noise_block = config.get("noise", {})
    _check_keys(noise_block, {"sigma", "seed"}, "noise")
    noise = NoiseSpec(
        sigma=noise_block.get("sigma", 0.0),
        seed=noise_block.get("seed", args.seed),
    )
    written = []
    if kind == "power_sweep":
        truth = _resonator_from_config(config["device"])
        plan = _plan_from_config(config["plan"])
        env = _baseline_from_config(config.get("baseline"))
        sweep = generate_power_sweep(
            truth, env, plan, noise, device_id=config["device"].get("preset"),
            temperature_k=config.get("temperature_k"),
        )
        written.append(write_sweep(sweep, out, name=name))
    elif kind == "ageing_pair":
        truth = _resonator_from_config(config["device"])
        plan = _plan_from_config(config["plan"])
        env = _baseline_from_config(config.get("baseline"))
        before, after = generate_ageing_pair(
            truth, config["df_age_hz"], config.get("qi_scale", 1.0), env, plan,
            noise, device_id=config["device"].get("preset"),
        )
        written.append(write_sweep(before, out, name=f"{name}_before"))
        written.append(write_sweep(after, out, name=f"{name}_after"))
    elif kind == "qi_curve":
        loss = _loss_from_config(config["loss"])
        points = generate_qi_curve(
            loss, config.get("temperature_k", 0.015), config["fr_hz"],
            config["n_grid"], scatter=config.get("scatter", 0.0),
            seed=noise.seed,
        )
        written.append(write_pairs_csv(points, out / f"{name}_qi.csv", ("n_ph", "qi")))
    elif kind == "temperature_sweep":
        loss = _loss_from_config(config["loss"])
        qi_list, df_list = generate_temperature_sweep(
            loss, config["fr_hz"], config["t_grid"],
            n_ph=config.get("n_ph", 50.0),
            qi_scatter=config.get("scatter", 0.0),
            df_sigma=config.get("df_sigma", 0.0), seed=noise.seed,
        )
        written.append(
            write_pairs_csv(qi_list, out / f"{name}_qi_vs_t.csv", ("t_k", "qi"))
        )
        written.append(
            write_pairs_csv(df_list, out / f"{name}_df_vs_t.csv", ("t_k", "df_over_f"))
        )
    else:
        raise InvalidParameterError(
            f"unknown synth kind {kind!r}; expected power_sweep, ageing_pair, "
            "qi_curve or temperature_sweep"
        )
    for p in written:
        print(p)
    return EXIT_OK


def _cmd_age_diff(args):
    before = load_report(args.before)
    after = load_report(args.after)
    table = age_diff(before, after)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_ageing_json(table, out / "ageing.json")
    for entry in table.matched:
        print(
            f"{entry.device_id}: delta_f_age = "
            f"{entry.delta_f_age_hz / 1e6:.4f} MHz, "
            f"gamma ratio = {entry.gamma_ratio:.3f}"
        )
    for device_id in table.unmatched_before:
        print(f"{device_id}: only in --before report")
    for device_id in table.unmatched_after:
        print(f"{device_id}: only in --after report")
    return EXIT_OK


def _cmd_report(args):
    devices = []
    digests = {}
    for path in args.inputs:
        rep = load_report(path)
        devices.extend(rep.devices)
        digests[Path(path).name] = sha256_digest(path)
    merged = Report(devices=devices, seed=args.seed, input_digests=digests)
    emit_report(merged, Path(args.out), formats=_formats(args))
    return EXIT_OK


def cli_dispatch(argv) -> int:
    """Run one CLI invocation; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse --help (0) or usage error (1)
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (NoResonanceError, FitDivergenceError) as exc:
        print(f"kinres: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (KinresError, FileNotFoundError, KeyError, json.JSONDecodeError) as exc:
        print(f"kinres: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except SystemExit as exc:
        return int(exc.code or 0)
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


def main():
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
