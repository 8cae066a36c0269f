"""Batch front end: single computations and parameter scans from JSON configs.

Exit codes: 0 on success, 2 for configuration problems, 3 for numeric or
precondition failures. Floats are printed with 12 significant digits and
scan rows are emitted in ascending scan order, so output is byte-identical
across repeated runs of the same config.
"""

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import ConfigError, ScatentError
from .purity import purity_numeric
from .scatter import (
    amplitude_variation_diagnostic,
    constant_amplitude_purity,
    ie_purity_invariance_check,
    out_state,
    qubit_model_purity,
    split_purity,
)
from .smatrix import (
    DeltaBarrier,
    DoubleDelta,
    HardWall,
    SquareBarrier,
    tabulate_amplitudes,
)
from .transforms import ie_purity, reflection_purity, schulman_residual
from .wavepacket import GaussianProductState, overlap_integral

SCAN_AXES = ("mass_ratio", "sigma_ratio", "potential_strength", "k")

RUN_COLUMNS = (
    "scan_axis", "scan_value", "T", "R", "p_exact", "p_const_amp", "p_qubit",
    "p_reflection", "schulman_residual", "ie_purity", "variation_diag",
    "mode_overlap", "split_residual",
)

AMPLITUDE_COLUMNS = (
    "q", "t_re", "t_im", "r_re", "r_im", "trans_prob", "refl_prob",
    "dt_dq_abs", "dr_dq_abs", "unitarity_dev",
)


@dataclass(frozen=True)
class ScanSpec:
    axis: str
    start: float
    stop: float
    count: int

    def values(self):
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class ExperimentConfig:
    k: float
    a: float
    sigma1: float
    sigma2: float
    m1: float
    m2: float
    potential_kind: str
    potential_params: dict
    n: int = 512
    window: float = 8.0
    scan: Optional[ScanSpec] = None

    def state(self) -> GaussianProductState:
        return GaussianProductState.scattering(
            k=self.k, sigma1=self.sigma1, sigma2=self.sigma2,
            m1=self.m1, m2=self.m2, a=self.a)

    def model(self):
        return _build_model(self.potential_kind, self.potential_params)

    def at_scan_value(self, value: float) -> "ExperimentConfig":
        axis = self.scan.axis
        if axis == "mass_ratio":
            return replace(self, m2=self.m1 * value, scan=None)
        if axis == "sigma_ratio":
            return replace(self, sigma2=self.sigma1 * value, scan=None)
        if axis == "k":
            return replace(self, k=value, scan=None)
        if axis == "potential_strength":
            params = dict(self.potential_params)
            if self.potential_kind in ("delta_barrier", "double_delta"):
                params["strength"] = value
            elif self.potential_kind == "square_barrier":
                params["height"] = value
            else:
                raise ConfigError(
                    f"potential {self.potential_kind!r} has no strength to scan"
                )
            return replace(self, potential_params=params, scan=None)
        raise ConfigError(f"unknown scan axis {axis!r}")


def _build_model(kind, params):
    try:
        if kind == "hard_wall":
            _reject_extra(params, ())
            return HardWall()
        if kind == "delta_barrier":
            _reject_extra(params, ("strength",))
            return DeltaBarrier(strength=float(params["strength"]))
        if kind == "square_barrier":
            _reject_extra(params, ("height", "width"))
            return SquareBarrier(height=float(params["height"]),
                                 width=float(params["width"]))
        if kind == "double_delta":
            _reject_extra(params, ("strength", "separation"))
            return DoubleDelta(strength=float(params["strength"]),
                               separation=float(params["separation"]))
    except KeyError as exc:
        raise ConfigError(f"potential {kind!r} is missing parameter {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad potential parameters for {kind!r}: {exc}") from exc
    raise ConfigError(
        f"unknown potential kind {kind!r}; expected hard_wall, delta_barrier, "
        "square_barrier, or double_delta"
    )


def _reject_extra(params, allowed):
    extra = set(params) - set(allowed)
    if extra:
        raise ConfigError(f"unexpected potential parameters: {sorted(extra)}")


def _require_number(section, key, value):
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{section}.{key} must be finite, got {value!r}")
    return float(value)


def load_config(path, grid_n=None, window=None) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(raw, grid_n=grid_n, window=window)


def parse_config(raw: dict, grid_n=None, window=None) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    try:
        state = raw["state"]
        pot = raw["potential"]
    except KeyError as exc:
        raise ConfigError(f"config is missing section {exc}") from exc
    if not isinstance(state, dict) or not isinstance(pot, dict):
        raise ConfigError("'state' and 'potential' must be objects")

    fields = {}
    for key, default in (("k", None), ("a", 0.0), ("sigma1", None),
                         ("sigma2", None), ("m1", 1.0), ("m2", 1.0)):
        if key in state:
            fields[key] = _require_number("state", key, state[key])
        elif default is not None:
            fields[key] = default
        else:
            raise ConfigError(f"state.{key} is required")
    for key, bound in (("sigma1", 0.0), ("sigma2", 0.0), ("m1", 0.0), ("m2", 0.0)):
        if fields[key] <= bound:
            raise ConfigError(f"state.{key} must be positive")

    kind = pot.get("kind")
    if not isinstance(kind, str):
        raise ConfigError("potential.kind must be a string")
    params = {k: v for k, v in pot.items() if k != "kind"}
    _build_model(kind, params)  # validate early

    grid = raw.get("grid", {})
    if not isinstance(grid, dict):
        raise ConfigError("'grid' must be an object")
    n = grid_n if grid_n is not None else int(grid.get("n", 512))
    win = window if window is not None else float(grid.get("window", 8.0))
    if n < 2:
        raise ConfigError("grid.n must be at least 2")
    if win <= 0:
        raise ConfigError("grid.window must be positive")

    scan = None
    if "scan" in raw and raw["scan"] is not None:
        s = raw["scan"]
        if not isinstance(s, dict):
            raise ConfigError("'scan' must be an object")
        axis = s.get("axis")
        if axis not in SCAN_AXES:
            raise ConfigError(f"scan.axis must be one of {SCAN_AXES}, got {axis!r}")
        try:
            start = _require_number("scan", "start", s["start"])
            stop = _require_number("scan", "stop", s["stop"])
            count = s["count"]
        except KeyError as exc:
            raise ConfigError(f"scan is missing {exc}") from exc
        if not isinstance(count, int) or count < 2:
            raise ConfigError("scan.count must be an integer >= 2")
        if not (stop > start):
            raise ConfigError("scan range must be finite and ascending")
        if axis == "potential_strength" and kind == "hard_wall":
            raise ConfigError("hard_wall has no strength to scan")
        scan = ScanSpec(axis=axis, start=start, stop=stop, count=count)

    return ExperimentConfig(potential_kind=kind, potential_params=params,
                            n=n, window=win, scan=scan, **fields)


def _fmt(x) -> str:
    return format(float(x), ".12g")


def _row_for_point(cfg: ExperimentConfig, axis: str, value) -> dict:
    state = cfg.state()
    model = cfg.model()
    out = out_state(state, model, n=cfg.n, window=cfg.window)
    split = split_purity(out)
    p_exact = purity_numeric(out.phi_out).purity
    diag = amplitude_variation_diagnostic(model, state)
    return {
        "scan_axis": axis,
        "scan_value": "" if value is None else _fmt(value),
        "T": _fmt(out.transmission),
        "R": _fmt(out.reflection),
        "p_exact": _fmt(p_exact),
        "p_const_amp": _fmt(constant_amplitude_purity(
            state, out.transmission, out.reflection)),
        "p_qubit": _fmt(qubit_model_purity(out.transmission, out.reflection)),
        "p_reflection": _fmt(reflection_purity(state)),
        "schulman_residual": _fmt(schulman_residual(state)),
        "ie_purity": _fmt(ie_purity(state)),
        "variation_diag": _fmt(diag.value),
        "mode_overlap": _fmt(out.mode_overlap),
        "split_residual": _fmt(split.residual),
    }


def run_rows(cfg: ExperimentConfig):
    if cfg.scan is None:
        return [_row_for_point(cfg, "", None)]
    rows = []
    for value in cfg.scan.values():
        rows.append(_row_for_point(cfg.at_scan_value(float(value)),
                                   cfg.scan.axis, float(value)))
    return rows


def _write_table(rows, columns, out_path, fmt):
    if fmt == "json":
        payload = [
            {k: (row[k] if k in ("scan_axis",) or row[k] == ""
                 else float(row[k])) for k in columns}
            for row in rows
        ]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    if out_path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_run(cfg, args) -> int:
    rows = run_rows(cfg)
    _write_table(rows, RUN_COLUMNS, args.out, args.format)
    return 0


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def run_checks(cfg: ExperimentConfig):
    """Invariant suite at the configured point."""
    state = cfg.state()
    model = cfg.model()
    checks = []

    ov = overlap_integral(state)
    checks.append(CheckResult("boundary_overlap", ov < 1e-6,
                              f"|int phi1 phi2| = {ov:.6g} (threshold 1e-06)"))
    p_total = state.k1 + state.k2
    checks.append(CheckResult("com_frame", abs(p_total) < 1e-9,
                              f"<P> = {p_total:.6g}"))
    out = None
    try:
        out = out_state(state, model, n=cfg.n, window=cfg.window)
    except ScatentError as exc:
        checks.append(CheckResult("out_state", False, str(exc)))

    if out is not None:
        q_dev = abs(out.transmission + out.reflection - 1.0)
        checks.append(CheckResult("unitarity_T_plus_R", q_dev < 1e-8,
                                  f"|T + R - 1| = {q_dev:.6g}"))
        nrm = out.phi_out.norm()
        checks.append(CheckResult("out_norm", abs(nrm - 1.0) < 1e-8,
                                  f"||phi_out|| = {nrm:.12g}"))
        checks.append(CheckResult("mode_orthogonality",
                                  out.mode_overlap < 1e-6,
                                  f"|<tra|ref>| = {out.mode_overlap:.6g}"))
        try:
            split = split_purity(out)
            checks.append(CheckResult(
                "split_identity", split.residual < 1e-7,
                f"p_total = {split.p_total:.12g}, "
                f"|p_total - p_tra - p_ref| = {split.residual:.6g}"))
            checks.append(CheckResult(
                "purity_bounds",
                0.0 < split.p_total <= 1.0 + 1e-8,
                f"p_total = {split.p_total:.12g}"))
        except ScatentError as exc:
            checks.append(CheckResult("split_identity", False, str(exc)))
        try:
            ie = ie_purity_invariance_check(state, model, n=cfg.n,
                                            window=cfg.window)
            checks.append(CheckResult(
                "ie_invariance", ie.difference < 1e-6,
                f"|p_IE(in) - p_IE(out)| = {ie.difference:.6g}"))
        except ScatentError as exc:
            checks.append(CheckResult("ie_invariance", False, str(exc)))
    return checks


def cmd_check(cfg, args) -> int:
    checks = run_checks(cfg)
    width = max(len(c.name) for c in checks)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{c.name:<{width}}  {status}  {c.detail}")
    return 0 if all(c.passed for c in checks) else 3


def cmd_amplitudes(cfg, args) -> int:
    state = cfg.state()
    model = cfg.model()
    q_min = args.q_min if args.q_min is not None else 0.1 * cfg.k
    q_max = args.q_max if args.q_max is not None else 2.0 * cfg.k
    if not (q_min > 0 and q_max > q_min):
        raise ConfigError("need 0 < q_min < q_max")
    q = np.linspace(q_min, q_max, args.q_count)
    table = tabulate_amplitudes(model, q, state.reduced_mass)
    rows = []
    for i in range(table.q.size):
        t, r = table.t[i], table.r[i]
        rows.append({
            "q": _fmt(table.q[i]),
            "t_re": _fmt(t.real), "t_im": _fmt(t.imag),
            "r_re": _fmt(r.real), "r_im": _fmt(r.imag),
            "trans_prob": _fmt(abs(t) ** 2), "refl_prob": _fmt(abs(r) ** 2),
            "dt_dq_abs": _fmt(abs(table.dt_dq[i])),
            "dr_dq_abs": _fmt(abs(table.dr_dq[i])),
            "unitarity_dev": _fmt(abs(abs(t) ** 2 + abs(r) ** 2 - 1.0)),
        })
    _write_table(rows, AMPLITUDE_COLUMNS, args.out, args.format)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scatent",
        description="Entanglement generated by 1D two-particle scattering.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--grid-n", type=int, default=None,
                       help="override grid.n from the config")
        p.add_argument("--window", type=float, default=None,
                       help="override grid.window from the config")

    p_run = sub.add_parser("run", help="compute purities (one row per scan point)")
    common(p_run)
    p_check = sub.add_parser("check", help="run the invariant suite at one point")
    common(p_check)
    p_amp = sub.add_parser("amplitudes", help="dump t(q), r(q) tables")
    common(p_amp)
    p_amp.add_argument("--q-min", type=float, default=None)
    p_amp.add_argument("--q-max", type=float, default=None)
    p_amp.add_argument("--q-count", type=int, default=256)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, grid_n=args.grid_n, window=args.window)
        if args.command == "run":
            return cmd_run(cfg, args)
        if args.command == "check":
            return cmd_check(cfg, args)
        return cmd_amplitudes(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ScatentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
