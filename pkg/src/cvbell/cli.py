"""``cvbell`` command line: figure presets, parameter sweeps and angle optimisation.

Sweep specifications are flat ``key = value`` files (``#`` starts a comment);
``--set key=value`` overrides file or preset values.  Output is plot-ready CSV
or JSON; rows always come out in sweep order, whatever ``--jobs`` is.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone

from . import __version__, bell, fock, gaussian
from .errors import CvbellError, InvalidArgumentError

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_NUMERICAL = 0, 2, 3, 4

CSV_COLUMNS = (
    "sweep_name",
    "sweep_value",
    "p_t1t2",
    "p_t1t2p",
    "p_t1pt2",
    "p_t1pt2p",
    "p_t1p_x",
    "p_x_t2",
    "p_xx",
    "f",
    "lower_margin",
    "violated",
    "backend",
    "tail",
)

GAUSSIAN_FAMILIES = ("pure_gaussian", "squeezed_thermal", "leakage")
FAMILIES = GAUSSIAN_FAMILIES + ("pcs", "ecs", "two_photon")
ANGLE_KEYS = ("theta1", "theta2", "theta1p", "theta2p")
SWEEP_VARIABLES = {
    "pure_gaussian": ("u", "kappa", "transmittance"),
    "squeezed_thermal": ("u", "kappa", "transmittance"),
    "leakage": ("u", "kappa", "transmittance"),
    "pcs": ("zeta",),
    "ecs": ("alpha",),
    "two_photon": ANGLE_KEYS,
}
DEFAULT_CUTOFF = {
    "pure_gaussian": fock.CUTOFF_SQUEEZE,
    "squeezed_thermal": fock.CUTOFF_SQUEEZE,
    # the density-matrix route grows as (cutoff + 1)^8
    "leakage": 6,
    "pcs": fock.CUTOFF_NONGAUSSIAN,
    "ecs": 30,
    "two_photon": fock.CUTOFF_TWO_PHOTON,
}
FAMILY_KEYS = {
    "pure_gaussian": ("u", "v_rule", "kappa", "transmittance"),
    "squeezed_thermal": ("u", "v_rule", "kappa", "transmittance"),
    "leakage": ("u", "v_rule", "kappa", "transmittance"),
    "pcs": ("zeta", "q"),
    "ecs": ("alpha",),
    "two_photon": ("state",),
}
V_RULES = ("-u", "0")
BACKENDS = ("auto", "gaussian", "fock")

FIG_ANGLES = (1.32, 0.93, 3.66, 3.32)
ECS_ANGLES = (2.67, 5.59, 1.88, 3.24)


@dataclass(frozen=True)
class SweepSpec:
    """One curve: a state family, the swept parameter and everything held fixed."""

    name: str = "sweep"
    family: str = "pure_gaussian"
    variable: str = ""
    start: float = 0.0
    stop: float = 1.2
    step: float = 0.01
    u: float = 0.5
    v_rule: str = "-u"
    kappa: float = 1.0
    transmittance: float = 1.0
    zeta: float = 1.0
    q: int = 0
    alpha: float = 1.0
    state: str = "psi2"
    angles: tuple | str = FIG_ANGLES
    grid: int = bell.DEFAULT_GRID
    backend: str = "auto"
    cutoff: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidArgumentError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if not self.variable:
            object.__setattr__(self, "variable", SWEEP_VARIABLES[self.family][0])
        if self.variable not in SWEEP_VARIABLES[self.family]:
            raise InvalidArgumentError(
                f"family {self.family} cannot sweep {self.variable!r}; allowed: {SWEEP_VARIABLES[self.family]}"
            )
        if not self.cutoff:
            object.__setattr__(self, "cutoff", DEFAULT_CUTOFF[self.family])
        if self.cutoff < 1:
            raise InvalidArgumentError(f"cutoff must be positive, got {self.cutoff}")
        for k in ("start", "stop", "step", "u", "kappa", "transmittance", "zeta", "alpha"):
            if not math.isfinite(getattr(self, k)):
                raise InvalidArgumentError(f"{k} must be finite")
        if not self.step > 0:
            raise InvalidArgumentError(f"step must be positive, got {self.step}")
        if self.stop < self.start:
            raise InvalidArgumentError(f"empty range [{self.start}, {self.stop}]")
        if self.v_rule not in V_RULES:
            raise InvalidArgumentError(f"v_rule must be one of {V_RULES}, got {self.v_rule!r}")
        if self.backend not in BACKENDS:
            raise InvalidArgumentError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.state not in ("psi1", "psi2"):
            raise InvalidArgumentError(f"state must be psi1 or psi2, got {self.state!r}")
        if self.grid < 4:
            raise InvalidArgumentError(f"grid density must be at least 4, got {self.grid}")
        if self.angles != "optimize":
            if len(self.angles) != 4 or not all(math.isfinite(a) for a in self.angles):
                raise InvalidArgumentError(f"angles must be four finite numbers or 'optimize', got {self.angles!r}")
            object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
        if self.family == "two_photon" and self.angles == "optimize":
            raise InvalidArgumentError("two_photon sweeps vary one angle and need fixed angles")
        if self.family not in GAUSSIAN_FAMILIES and self.backend == "gaussian":
            raise InvalidArgumentError(f"family {self.family} has no Gaussian representation")
        for value in (self.start, self.stop):
            self.params_at(value)
        if self.resolved_backend == "fock" and self.family in GAUSSIAN_FAMILIES:
            kappas = [self.kappa] + ([self.start, self.stop] if self.variable == "kappa" else [])
            if any(k != 1.0 for k in kappas):
                raise InvalidArgumentError("thermal states have no Fock-backend construction; use backend=gaussian")

    @property
    def resolved_backend(self):
        if self.backend != "auto":
            return self.backend
        return "gaussian" if self.family in GAUSSIAN_FAMILIES else "fock"

    def values(self):
        """The inclusive sweep grid ``start, start + step, ..., <= stop``."""
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [round(self.start + i * self.step, 12) for i in range(n)]

    def params_at(self, value):
        """Fixed parameters with the swept one replaced, checked against family bounds."""
        p = {k: getattr(self, k) for k in ("u", "kappa", "transmittance", "zeta", "q", "alpha")}
        angles = self.angles
        if self.variable in ANGLE_KEYS:
            angles = list(angles)
            angles[ANGLE_KEYS.index(self.variable)] = value
            angles = tuple(angles)
        else:
            p[self.variable] = value
        if abs(p["u"]) > 5.0:
            raise InvalidArgumentError(f"|u| must not exceed 5, got {p['u']}")
        if not 0.0 < p["kappa"] <= 1.0:
            raise InvalidArgumentError(f"kappa must lie in (0, 1], got {p['kappa']}")
        if not 0.0 <= p["transmittance"] <= 1.0:
            raise InvalidArgumentError(f"transmittance must lie in [0, 1], got {p['transmittance']}")
        if self.family == "ecs" and p["alpha"] == 0.0:
            raise InvalidArgumentError("ecs needs a nonzero alpha")
        if int(p["q"]) != p["q"] or p["q"] < 0:
            raise InvalidArgumentError(f"q must be a nonnegative integer, got {p['q']}")
        p["angles"] = angles
        return p

    def as_dict(self):
        return dataclasses.asdict(self)


def build_state(spec: SweepSpec, params):
    fam, backend = spec.family, spec.resolved_backend
    if fam in GAUSSIAN_FAMILIES:
        u = params["u"]
        v = -u if spec.v_rule == "-u" else 0.0
        if backend == "gaussian":
            return gaussian.four_mode_squeezed(u, v, params["kappa"], params["transmittance"])
        s = fock.squeezed_four_mode(u, v, spec.cutoff)
        if params["transmittance"] != 1.0:
            return fock.attenuate_fock(s, params["transmittance"])
        return s
    if fam == "pcs":
        return fock.pcs_pair(fock.PcsParams(params["zeta"], int(params["q"])), spec.cutoff)
    if fam == "ecs":
        return bell.EcsState.build(params["alpha"], spec.cutoff)
    return fock.psi1(spec.cutoff) if spec.state == "psi1" else fock.psi2(spec.cutoff)


def _fmt(x):
    return repr(float(x))


def evaluate_point(spec: SweepSpec, value):
    """One sweep row as a dict; library failures are recorded, not raised."""
    row = {"sweep_name": spec.name, "sweep_value": value}
    try:
        params = spec.params_at(value)
        state = build_state(spec, params)
        if params["angles"] == "optimize":
            angles, report = bell.optimize_angles(state, spec.grid)
        else:
            angles = bell.BellAngles(*params["angles"])
            report = bell.bell_functional(state, angles)
    except (CvbellError, ArithmeticError, MemoryError) as exc:
        row.update({k: math.nan for k in CSV_COLUMNS[2:11]})
        row.update(
            violated=False,
            backend=f"failed:{spec.resolved_backend}:{type(exc).__name__}",
            tail=math.nan,
            error=str(exc),
        )
        return row
    row.update(report.rates())
    row.update(
        f=report.f,
        lower_margin=report.lower_margin,
        violated=report.violated,
        backend=report.backend,
        tail=report.tail,
        angles=list(angles.as_tuple()),
    )
    return row


def _evaluate_task(task):
    return evaluate_point(*task)


def run_sweep(specs, jobs=1):
    if isinstance(specs, SweepSpec):
        specs = [specs]
    tasks = [(s, v) for s in specs for v in s.values()]
    if jobs <= 1 or len(tasks) <= 1:
        return [_evaluate_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves submission order
        return list(pool.map(_evaluate_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def row_failed(row):
    return "error" in row


def to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        out = []
        for k in CSV_COLUMNS:
            v = r[k]
            if k == "sweep_name" or k == "backend":
                out.append(v)
            elif k == "violated":
                out.append("true" if v else "false")
            else:
                out.append(_fmt(v))
        w.writerow(out)
    return buf.getvalue()


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    return v


def to_json(rows, specs):
    doc = {
        "metadata": {
            "version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "specs": [s.as_dict() for s in specs],
        },
        "rows": [{k: _json_safe(v) for k, v in r.items()} for r in rows],
    }
    return json.dumps(doc, indent=2) + "\n"


# --- presets and config ---------------------------------------------------------


def _presets():
    pure = dict(family="pure_gaussian", start=0.0, stop=1.2, step=0.01, angles=FIG_ANGLES)
    return {
        "fig-pure": [
            SweepSpec(name="fig-pure:v=-u", v_rule="-u", **pure),
            SweepSpec(name="fig-pure:v=0", v_rule="0", **pure),
        ],
        "fig-thermal": [
            SweepSpec(name=f"fig-thermal:kappa={k}", kappa=k, **{**pure, "family": "squeezed_thermal"})
            for k in (1.0, 0.8, 0.7)
        ],
        "fig-leakage": [
            SweepSpec(name=f"fig-leakage:T={t}", transmittance=t, **{**pure, "family": "leakage"})
            for t in (1.0, 0.8, 0.6)
        ],
        "fig-pcs": [
            SweepSpec(name="fig-pcs", family="pcs", start=0.1, stop=2.0, step=0.1, q=0, angles="optimize")
        ],
        "fig-ecs": [
            SweepSpec(name="fig-ecs", family="ecs", start=0.05, stop=2.0, step=0.05, angles=ECS_ANGLES)
        ],
        "two-photon": [
            SweepSpec(
                name=f"two-photon:{st}",
                family="two_photon",
                state=st,
                variable="theta1",
                start=0.0,
                stop=3.14,
                step=0.02,
                angles=ECS_ANGLES,
            )
            for st in ("psi1", "psi2")
        ],
    }


PRESET_NAMES = ("fig-pure", "fig-thermal", "fig-leakage", "fig-pcs", "fig-ecs", "two-photon")
_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(SweepSpec)}


def parse_value(key, text):
    if key not in _FIELD_TYPES:
        raise InvalidArgumentError(f"unknown key {key!r}; known keys: {', '.join(_FIELD_TYPES)}")
    text = text.strip()
    kind = _FIELD_TYPES[key]
    try:
        if key == "angles":
            if text == "optimize":
                return text
            return tuple(float(x) for x in text.split(","))
        if kind == "float":
            return float(text)
        if kind == "int":
            return int(text)
    except ValueError as exc:
        raise InvalidArgumentError(f"bad value for {key}: {text!r}") from exc
    return text


def parse_assignments(lines, source="--set"):
    out = {}
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgumentError(f"{source}:{n}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        out[key] = parse_value(key, value)
    return out


def apply_overrides(specs, overrides):
    if not overrides:
        return list(specs)
    return [dataclasses.replace(s, **overrides) for s in specs]


# --- entry points ------------------------------------------------------------------


def _parser():
    p = argparse.ArgumentParser(prog="cvbell", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"cvbell {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="evaluate the Bell functional along a parameter sweep")
    src = sw.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=PRESET_NAMES)
    src.add_argument("--config", help="flat key=value sweep specification")
    sw.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a spec field")
    sw.add_argument("--format", choices=("csv", "json"), default="csv")
    sw.add_argument("--out", help="output path (default: standard output)")
    sw.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    sw.add_argument("--strict", action="store_true", help="exit with status 4 if any row failed")

    op = sub.add_parser("optimize", help="maximise the Bell functional over the polarizer angles")
    op.add_argument("--family", required=True, choices=FAMILIES)
    op.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    return p


def _load_specs(args):
    if args.preset:
        specs = _presets()[args.preset]
    else:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise OSError(f"cannot read config {args.config}: {exc}") from exc
        specs = [SweepSpec(**parse_assignments(text.splitlines(), args.config))]
    return apply_overrides(specs, parse_assignments(args.set))


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_sweep(args):
    try:
        specs = _load_specs(args)
        if args.jobs < 1:
            raise InvalidArgumentError(f"--jobs must be at least 1, got {args.jobs}")
    except (InvalidArgumentError, TypeError) as exc:
        print(f"cvbell: invalid spec: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"cvbell: {exc}", file=sys.stderr)
        return EXIT_IO
    rows = run_sweep(specs, args.jobs)
    text = to_csv(rows) if args.format == "csv" else to_json(rows, specs)
    try:
        _write(text, args.out)
    except OSError as exc:
        print(f"cvbell: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    failed = [r for r in rows if row_failed(r)]
    for r in failed:
        print(f"cvbell: {r['sweep_name']} at {r['sweep_value']}: {r['error']}", file=sys.stderr)
    if failed and args.strict:
        return EXIT_NUMERICAL
    return EXIT_OK


def fixed_point_spec(family, params):
    """A one-point spec at the fixed parameters, for runs that do not sweep."""
    if family not in FAMILIES:
        raise InvalidArgumentError(f"unknown family {family!r}")
    params = dict(params)
    params.pop("family", None)
    variable = params.pop("variable", SWEEP_VARIABLES[family][0])
    if variable in ANGLE_KEYS:
        # the optimiser chooses the angles; the fixed ones only seed the spec
        if params.get("angles", "optimize") == "optimize":
            params["angles"] = ECS_ANGLES
        value = params["angles"][ANGLE_KEYS.index(variable)]
    else:
        value = params.get(variable, getattr(SweepSpec, variable))
    params.update(start=value, stop=value, step=1.0)
    return SweepSpec(family=family, variable=variable, **params)


def cmd_optimize(args):
    try:
        params = parse_assignments(args.param, "--param")
        spec = fixed_point_spec(args.family, params)
        fixed = spec.params_at(spec.start)
        state = build_state(spec, fixed)
    except (InvalidArgumentError, TypeError) as exc:
        print(f"cvbell: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (CvbellError, ArithmeticError, MemoryError) as exc:
        print(f"cvbell: cannot build state: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    try:
        angles, report = bell.optimize_angles(state, spec.grid)
    except (CvbellError, ArithmeticError, MemoryError) as exc:
        print(f"cvbell: optimisation failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    doc = {
        "family": spec.family,
        "params": {k: fixed.get(k, getattr(spec, k)) for k in FAMILY_KEYS[spec.family]},
        "grid": spec.grid,
        "angles": dataclasses.asdict(angles),
        "report": report.as_dict(),
    }
    print(json.dumps(doc, indent=2))
    return EXIT_OK


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.command == "sweep":
        return cmd_sweep(args)
    return cmd_optimize(args)


if __name__ == "__main__":
    sys.exit(main())
