"""
Experiment runner: one subcommand per study, results as CSV.

Every row carries the full parameter tuple

    scenario, ell, tau, t0, tf, metric, value, aux

where ``aux`` holds the secondary coordinate of table-like scenarios
(``c`` for beta-table, the coefficient index for coefficient-dump) and is
empty otherwise.  Reals are written with 17 significant digits.  Rows are
buffered and written in grid order, so re-running a scenario gives a
byte-identical file.  Progress goes to stderr.

Exit status: 0 success, 1 usage error, 2 runtime or numerical error.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from .core import InvalidArgumentError
from .pade import MAX_ORDER, SingularDenominatorError, beta, gen_coeffs_alternative, taylor_domain
from .propagator import PropagationError, step_count

SCENARIOS = ("lti-sweep", "special-ltv-sweep", "general-ltv-oracle", "beta-table", "coefficient-dump")
COLUMNS = ("scenario", "ell", "tau", "t0", "tf", "metric", "value", "aux")
PROFILES = ("special", "decaying")

# span defaults per scenario
_SPAN = {
    "lti-sweep": (0.0, 2000.0),
    "special-ltv-sweep": (0.0, 2000.0),
    "general-ltv-oracle": (0.0, 100.0),
}
_DEFAULT_PROFILE = {"special-ltv-sweep": "special", "general-ltv-oracle": "decaying"}
BETA_TABLE_POINTS = 200
BETA_TABLE_CMAX = 12.0


class UsageError(Exception):
    """Invalid scenario parameters; the message names the offending field."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(v):
    if v is None or v == "":
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v):.16e}"


def _float_list(field, value):
    if isinstance(value, (int, float)):
        value = [value]
    if isinstance(value, str):
        value = [s for s in value.split(",") if s.strip()]
    try:
        out = [float(v) for v in value]
    except (TypeError, ValueError):
        raise UsageError(f"{field}: expected a comma-separated list of reals, got {value!r}") from None
    return out


def _int_list(field, value):
    vals = _float_list(field, value)
    if any(v != int(v) for v in vals if math.isfinite(v)) or not all(math.isfinite(v) for v in vals):
        raise UsageError(f"{field}: expected integers, got {value!r}")
    return [int(v) for v in vals]


def parse_profile(text):
    """``name[:key=value,...]`` -> (name, params dict)."""
    name, _, rest = str(text).partition(":")
    name = name.strip()
    if name not in PROFILES:
        raise UsageError(f"profile: unknown profile {name!r} (known: {', '.join(PROFILES)})")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq or key.strip() not in ("omega0", "xi"):
            raise UsageError(f"profile: bad parameter {item!r} (expected omega0=<real> or xi=<real>)")
        try:
            params[key.strip()] = float(val)
        except ValueError:
            raise UsageError(f"profile: {key.strip()} must be a real, got {val!r}") from None
    return name, params


def build_parser():
    p = _Parser(prog="symplectic-qkde", description="Run accuracy and coefficient studies, writing CSV.")
    p.add_argument("scenario", choices=SCENARIOS)
    p.add_argument("--ell", help="order parameters, comma list")
    p.add_argument("--tau", help="step sizes, comma list")
    p.add_argument("--t0", type=float)
    p.add_argument("--tf", type=float)
    p.add_argument("--omega", help="constant rate w1,w2,w3 (lti-sweep)")
    p.add_argument("--profile", help="time-varying profile, e.g. special:omega0=6.2832,xi=0.03927")
    p.add_argument("--c", help="c grid for beta-table, comma list (default: 200 points per row)")
    p.add_argument("--oracle-substeps", type=int)
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.add_argument("--config", help="JSON file with any of the above; flags override it")
    return p


def resolve(args):
    """Merge the JSON config and the flags into a validated scenario dict."""
    conf = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                conf = json.load(fh)
        except OSError as e:
            raise UsageError(f"config: cannot read {args.config}: {e.strerror}") from None
        except json.JSONDecodeError as e:
            raise UsageError(f"config: invalid JSON in {args.config}: {e}") from None
        if not isinstance(conf, dict):
            raise UsageError("config: top level must be an object")
        conf = {k.replace("-", "_"): v for k, v in conf.items()}
        unknown = set(conf) - {"ell", "tau", "t0", "tf", "omega", "profile", "c", "oracle_substeps", "out"}
        if unknown:
            raise UsageError(f"config: unknown keys {sorted(unknown)}")
    for key in ("ell", "tau", "t0", "tf", "omega", "profile", "c", "oracle_substeps", "out"):
        v = getattr(args, key)
        if v is not None:
            conf[key] = v

    sc = args.scenario
    job = {"scenario": sc, "out": conf.get("out")}

    if sc == "beta-table":
        ells = _int_list("ell", conf.get("ell", "1,2,3,4,5,6"))
    elif sc == "coefficient-dump":
        ells = _int_list("ell", conf.get("ell", ",".join(str(i) for i in range(1, 13))))
    else:
        if "ell" not in conf:
            raise UsageError("ell: grid is required for this scenario")
        ells = _int_list("ell", conf["ell"])
    if not ells:
        raise UsageError("ell: grid is empty")
    bad = [e for e in ells if not 1 <= e <= MAX_ORDER]
    if bad:
        raise UsageError(f"ell: values must lie in 1..{MAX_ORDER}, got {bad}")
    job["ell"] = ells

    if sc == "beta-table":
        if "c" in conf:
            cs = _float_list("c", conf["c"])
            if not cs:
                raise UsageError("c: grid is empty")
            if any(not (math.isfinite(c) and c >= 0) for c in cs):
                raise UsageError("c: values must be finite and non-negative")
            job["c"] = cs
        else:
            job["c"] = None
        return job
    if sc == "coefficient-dump":
        return job

    if "tau" not in conf:
        raise UsageError("tau: grid is required for this scenario")
    taus = _float_list("tau", conf["tau"])
    if not taus:
        raise UsageError("tau: grid is empty")
    if any(not (math.isfinite(t) and t > 0) for t in taus):
        raise UsageError(f"tau: values must be positive and finite, got {taus}")
    job["tau"] = taus

    t0 = float(conf.get("t0", _SPAN[sc][0]))
    tf = float(conf.get("tf", _SPAN[sc][1]))
    if not (math.isfinite(t0) and math.isfinite(tf)):
        raise UsageError("t0/tf: span bounds must be finite")
    if not tf > t0:
        raise UsageError(f"tf: span must be positive, got [{t0}, {tf}]")
    short = [t for t in taus if step_count(t0, tf, t) < 1]
    if short:
        raise UsageError(f"tau: {short} exceed the span [{t0}, {tf}]")
    job["t0"], job["tf"] = t0, tf

    if sc == "lti-sweep":
        from .analysis.reference import LTI_OMEGA

        if "omega" in conf:
            om = _float_list("omega", conf["omega"])
            if len(om) != 3 or not all(math.isfinite(v) for v in om):
                raise UsageError(f"omega: expected three finite reals, got {conf['omega']!r}")
            job["omega"] = np.array(om)
        else:
            job["omega"] = np.array(LTI_OMEGA)
        if "profile" in conf:
            raise UsageError("profile: not used by lti-sweep (use --omega)")
        return job

    if "omega" in conf:
        raise UsageError(f"omega: not used by {sc} (use --profile)")
    name, params = parse_profile(conf.get("profile", _DEFAULT_PROFILE[sc]))
    if sc == "special-ltv-sweep" and name != "special":
        raise UsageError(f"profile: {sc} needs the 'special' profile (closed-form reference), got {name!r}")
    job["profile"] = (name, params)
    if sc == "general-ltv-oracle":
        subs = conf.get("oracle_substeps", 256)
        if not isinstance(subs, int) or isinstance(subs, bool) or subs < 1:
            raise UsageError(f"oracle_substeps: expected a positive integer, got {subs!r}")
        job["oracle_substeps"] = subs
    return job


def _make_profile(name, params):
    from .analysis.reference import DecayingLtvProfile, SpecialLtvProfile

    try:
        if name == "special":
            return SpecialLtvProfile(**params)
        return DecayingLtvProfile(**params)
    except InvalidArgumentError as e:
        raise UsageError(f"profile: {e}") from None


def _progress(msg):
    print(msg, file=sys.stderr, flush=True)


def _sweep_rows(job):
    from .analysis import errors
    from .analysis.reference import LTI_Q0

    sc, t0, tf = job["scenario"], job["t0"], job["tf"]
    profile = _make_profile(*job["profile"]) if "profile" in job else None
    for ell in job["ell"]:
        for tau in job["tau"]:
            if sc == "lti-sweep":
                rep = errors.lti_error(ell, tau, job["omega"], LTI_Q0, t0, tf)
            elif sc == "special-ltv-sweep":
                rep = errors.special_ltv_error(ell, tau, profile, t0, tf)
            else:
                rep = errors.oracle_error(ell, tau, profile, profile.q0, t0, tf, job["oracle_substeps"])
            _progress(f"{sc} ell={ell} tau={tau:g}: E_max={rep.e_max:.3e} at k={rep.k_argmax} ({rep.count} samples)")
            base = (sc, ell, tau, t0, tf)
            yield base + ("e_max", rep.e_max, "")
            yield base + ("k_argmax", int(rep.k_argmax), "")
            yield base + ("norm_drift", rep.norm_drift, "")


def _beta_rows(job):
    import warnings

    for ell in job["ell"]:
        cs = job["c"]
        if cs is None:
            hi = min(taylor_domain(ell), BETA_TABLE_CMAX)
            cs = np.linspace(0.0, hi, BETA_TABLE_POINTS, endpoint=False)
        n = 0
        for c in cs:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                v = beta(ell, c).beta
            n += 1
            yield ("beta-table", ell, "", "", "", "beta", v, float(c))
        _progress(f"beta-table ell={ell}: {n} points")


def _coefficient_rows(job):
    for ell in job["ell"]:
        co = gen_coeffs_alternative(ell)
        for name, seq in (("a", co.a), ("b", co.b)):
            for j, v in enumerate(seq):
                yield ("coefficient-dump", ell, "", "", "", name, v, j)
        _progress(f"coefficient-dump ell={ell}: {len(co.a)} + {len(co.b)} coefficients")


def run_scenario(job):
    """Compute all rows for a validated scenario; returns the CSV text."""
    sc = job["scenario"]
    if sc == "beta-table":
        rows = _beta_rows(job)
    elif sc == "coefficient-dump":
        rows = _coefficient_rows(job)
    else:
        rows = _sweep_rows(job)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in rows:
        w.writerow([row[0], row[1]] + [fmt(v) for v in row[2:5]] + [row[5], fmt(row[6]), fmt(row[7])])
    return buf.getvalue()


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        job = resolve(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    out = job.get("out")
    if out not in (None, "-"):
        parent = os.path.dirname(os.path.abspath(out))
        if not (os.path.isdir(parent) and os.access(parent, os.W_OK)) or os.path.isdir(out):
            print(f"I/O error: cannot write {out}", file=sys.stderr)
            return 2
    try:
        text = run_scenario(job)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except (PropagationError, SingularDenominatorError, ArithmeticError, InvalidArgumentError) as e:
        print(f"numerical error: {e}", file=sys.stderr)
        return 2
    if out in (None, "-"):
        sys.stdout.write(text)
        return 0
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as e:
        print(f"I/O error: cannot write {out}: {e.strerror}", file=sys.stderr)
        return 2
    _progress(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
