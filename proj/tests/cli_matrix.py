#!/usr/bin/env python3
"""Scripted matrix of CLI invocations checking output values and exit codes."""

import json
import math
import os
import subprocess
import sys
import tempfile

CLI = sys.argv[1] if len(sys.argv) > 1 else "./nucalc"

failures = []
checks = 0


def run(args, env=None):
    e = dict(os.environ)
    e.pop("NUCALC_CONFIG", None)
    if env:
        e.update(env)
    return subprocess.run([CLI] + args, capture_output=True, text=True, timeout=120, env=e)


def record(name, ok, detail=""):
    global checks
    checks += 1
    if not ok:
        failures.append((name, detail))
        print(f"FAIL {name}: {detail}")
    else:
        print(f"ok   {name}")


def expect(name, args, code, contains=None, value=None, rel=1e-9, env=None):
    r = run(args, env=env)
    if r.returncode != code:
        record(name, False, f"exit {r.returncode}, wanted {code}; stderr: {r.stderr.strip()}")
        return None
    if contains is not None and contains not in r.stdout:
        record(name, False, f"stdout lacks {contains!r}: {r.stdout.strip()}")
        return None
    if value is not None:
        got = parse_value(r.stdout)
        if got is None or abs(got - value) > rel * max(1.0, abs(value)):
            record(name, False, f"value {got} != {value}")
            return None
    record(name, True)
    return r


def parse_value(stdout):
    for line in stdout.splitlines():
        for tok in line.split():
            if tok.startswith("value="):
                return float(tok[len("value="):])
    return None


# --- eval ---------------------------------------------------------------
expect("eval gamma 5", ["eval", "--fn", "gamma", "--x", "5"], 0, value=24.0, rel=1e-12)
expect("eval gamma pole", ["eval", "--fn", "gamma", "--x", "0"], 2)
expect("eval gamma missing flag", ["eval", "--fn", "gamma"], 2)
expect("eval unknown fn", ["eval", "--fn", "nosuch", "--x", "1"], 2)
expect("eval beta", ["eval", "--fn", "beta", "--z", "2", "--y", "3"], 0, value=1.0 / 12.0,
       rel=1e-12)
expect("eval extbeta p=0", ["eval", "--fn", "extbeta", "--z", "2", "--y", "3", "--p", "0"], 0,
       value=1.0 / 12.0, rel=1e-10)
expect("eval extbeta bad domain", ["eval", "--fn", "extbeta", "--z", "-1", "--y", "1", "--p", "0"],
       2)
expect("eval ml1 e", ["eval", "--fn", "ml1", "--alpha", "1", "--z", "1"], 0, value=math.e,
       rel=1e-12)
expect("eval ml3", ["eval", "--fn", "ml3", "--rho", "1.5", "--lambda", "0.7", "--delta", "1.2",
                    "--z", "0.8"], 0, value=3.842377197712758, rel=1e-11)
expect("eval mlext", ["eval", "--fn", "mlext", "--theta", "1", "--vartheta", "1", "--nu", "1",
                      "--c", "2", "--p", "1", "--z", "0.5"], 0, value=0.01135338461024392,
       rel=1e-10)
expect("eval mlextgen divergent", ["eval", "--fn", "mlextgen", "--mu", "1", "--delta", "1",
                                   "--vartheta", "1", "--q", "2", "--c", "3", "--p", "0", "--z",
                                   "0.3"], 3)
expect("eval mltrunc", ["eval", "--fn", "mltrunc", "--i", "1", "--z", "0.5"], 0, value=1.5,
       rel=1e-10)

# --- deriv --------------------------------------------------------------
expect("deriv chain t^2", ["deriv", "--expr", "t^2", "--t", "1", "--mu", "0.5"], 0, value=2.0,
       rel=1e-10)
expect("deriv constant", ["deriv", "--expr", "7", "--t", "3", "--mu", "0.3"], 0, value=0.0)
expect("deriv parse error", ["deriv", "--expr", "t^^2", "--t", "1", "--mu", "0.5"], 2)
expect("deriv t<=0", ["deriv", "--expr", "t^2", "--t", "-1", "--mu", "0.5"], 2)
expect("deriv limit regime", ["deriv", "--expr", "t^2", "--t", "1", "--mu", "0.5", "--method",
                              "limit", "--params", "1,1,1,2,0.5"], 4)
r = expect("deriv limit table", ["deriv", "--expr", "t^2", "--t", "1", "--mu", "0.5", "--method",
                                 "limit"], 0, contains="observed_order=", value=2.0, rel=1e-6)
if r is not None:
    eps_lines = [l for l in r.stdout.splitlines() if l.startswith("eps=")]
    record("deriv limit eps rows", len(eps_lines) == 5, f"{len(eps_lines)} rows")

# --- integ --------------------------------------------------------------
expect("integ ones", ["integ", "--expr", "1", "--a", "0", "--t", "1", "--mu", "0.5"], 0,
       value=2.0, rel=1e-10)
expect("integ t=a", ["integ", "--expr", "t", "--a", "1", "--t", "1", "--mu", "0.7"], 0, value=0.0)
r = expect("integ positive", ["integ", "--expr", "sin(t)", "--a", "0", "--t", "1", "--mu", "0.5"],
           0)
if r is not None:
    record("integ positivity value", parse_value(r.stdout) > 0.0, r.stdout.strip())
expect("integ domain", ["integ", "--expr", "ln(t - 5)", "--a", "0", "--t", "1", "--mu", "0.5"], 2)
expect("integ reversed", ["integ", "--expr", "t", "--a", "2", "--t", "1", "--mu", "0.5"], 2)

# --- verify -------------------------------------------------------------
with tempfile.TemporaryDirectory() as tmp:
    out1 = os.path.join(tmp, "r1.json")
    out2 = os.path.join(tmp, "r2.json")
    r1 = expect("verify seed 42", ["verify", "--seed", "42", "--cases", "2", "--out", out1], 0,
                contains="failed=0")
    r2 = expect("verify rerun", ["verify", "--seed", "42", "--cases", "2", "--out", out2], 0)
    if r1 is not None and r2 is not None:
        d1 = json.load(open(out1))
        d2 = json.load(open(out2))
        record("verify reproducible totals", d1["totals"] == d2["totals"],
               f"{d1['totals']} vs {d2['totals']}")
        record("verify schema", all(k in d1 for k in ("suite_version", "seed", "totals", "cases")),
               str(list(d1)))
        case = d1["cases"][0]
        record("verify case fields",
               all(k in case for k in
                   ("theorem_id", "seed", "case_index", "inputs", "residual", "tolerance",
                    "passed")), str(list(case)))
expect("verify zero cases", ["verify", "--cases", "0"], 2)
expect("verify bad out", ["verify", "--cases", "1", "--out", "/no_such_dir_anywhere/x.json"], 5)

# --- table --------------------------------------------------------------
r = expect("table deriv csv", ["table", "--expr", "t^2", "--op", "deriv", "--t-min", "1",
                               "--t-max", "2", "--steps", "3"], 0, contains="t,value")
if r is not None:
    lines = r.stdout.strip().splitlines()
    record("table row count", len(lines) == 4, str(lines))
    ok = True
    for line, t in zip(lines[1:], (1.0, 1.5, 2.0)):
        tv, vv = (float(tok) for tok in line.split(","))
        ok = ok and abs(tv - t) < 1e-15 and abs(vv - 2.0 * t ** 1.5) < 1e-9
    record("table deriv values", ok, r.stdout)

r = expect("table json", ["table", "--expr", "t^2", "--op", "deriv", "--t-min", "1", "--t-max",
                          "2", "--steps", "3", "--format", "json"], 0)
if r is not None:
    rows = json.loads(r.stdout)
    record("table json shape", isinstance(rows, list) and len(rows) == 3, r.stdout)
    record("table json matches csv", all(
        abs(row["value"] - 2.0 * row["t"] ** 1.5) < 1e-9 for row in rows), r.stdout)

r = expect("table integ diagnostics", ["table", "--expr", "1", "--op", "integ", "--t-min", "0.5",
                                       "--t-max", "1", "--steps", "2"], 0,
           contains="t,value,error_estimate")
expect("table ml3", ["table", "--op", "ml3", "--t-min", "0.2", "--t-max", "0.8", "--steps", "2"],
       0, contains="t,value,terms_used")
expect("table bad grid", ["table", "--expr", "t", "--op", "deriv", "--t-min", "2", "--t-max", "1",
                          "--steps", "3"], 2)
expect("table one step", ["table", "--expr", "t", "--op", "deriv", "--t-min", "1", "--t-max", "2",
                          "--steps", "1"], 2)

# --- config -------------------------------------------------------------
with tempfile.TemporaryDirectory() as tmp:
    cfg = os.path.join(tmp, "cfg.txt")
    with open(cfg, "w") as fh:
        fh.write("params.alpha=1.1\nparams.beta=0.8\nparams.gamma=1.3\n"
                 "params.c=2.4\nparams.p=0.7\n")
    base = run(["deriv", "--expr", "t^3", "--t", "1.4", "--mu", "0.6"])
    via_flag = run(["deriv", "--expr", "t^3", "--t", "1.4", "--mu", "0.6", "--config", cfg])
    via_env = run(["deriv", "--expr", "t^3", "--t", "1.4", "--mu", "0.6"],
                  env={"NUCALC_CONFIG": cfg})
    flag_wins = run(["deriv", "--expr", "t^3", "--t", "1.4", "--mu", "0.6", "--config", cfg,
                     "--params", "1,1,1,2,0"])
    record("config changes params", parse_value(via_flag.stdout) != parse_value(base.stdout),
           via_flag.stdout)
    record("config via env matches flag",
           parse_value(via_env.stdout) == parse_value(via_flag.stdout), via_env.stdout)
    record("explicit flag beats config",
           abs(parse_value(flag_wins.stdout) - parse_value(base.stdout)) < 1e-12,
           flag_wins.stdout)
    bad = os.path.join(tmp, "bad.txt")
    with open(bad, "w") as fh:
        fh.write("bogus.key=1\n")
    expect("config unknown key", ["deriv", "--expr", "t", "--t", "1", "--mu", "0.5", "--config",
                                  bad], 2)
    expect("config missing file", ["deriv", "--expr", "t", "--t", "1", "--mu", "0.5", "--config",
                                   os.path.join(tmp, "absent.txt")], 5)

print(f"\n{checks - len(failures)}/{checks} checks passed")
sys.exit(1 if failures else 0)
