"""End-to-end runs of the resdet binary on the shipped configs."""
import json
import math
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

binary, root = pathlib.Path(sys.argv[1]), pathlib.Path(sys.argv[2])
config_schema = json.loads((root / "schemas" / "config.schema.json").read_text())
report_schema = json.loads((root / "schemas" / "report.schema.json").read_text())
failures = []


def check(cond, message):
    if not cond:
        failures.append(message)


def run(config, out, *extra):
    return subprocess.run([str(binary), "--config", str(config), "--out", str(out), *extra],
                          capture_output=True, text=True)


with tempfile.TemporaryDirectory() as tmp:
    tmp = pathlib.Path(tmp)
    for cfg in sorted((root / "configs").glob("*.json")):
        doc = json.loads(cfg.read_text())
        jsonschema.validate(doc, config_schema)
        out = tmp / cfg.stem
        proc = run(cfg, out, "--x-grid", "8")
        check(proc.returncode == 0, f"{cfg.name}: exit {proc.returncode}: {proc.stderr}")
        reports = sorted(out.glob("*.json"))
        check(len(reports) == len(doc["tasks"]), f"{cfg.name}: {len(reports)} reports")
        for rep in reports:
            jsonschema.validate(json.loads(rep.read_text()), report_schema)

    t2 = json.loads((tmp / "t2_laplace" / "detres_lap1.json").read_text())
    check(abs(t2["value_re"] - 2 * math.pi) < 1e-8, f"T2 detres {t2['value_re']}")
    check(abs(t2["exp_value_re"] - math.exp(2 * math.pi)) < 1e-5, "exp value")
    sc = json.loads((tmp / "selfcheck" / "selfcheck.json").read_text())
    check(sc["failed"] == 0, f"selfcheck failures: {sc['failed']}")

    bad = tmp / "bad.json"
    bad.write_text(json.dumps({
        "manifold": {"n": 2},
        "operators": {"b": {"builder": "terms", "order": 1, "terms": [{"degree": 1, "expr": "xi(1) +"}]}},
        "tasks": [{"kind": "detres", "operator": "b"}]}))
    proc = run(bad, tmp / "bad")
    check(proc.returncode == 2 and "SyntaxError" in proc.stderr, f"bad expr: exit {proc.returncode}: {proc.stderr}")
    proc = run(tmp / "absent.json", tmp / "absent")
    check(proc.returncode == 2, f"missing config: exit {proc.returncode}")

    csv_out = tmp / "csv"
    proc = run(root / "configs" / "t2_laplace.json", csv_out, "--format", "csv", "--task", "zeta_poly_lap1")
    check(proc.returncode == 0, f"csv run: {proc.stderr}")
    lines = (csv_out / "zeta_poly_lap1.csv").read_text().splitlines()
    check(lines[0] == "task,operator,t,value_re,value_im,quad_error" and len(lines) == 4, f"csv: {lines}")

for f in failures:
    print("FAIL:", f)
print("smoke:", "ok" if not failures else f"{len(failures)} failures")
sys.exit(1 if failures else 0)
