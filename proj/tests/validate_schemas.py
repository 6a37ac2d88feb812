"""Runs the CLI and validates its JSON output against the shipped schemas."""

import json
import pathlib
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource


def main() -> int:
    tool, data = sys.argv[1], pathlib.Path(sys.argv[2])
    schemas = {p.name: json.loads(p.read_text()) for p in (data / "schemas").glob("*.schema.json")}
    registry = Registry().with_resources(
        (name, Resource.from_contents(doc)) for name, doc in schemas.items())
    cur = data / "currents"

    def check(schema, args, expect_code=0):
        proc = subprocess.run([tool, *args], capture_output=True, text=True)
        if proc.returncode != expect_code:
            print(f"exit {proc.returncode} for {args}: {proc.stderr}")
            return False
        validator = jsonschema.Draft202012Validator(schemas[schema], registry=registry)
        errors = list(validator.iter_errors(json.loads(proc.stdout)))
        for e in errors[:3]:
            print(f"{args}: {e.message}")
        return not errors

    ok = True
    for spec in sorted(cur.glob("*.json")):
        validator = jsonschema.Draft202012Validator(schemas["current.schema.json"], registry=registry)
        ok &= not list(validator.iter_errors(json.loads(spec.read_text())))
    s_eps = ["--current", str(cur / "s_eps.json"), "--eps", "0.5"]
    log = ["--current", str(cur / "log.json")]
    ok &= check("profile.schema.json", ["profile", *s_eps, "--format", "json"])
    ok &= check("profile.schema.json", ["profile", *log, "--format", "json", "--weight", "aniso:b=1,2"])
    ok &= check("limit.schema.json", ["limit", *s_eps, "--weight", "pow:k=2"])
    ok &= check("limit.schema.json", ["limit", *log])
    ok &= check("condition_c.schema.json", ["check-c", *s_eps])
    ok &= check("condition_c.schema.json", ["check-c", *log])
    ok &= check("reports.schema.json", ["verify", *s_eps])
    ok &= check("reports.schema.json", ["verify", *log])
    ok &= check("reports.schema.json", ["panel"])
    print("schemas ok" if ok else "schema validation failed")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
