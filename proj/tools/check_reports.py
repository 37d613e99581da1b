#!/usr/bin/env python3
"""Run the bundled scenarios through the CLI and validate each report.json."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

root = pathlib.Path(__file__).resolve().parent.parent
cli = sys.argv[1]
names = sys.argv[2:] or ["arc-circle", "chain-fermion", "cap-sphere"]
schema = json.loads((root / "schema" / "report.schema.json").read_text())
failed = 0
with tempfile.TemporaryDirectory() as tmp:
    for name in names:
        for sub in ("poset-check", "all"):
            out = pathlib.Path(tmp) / name / sub
            rc = subprocess.run([cli, sub, "--config", str(root / "scenarios" / f"{name}.json"), "--out", str(out)],
                                stdout=subprocess.DEVNULL).returncode
            try:
                jsonschema.validate(json.loads((out / "report.json").read_text()), schema)
                err = None
            except (OSError, jsonschema.ValidationError) as e:
                err = str(e).splitlines()[0]
            ok = rc == 0 and err is None
            failed += not ok
            print(f"{'ok' if ok else 'FAIL'} {name} {sub} rc={rc}" + (f" {err}" if err else ""))
sys.exit(1 if failed else 0)
