"""Validate gcilab JSON reports against schema/report.schema.json."""
import json
import pathlib
import sys

import jsonschema

schema_path = pathlib.Path(__file__).resolve().parent.parent / "schema" / "report.schema.json"
schema = json.loads(schema_path.read_text())
validator = jsonschema.Draft202012Validator(schema)

bad = 0
for name in sys.argv[1:]:
    doc = json.loads(pathlib.Path(name).read_text())
    errors = sorted(validator.iter_errors(doc), key=lambda e: e.path)
    if errors:
        bad += 1
        print(f"{name}: {errors[0].message}")
sys.exit(1 if bad else 0)
