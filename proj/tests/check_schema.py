"""Validates the response samples written by test_service with jsonschema.

Usage: check_schema.py SCHEMA SAMPLES_DIR. Sample files are named
<case>.<definition>.json.
"""
import json
import pathlib
import sys

import jsonschema


def main() -> int:
    schema = json.loads(pathlib.Path(sys.argv[1]).read_text())
    jsonschema.Draft7Validator.check_schema(schema)
    samples = sorted(pathlib.Path(sys.argv[2]).glob("*.json"))
    if not samples:
        print("no samples found", file=sys.stderr)
        return 1
    failed = 0
    for path in samples:
        definition = path.name.split(".")[-2]
        sub = {"$ref": f"#/definitions/{definition}", "definitions": schema["definitions"]}
        errors = list(jsonschema.Draft7Validator(sub).iter_errors(json.loads(path.read_text())))
        for e in errors:
            print(f"{path.name}: {e.json_path}: {e.message}")
        failed += bool(errors)
    print(f"{len(samples) - failed}/{len(samples)} samples valid")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
