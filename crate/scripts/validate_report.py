#!/usr/bin/env python3
"""Validate estimate report JSON files against the shipped schema.

usage: validate_report.py SCHEMA REPORT...
Exit 0 when every report validates, 1 otherwise.
"""
import json
import sys

import jsonschema


def main(argv):
    if len(argv) < 3:
        print(__doc__, file=sys.stderr)
        return 1
    with open(argv[1]) as fh:
        schema = json.load(fh)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    bad = 0
    for path in argv[2:]:
        with open(path) as fh:
            doc = json.load(fh)
        for err in validator.iter_errors(doc):
            print(f"{path}: {err.json_path}: {err.message}", file=sys.stderr)
            bad += 1
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
