"""Checks golden transcripts against the websocket message schema.

Every server frame must validate. A client frame must validate unless the
server rejected it as malformed (BAD_MESSAGE, UNKNOWN_TYPE,
UNSUPPORTED_VERSION), in which case it must not.

usage: check_golden_schema.py SCHEMA GOLDEN_DIR
"""

import json
import pathlib
import sys

import jsonschema

MALFORMED = {"BAD_MESSAGE", "UNKNOWN_TYPE", "UNSUPPORTED_VERSION"}


def check(path, validator):
    problems = []
    lines = path.read_text().splitlines()
    for i, line in enumerate(lines):
        if line.startswith("< "):
            errors = list(validator.iter_errors(json.loads(line[2:])))
            if errors:
                problems.append(f"{path.name}:{i + 1}: server frame invalid: {errors[0].message}")
        elif line.startswith("> "):
            reply = lines[i + 1] if i + 1 < len(lines) and lines[i + 1].startswith("< ") else None
            code = json.loads(reply[2:]).get("code") if reply else None
            try:
                frame = json.loads(line[2:])
            except json.JSONDecodeError:
                if code != "BAD_MESSAGE":
                    problems.append(f"{path.name}:{i + 1}: unparsable client frame not rejected")
                continue
            valid = validator.is_valid(frame)
            if code in MALFORMED and valid:
                problems.append(f"{path.name}:{i + 1}: server rejected a schema-valid frame with {code}")
            if code not in MALFORMED and not valid:
                problems.append(f"{path.name}:{i + 1}: accepted client frame violates the schema")
    return problems


def main():
    schema = json.loads(pathlib.Path(sys.argv[1]).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    files = sorted(pathlib.Path(sys.argv[2]).glob("*.transcript"))
    if not files:
        print("no transcripts found")
        return 1
    problems = [p for f in files for p in check(f, validator)]
    for p in problems:
        print(p)
    print(f"{len(files)} transcripts, {len(problems)} problems")
    return 1 if problems else 0


if __name__ == "__main__":
    sys.exit(main())
