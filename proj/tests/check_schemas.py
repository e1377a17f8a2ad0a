"""Runs each CLI command on the shipped models and checks every emitted JSON
document against the schema named by its "schema" field."""

import glob
import json
import os
import shutil
import subprocess
import sys
import tempfile

import jsonschema


def load_schemas(root):
    schemas = {}
    for path in glob.glob(os.path.join(root, "schemas", "*.schema.json")):
        with open(path) as f:
            s = json.load(f)
        jsonschema.Draft7Validator.check_schema(s)
        schemas[s["$id"]] = s
    return schemas


def main():
    exe, root = sys.argv[1], sys.argv[2]
    schemas = load_schemas(root)
    work = tempfile.mkdtemp(prefix="mmjump_schema_")
    try:
        models = sorted(glob.glob(os.path.join(root, "models", "*.json")))
        for i, model in enumerate(models):
            runs = [
                ["validate"],
                ["stationary"],
                ["limit", "--probe", "sine"],
                ["verify", "--N", "200", "--bootstrap", "10"],
            ]
            for args in runs:
                out = os.path.join(work, f"{i}_{args[0]}")
                cmd = [exe, args[0], "--model", model, "--out", out] + args[1:]
                code = subprocess.run(cmd, stdout=subprocess.DEVNULL, stderr=subprocess.PIPE).returncode
                if code not in (0, 1):
                    raise SystemExit(f"{' '.join(cmd)} exited {code}")

        docs = models + sorted(glob.glob(os.path.join(work, "*", "*.json")))
        seen = set()
        for path in docs:
            with open(path) as f:
                doc = json.load(f)
            sid = doc.get("schema")
            if sid not in schemas:
                raise SystemExit(f"{path}: unknown schema {sid!r}")
            jsonschema.validate(doc, schemas[sid])
            seen.add(sid)
        missing = set(schemas) - seen
        if missing:
            raise SystemExit(f"schemas never exercised: {sorted(missing)}")
        print(f"{len(docs)} documents valid against {len(schemas)} schemas")
    finally:
        shutil.rmtree(work)


if __name__ == "__main__":
    main()
