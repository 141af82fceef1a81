"""CLI: `harvest --job job.json` scores the job's models over its corpus and
writes the metadata/matrix CSVs."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from harvester.harvest import harvest
from harvester.job import load_job


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="harvest", description=__doc__)
    parser.add_argument("--job", required=True, help="job spec JSON file")
    parser.add_argument("--verbose", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        manifest = harvest(load_job(args.job))
    except (ValueError, RuntimeError, OSError, KeyError) as exc:
        sys.stderr.write(json.dumps({"error": str(exc)}) + "\n")
        return 1
    print(json.dumps({"texts_scored": manifest["texts_scored"], "models": len(manifest["models"])}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
