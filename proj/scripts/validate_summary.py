#!/usr/bin/env python3
# Copyright 2026 The hapticbench Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Validate a report summary.json against the shipped JSON schema."""

import argparse
import json
import sys

import jsonschema


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("schema")
    parser.add_argument("summary")
    args = parser.parse_args()
    with open(args.schema) as f:
        schema = json.load(f)
    with open(args.summary) as f:
        summary = json.load(f)
    try:
        jsonschema.validate(summary, schema)
    except jsonschema.ValidationError as e:
        print(f"{args.summary}: {e.message}", file=sys.stderr)
        return 1
    print(f"{args.summary}: valid")
    return 0


if __name__ == "__main__":
    sys.exit(main())
