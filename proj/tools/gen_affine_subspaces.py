#!/usr/bin/env python3
# Copyright 2026 The algext Authors.
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

"""Writes data/v1/affine_f2_12.json: affine subspaces of F_2^12 of codim <= 2.

Each subspace is {x : <a_i, x> = b_i}. Row a_i is a 12-bit integer whose bit
j is the coefficient of x_{j+1}.

  codim 0   the whole space
  codim 1   every hyperplane (all nonzero a, both b)
  codim 2   every pair of coordinate equations, plus 512 random pairs
"""

import json
import random
import sys
from pathlib import Path

N = 12


def main() -> None:
    rng = random.Random(2026)
    subs = [{"id": "full", "rows": [], "rhs": []}]
    for a in range(1, 1 << N):
        for b in (0, 1):
            subs.append({"id": f"h{a:03x}-{b}", "rows": [a], "rhs": [b]})
    for i in range(N):
        for j in range(i + 1, N):
            for b in range(4):
                subs.append({"id": f"c{i}-{j}-{b}", "rows": [1 << i, 1 << j], "rhs": [b & 1, b >> 1]})
    seen = set()
    while len(seen) < 512:
        a1 = rng.randrange(1, 1 << N)
        a2 = rng.randrange(1, 1 << N)
        if a1 == a2:
            continue
        b = rng.randrange(4)
        key = (min(a1, a2), max(a1, a2), b)
        if key in seen:
            continue
        seen.add(key)
        subs.append({"id": f"r{len(seen):03d}", "rows": [a1, a2], "rhs": [b & 1, b >> 1]})
    doc = {
        "version": 1,
        "p": 2,
        "n": N,
        "description": "Affine subspaces {x : <a_i, x> = b_i} of F_2^12; bit j of a row is the coefficient of x_(j+1).",
        "subspaces": subs,
    }
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data/v1/affine_f2_12.json"
    with open(out, "w") as f:
        json.dump(doc, f, separators=(",", ":"))
        f.write("\n")
    print(f"wrote {len(subs)} subspaces to {out}")


if __name__ == "__main__":
    main()
