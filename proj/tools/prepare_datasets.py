#!/usr/bin/env python3
# Copyright 2026 The ADDM Authors
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
"""Rebuild the benchmark CSVs under data/ from UCI copies shipped on PyPI.

The UCI files come from two wheels that bundle them verbatim:
  keel-ds               (wisconsin, ionosphere, wdbc, wine)
  imbalanced-databases  (glass)

Outlier definitions follow the ODDS library conventions:
  breastw     malignant = outlier                       683 x 9,  rate 0.350
  ionosphere  'b' (bad) = outlier                        351 x 33, rate 0.359
  glass       class 6 (tableware) = outlier              214 x 9,  rate 0.042
  wbc         357 benign + 21 sampled malignant          378 x 30, rate 0.056
  wine        classes 2,3 + 10 sampled class-1 rows      129 x 13, rate 0.078

Usage: prepare_datasets.py [--wheels DIR] [--out DIR]
"""
import argparse
import csv
import glob
import os
import random
import subprocess
import tempfile
import zipfile

KEEL = "keel_ds/data/balanced/raw/"
GLASS = "imbalanced_databases/data/glass/glass.data.txt"
SEED = 42


def fetch(wheels):
    os.makedirs(wheels, exist_ok=True)
    for pkg in ("keel-ds==0.2.5", "imbalanced-databases==0.1.1"):
        subprocess.run(["pip", "download", "--no-deps", "-q", "-d", wheels, pkg], check=True)


def read_member(wheels, pattern, member):
    path = glob.glob(os.path.join(wheels, pattern))[0]
    with zipfile.ZipFile(path) as z:
        return z.read(member).decode()


def keel_rows(text):
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        rows.append([c.strip() for c in line.split(",")])
    return rows


def write(out, name, header, rows):
    with open(os.path.join(out, name + ".csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    n_out = sum(r[-1] == "1" for r in rows)
    print(f"{name}: {len(rows)} x {len(rows[0]) - 1}, outlier rate {n_out / len(rows):.4f}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--wheels", default=None)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    args = ap.parse_args()
    wheels = args.wheels or tempfile.mkdtemp()
    if not glob.glob(os.path.join(wheels, "keel_ds-*.whl")):
        fetch(wheels)
    os.makedirs(args.out, exist_ok=True)
    rng = random.Random(SEED)

    rows = keel_rows(read_member(wheels, "keel_ds-*.whl", KEEL + "wisconsin.dat"))
    data = [r[:-1] + ["1" if r[-1] == "4" else "0"] for r in rows]
    write(args.out, "breastw", [f"x{i}" for i in range(9)] + ["label"], data)

    rows = keel_rows(read_member(wheels, "keel_ds-*.whl", KEEL + "ionosphere.dat"))
    data = [r[:-1] + ["1" if r[-1] == "b" else "0"] for r in rows]
    write(args.out, "ionosphere", [f"x{i}" for i in range(33)] + ["label"], data)

    rows = keel_rows(read_member(wheels, "imbalanced_databases-*.whl", GLASS))
    data = [r[1:-1] + ["1" if r[-1] == "6" else "0"] for r in rows]
    write(args.out, "glass", [f"x{i}" for i in range(9)] + ["label"], data)

    rows = keel_rows(read_member(wheels, "keel_ds-*.whl", KEEL + "wdbc.dat"))
    benign = [r[:-1] + ["0"] for r in rows if r[-1] == "B"]
    malignant = [r[:-1] + ["1"] for r in rows if r[-1] == "M"]
    data = benign + rng.sample(malignant, 21)
    write(args.out, "wbc", [f"x{i}" for i in range(30)] + ["label"], data)

    rows = keel_rows(read_member(wheels, "keel_ds-*.whl", KEEL + "wine.dat"))
    inliers = [r[:-1] + ["0"] for r in rows if r[-1] in ("2", "3")]
    outliers = [r[:-1] + ["1"] for r in rows if r[-1] == "1"]
    data = inliers + rng.sample(outliers, 10)
    write(args.out, "wine", [f"x{i}" for i in range(13)] + ["label"], data)


if __name__ == "__main__":
    main()
