#!/usr/bin/env python3
# Copyright 2026 The deepforest Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Builds the LETTER, ADULT and YEAST train/test CSV files.

The UCI repository is not always reachable, so the raw files are pulled
from PyPI wheels that bundle verbatim copies:

  LETTER  keel-ds            (KEEL copy of the 20,000-row UCI file, shuffled)
  ADULT   responsibly        (original adult.data / adult.test)
  YEAST   imbalanced-databases (KEEL one-vs-rest binarizations; the ten
                              original classes are reassembled from them)

Output: <out>/{letter,adult,yeast}_{train,test}.csv, header row, all
feature cells numeric, label column named "class".

  python3 tools/data/prepare_uci_data.py --out data/uci
"""

import argparse
import csv
import os
import random
import subprocess
import sys
import tempfile
import zipfile

PACKAGES = {
    "keel-ds": "keel_ds",
    "responsibly": "responsibly",
    "imbalanced-databases": "imbalanced_databases",
}


def fetch_wheels(cache_dir):
    wheels = {}
    for pkg, prefix in PACKAGES.items():
        found = [f for f in os.listdir(cache_dir)
                 if f.lower().startswith(prefix) and f.endswith(".whl")]
        if not found:
            subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps",
                            "--only-binary=:all:", "-d", cache_dir, pkg],
                           check=True, stdout=subprocess.DEVNULL)
            found = [f for f in os.listdir(cache_dir)
                     if f.lower().startswith(prefix) and f.endswith(".whl")]
        wheels[pkg] = zipfile.ZipFile(os.path.join(cache_dir, found[0]))
    return wheels


def write_csv(path, n_features, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow([f"f{i}" for i in range(n_features)] + ["class"])
        for features, label in rows:
            w.writerow([format_number(v) for v in features] + [label])


def format_number(v):
    return repr(float(v)) if not float(v).is_integer() else str(int(v))


def build_letter(wheel, out):
    text = wheel.read("keel_ds/data/balanced/raw/letter.dat").decode()
    rows = []
    for line in text.splitlines():
        if not line.strip() or line.startswith("@"):
            continue
        cells = [c.strip() for c in line.split(",")]
        rows.append(([float(c) for c in cells[:-1]], cells[-1]))
    assert len(rows) == 20000, len(rows)
    # KEEL ships the file in shuffled order; first 16,000 rows train.
    write_csv(os.path.join(out, "letter_train.csv"), 16, rows[:16000])
    write_csv(os.path.join(out, "letter_test.csv"), 16, rows[16000:])


ADULT_CATEGORICAL = {1, 3, 5, 6, 7, 8, 9, 13}


def build_adult(wheel, out):
    def parse(name):
        rows = []
        for line in wheel.read(name).decode().splitlines():
            if not line.strip() or line.startswith("|"):
                continue
            cells = [c.strip() for c in line.split(",")]
            rows.append((cells[:-1], cells[-1].rstrip(".")))
        return rows

    train = parse("responsibly/dataset/adult/adult.data")
    test = parse("responsibly/dataset/adult/adult.test")
    assert len(train) == 32561 and len(test) == 16281, (len(train), len(test))
    # Ordinal codes by first appearance in the training file; "?" is its
    # own category. Unseen test categories get fresh codes.
    codes = {c: {} for c in ADULT_CATEGORICAL}

    def encode(cells):
        values = []
        for i, cell in enumerate(cells):
            if i in ADULT_CATEGORICAL:
                values.append(codes[i].setdefault(cell, len(codes[i])))
            else:
                values.append(float(cell))
        return values

    train_rows = [(encode(c), y) for c, y in train]
    test_rows = [(encode(c), y) for c, y in test]
    write_csv(os.path.join(out, "adult_train.csv"), 14, train_rows)
    write_csv(os.path.join(out, "adult_test.csv"), 14, test_rows)


YEAST_COUNTS = {"CYT": 463, "NUC": 429, "MIT": 244, "ME3": 163, "ME2": 51,
                "ME1": 44, "EXC": 35, "VAC": 30, "POX": 20, "ERL": 5}


def read_keel(wheel, name):
    """Returns (attribute names, [(features, is_positive)])."""
    names, rows = [], []
    text = wheel.read(f"imbalanced_databases/data/{name}/{name}.dat").decode()
    for line in text.splitlines():
        if line.lower().startswith("@attribute"):
            names.append(line.split()[1].lower())
        if not line.strip() or line.startswith("@"):
            continue
        cells = [c.strip() for c in line.split(",")]
        rows.append((tuple(round(float(c), 2) for c in cells[:-1]), cells[-1] == "positive"))
    return names[:-1], rows


def build_yeast(wheel, out):
    columns, full = read_keel(wheel, "yeast1")
    n = len(full)
    assert n == 1484, n
    features = [r[0] for r in full]
    labels = [None] * n

    # The binarized files are not all in the original row order, so classes
    # are assigned by feature-vector multiplicity: a file listing vector v
    # k times on its `side` claims k still-unresolved rows equal to v.
    # Duplicated vectors are interchangeable, so which row is claimed does
    # not matter. Some files drop a column; matching uses the shared ones.
    def claim(name, side_positive, cls):
        names, rows = read_keel(wheel, name)
        keep = [columns.index(c) for c in names]
        wanted = {}
        for feat, pos in rows:
            if pos == side_positive:
                wanted[feat] = wanted.get(feat, 0) + 1
        for i in range(n):
            key = tuple(features[i][j] for j in keep)
            if labels[i] is None and wanted.get(key, 0) > 0:
                labels[i] = cls
                wanted[key] -= 1
        assert not any(wanted.values()), name

    claim("yeast1", True, "NUC")
    claim("yeast3", True, "ME3")
    claim("yeast4", True, "ME2")
    claim("yeast5", True, "ME1")
    claim("yeast6", True, "EXC")
    claim("yeast-2_vs_4", False, "CYT")
    claim("yeast-1_vs_7", True, "VAC")
    claim("yeast-2_vs_8", True, "POX")
    for i in range(n):
        if labels[i] is None:
            labels[i] = "ERL" if features[i][4] == 1.0 else "MIT"

    counts = {}
    for y in labels:
        counts[y] = counts.get(y, 0) + 1
    assert counts == YEAST_COUNTS, counts

    # Seeded stratified 70/30 split -> 1,038 / 446.
    rng = random.Random(20170228)
    by_class = {}
    for i, y in enumerate(labels):
        by_class.setdefault(y, []).append(i)
    train_idx, test_idx = [], []
    for y in sorted(by_class):
        idx = by_class[y]
        rng.shuffle(idx)
        k = round(0.7 * len(idx))
        train_idx += idx[:k]
        test_idx += idx[k:]
    # Round-robin rounding may miss 1038 by one or two rows; move extras.
    while len(train_idx) > 1038:
        test_idx.append(train_idx.pop())
    while len(train_idx) < 1038:
        train_idx.append(test_idx.pop())
    train_idx.sort()
    test_idx.sort()
    write_csv(os.path.join(out, "yeast_train.csv"), 8,
              [(features[i], labels[i]) for i in train_idx])
    write_csv(os.path.join(out, "yeast_test.csv"), 8,
              [(features[i], labels[i]) for i in test_idx])


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="data/uci")
    parser.add_argument("--cache", default=None,
                        help="directory holding (or receiving) the wheels")
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        wheels = fetch_wheels(args.cache or tmp)
        build_letter(wheels["keel-ds"], args.out)
        build_adult(wheels["responsibly"], args.out)
        build_yeast(wheels["imbalanced-databases"], args.out)
    for name in sorted(os.listdir(args.out)):
        with open(os.path.join(args.out, name)) as f:
            print(f"{name}: {sum(1 for _ in f) - 1} rows")


if __name__ == "__main__":
    main()
