#!/usr/bin/env python3
# Copyright 2026 The qfs Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Convert the digits bundled in the npm `mnist` package into IDX files.

The package ships 10,000 MNIST digits (1,000 per class) as JSON arrays of
pixel intensities rounded to three decimals. This script restores the byte
values, shuffles with a fixed seed and writes a train/test split in the
standard IDX layout:

    npm pack mnist && tar xzf mnist-*.tgz
    python3 tools/mnist_from_npm.py package data/mnist
"""
import argparse
import json
import pathlib
import random
import struct


def write_idx_images(path, images, width):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), width, width))
        for img in images:
            f.write(bytes(img))


def write_idx_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(bytes(labels))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("package_dir")
    ap.add_argument("out_dir")
    ap.add_argument("--test", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    digits = pathlib.Path(args.package_dir) / "src" / "digits"
    samples = []
    for label in range(10):
        raw = json.loads((digits / f"{label}.json").read_text())["data"]
        count = len(raw) // 784
        for s in range(count):
            px = [min(255, max(0, round(v * 255))) for v in raw[s * 784:(s + 1) * 784]]
            samples.append((px, label))

    random.Random(args.seed).shuffle(samples)
    test, train = samples[:args.test], samples[args.test:]
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, part in (("train", train), ("t10k", test)):
        write_idx_images(out / f"{name}-images-idx3-ubyte", [p for p, _ in part], 28)
        write_idx_labels(out / f"{name}-labels-idx1-ubyte", [l for _, l in part])
    print(f"wrote {len(train)} train / {len(test)} test samples to {out}")


if __name__ == "__main__":
    main()
