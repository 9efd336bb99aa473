"""Rebuild the bundled MNIST sample from mlxtend's ``mnist_5k.csv.gz``.

Usage: python make_mnist_sample.py path/to/mnist_5k.csv.gz

Writes the first 60 images of every digit, interleaved by digit, as
gzipped IDX files next to this script. The IDX bytes are produced with
``struct`` directly so the package's own writer is never involved.
"""
import gzip
import struct
import sys
from pathlib import Path

import numpy as np

PER_DIGIT = 60

table = np.loadtxt(sys.argv[1], delimiter=",").astype(np.uint8)
pixels, labels = table[:, :-1], table[:, -1]
order = np.stack([np.flatnonzero(labels == d)[:PER_DIGIT] for d in range(10)], axis=1).ravel()
pixels, labels = pixels[order], labels[order]

here = Path(__file__).parent
with gzip.GzipFile(here / "mnist-sample-images-idx3-ubyte.gz", "wb", mtime=0) as fh:
    fh.write(struct.pack(">IIII", 0x803, len(labels), 28, 28))
    fh.write(pixels.tobytes())
with gzip.GzipFile(here / "mnist-sample-labels-idx1-ubyte.gz", "wb", mtime=0) as fh:
    fh.write(struct.pack(">II", 0x801, len(labels)))
    fh.write(labels.tobytes())
