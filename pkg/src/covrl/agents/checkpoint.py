"""Versioned weight checkpoints: header with layer sizes, little-endian f64."""

from __future__ import annotations

import struct

import numpy as np

from covrl.errors import ShapeMismatch

MAGIC = b"CVRL"
VERSION = 1


def save_checkpoint(agent, path) -> None:
    nets = agent.networks()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<HH", VERSION, len(nets)))
        for name, net in nets.items():
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<H", len(net.sizes)))
            fh.write(struct.pack(f"<{len(net.sizes)}I", *net.sizes))
            flat = net.flat_params().astype("<f8")
            fh.write(struct.pack("<I", flat.size))
            fh.write(flat.tobytes())


def load_checkpoint(agent, path) -> None:
    nets = agent.networks()
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise ShapeMismatch("not a covrl checkpoint")
        version, count = struct.unpack("<HH", fh.read(4))
        if version != VERSION:
            raise ShapeMismatch(f"unsupported checkpoint version {version}")
        for _ in range(count):
            (name_len,) = struct.unpack("<H", fh.read(2))
            name = fh.read(name_len).decode("utf-8")
            (n_sizes,) = struct.unpack("<H", fh.read(2))
            sizes = list(struct.unpack(f"<{n_sizes}I", fh.read(4 * n_sizes)))
            (n_params,) = struct.unpack("<I", fh.read(4))
            flat = np.frombuffer(fh.read(8 * n_params), dtype="<f8")
            if name not in nets:
                raise ShapeMismatch(f"checkpoint has unknown network {name!r}")
            if nets[name].sizes != sizes:
                raise ShapeMismatch(f"network {name!r} shape mismatch")
            nets[name].load_flat(np.asarray(flat, dtype=np.float64))
