"""On-disk formats: frame files, model files and CSV interop.

Frame file (``.sbfm``), all integers little-endian::

    offset  size  field
    0       4     magic b"SBFM"
    4       2     version (u16, currently 1)
    6       8     n_frames (u64)
    14      4     n_dims (u32)
    18      2     dtype tag b"f8" (float64)
    20      ...   payload, row-major float64 LE, n_frames * n_dims * 8 bytes

Model file: an ASCII header of ``key = value`` lines opened by
``SBXMODEL 1`` and closed by ``end_header``, followed by a binary section
holding, for each layer in order, ``w`` (row-major), ``b`` and ``b_dec``
as float64 LE.  Floats in the header are written with ``float.hex`` so a
save/load round trip is bit-exact.
"""

from __future__ import annotations

import csv
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Activation, LayerParams, Network
from .features import GcnStats, WarpSpec
from .linalg import RNG_ALGORITHM

FRAME_MAGIC = b"SBFM"
FRAME_VERSION = 1
FRAME_DTYPE = b"f8"
_FRAME_HEADER = struct.Struct("<4sHQI2s")

MODEL_MAGIC = "SBXMODEL 1"
MODEL_END = "end_header"


class FormatError(ValueError):
    """A file does not follow the expected layout."""


def write_frames(path, frames):
    frames = np.ascontiguousarray(frames, dtype="<f8")
    if frames.ndim != 2:
        raise ValueError(f"frame matrix must be 2-D, got shape {frames.shape}")
    header = _FRAME_HEADER.pack(FRAME_MAGIC, FRAME_VERSION, frames.shape[0],
                                frames.shape[1], FRAME_DTYPE)
    with open(path, "wb") as f:
        f.write(header)
        f.write(frames.tobytes(order="C"))


def read_frames(path):
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < _FRAME_HEADER.size:
        raise FormatError(f"{path}: too short for a frame file header")
    magic, version, n_frames, n_dims, dtype = _FRAME_HEADER.unpack_from(raw)
    if magic != FRAME_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != FRAME_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if dtype != FRAME_DTYPE:
        raise FormatError(f"{path}: unsupported dtype tag {dtype!r}")
    payload = raw[_FRAME_HEADER.size:]
    if len(payload) != n_frames * n_dims * 8:
        raise FormatError(
            f"{path}: payload is {len(payload)} bytes, header promises "
            f"{n_frames} x {n_dims} float64"
        )
    return np.frombuffer(payload, dtype="<f8").reshape(n_frames, n_dims).astype(np.float64)


def frames_to_csv(frames, path):
    np.savetxt(path, np.asarray(frames, dtype=np.float64), delimiter=",", fmt="%.17g")


def frames_from_csv(path):
    return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2))


def write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(v) for v in row])


def _csv_cell(v):
    if isinstance(v, float):
        return repr(v)
    return v


@dataclass
class SpectralModel:
    """A trained network plus everything needed to preprocess its inputs."""

    network: Network
    gcn: GcnStats
    warp: WarpSpec
    meta: dict = field(default_factory=dict)


def _hexlist(values):
    return ",".join(float(v).hex() for v in values)


def save_model(path, model):
    net = model.network
    lines = [
        MODEL_MAGIC,
        f"dims = {','.join(str(d) for d in net.dims)}",
        f"enc_act = {','.join(layer.enc_act.value for layer in net.layers)}",
        f"dec_act = {','.join(layer.dec_act.value for layer in net.layers)}",
        f"gcn = {_hexlist([model.gcn.mean, model.gcn.scale, model.gcn.k_range])}",
        f"warp_kind = {model.warp.warp_kind}",
        f"warp_n_bins = {model.warp.n_bins}",
        f"warp_sample_rate = {float(model.warp.sample_rate).hex()}",
        f"rng = {RNG_ALGORITHM}",
    ]
    for key in sorted(model.meta):
        lines.append(f"{key} = {json.dumps(model.meta[key], sort_keys=True)}")
    lines.append(MODEL_END)
    header = ("\n".join(lines) + "\n").encode("ascii")
    body = b"".join(
        np.ascontiguousarray(arr, dtype="<f8").tobytes()
        for layer in net.layers for arr in (layer.w, layer.b, layer.b_dec)
    )
    with open(path, "wb") as f:
        f.write(header + body)


def load_model(path):
    raw = Path(path).read_bytes()
    end = raw.find(("\n" + MODEL_END + "\n").encode())
    if not raw.startswith(MODEL_MAGIC.encode() + b"\n") or end < 0:
        raise FormatError(f"{path}: not a model file")
    header = raw[:end].decode("ascii").split("\n")[1:]
    body = raw[end + len(MODEL_END) + 2:]
    fields = {}
    for line in header:
        key, sep, value = line.partition(" = ")
        if not sep:
            raise FormatError(f"{path}: malformed header line {line!r}")
        fields[key] = value

    try:
        dims = [int(d) for d in fields.pop("dims").split(",")]
        enc = [Activation.parse(a) for a in fields.pop("enc_act").split(",")]
        dec = [Activation.parse(a) for a in fields.pop("dec_act").split(",")]
        gcn = GcnStats(*(float.fromhex(v) for v in fields.pop("gcn").split(",")))
        warp = WarpSpec(int(fields.pop("warp_n_bins")),
                        float.fromhex(fields.pop("warp_sample_rate")),
                        fields.pop("warp_kind"))
        rng = fields.pop("rng")
    except KeyError as exc:
        raise FormatError(f"{path}: header is missing {exc}") from None
    if rng != RNG_ALGORITHM:
        raise FormatError(f"{path}: written with RNG {rng!r}, this build uses {RNG_ALGORITHM}")
    meta = {key: json.loads(value) for key, value in fields.items()}

    n_layers = len(dims) - 1
    if len(enc) != n_layers or len(dec) != n_layers:
        raise FormatError(f"{path}: activation lists do not match {n_layers} layers")
    expected = sum(dims[k] * dims[k + 1] + dims[k] + dims[k + 1] for k in range(n_layers))
    if len(body) != expected * 8:
        raise FormatError(
            f"{path}: binary section is {len(body)} bytes, dims {dims} need {expected * 8}"
        )
    values = np.frombuffer(body, dtype="<f8").astype(np.float64)
    layers, pos = [], 0
    for k in range(n_layers):
        n_in, n_out = dims[k], dims[k + 1]
        w = values[pos:pos + n_in * n_out].reshape(n_out, n_in)
        pos += n_in * n_out
        b = values[pos:pos + n_out]
        pos += n_out
        b_dec = values[pos:pos + n_in]
        pos += n_in
        layers.append(LayerParams(w.copy(), b.copy(), b_dec.copy(), enc[k], dec[k]))
    return SpectralModel(Network(layers), gcn, warp, meta)
