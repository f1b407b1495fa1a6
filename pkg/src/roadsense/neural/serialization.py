"""RSM1 model container.

Layout: ``b"RSM1"``, u64 length + UTF-8 JSON header (spec and meta),
then for every parameter array in layer order (keys sorted) a u64 byte
length followed by little-endian float32 data.  All integers are
little-endian.
"""
from __future__ import annotations

import io
import json
import struct

import numpy as np

from ..errors import ModelError
from .model import ModelSpec, TrainedModel

MAGIC = b"RSM1"
_U64 = struct.Struct("<Q")


def dumps(model):
    header = json.dumps({"spec": model.spec.to_dict(), "meta": model.meta}, sort_keys=True).encode()
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(_U64.pack(len(header)))
    buf.write(header)
    for p in model.params:
        for key in sorted(p):
            blob = np.ascontiguousarray(p[key], dtype="<f4").tobytes()
            buf.write(_U64.pack(len(blob)))
            buf.write(blob)
    return buf.getvalue()


def loads(data):
    if data[:4] != MAGIC:
        raise ModelError("not an RSM1 model file")
    pos = 4

    def take(n):
        nonlocal pos
        if pos + n > len(data):
            raise ModelError("truncated model file")
        chunk = data[pos:pos + n]
        pos += n
        return chunk

    (hlen,) = _U64.unpack(take(8))
    header = json.loads(take(hlen))
    spec = ModelSpec.from_dict(header["spec"])
    shapes = spec.shapes()
    rng = np.random.default_rng(0)
    params = []
    for i, layer in enumerate(spec.layers):
        ref = layer.init(rng, shapes[i], np.float32)
        p = {}
        for key in sorted(ref):
            (n,) = _U64.unpack(take(8))
            if n != ref[key].nbytes:
                raise ModelError(f"layer {i} {key}: blob of {n} bytes, expected {ref[key].nbytes}")
            p[key] = np.frombuffer(take(n), dtype="<f4").astype(np.float32).reshape(ref[key].shape)
        params.append(p)
    if pos != len(data):
        raise ModelError("trailing bytes after model parameters")
    return TrainedModel(spec, params, header.get("meta", {}))


def save_model(model, path):
    with open(path, "wb") as fh:
        fh.write(dumps(model))


def load_model(path):
    with open(path, "rb") as fh:
        return loads(fh.read())
