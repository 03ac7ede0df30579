"""Binary model checkpoints.

Layout (all integers little-endian u32, all floats little-endian f64):

    magic   b"CVEC"
    version u32 (currently 1)
    dims    u32 x 5: n_players, embedding_dim, players_per_side,
                     hidden_dim, n_outcomes
    arrays  row-major f64: embeddings, w_hidden, b_hidden, w_out, b_out
    crc     u32 CRC-32 of everything between the magic and the CRC

Loading verifies magic, version, dimensions, payload size, finiteness
and the CRC; load(save(m)) reproduces m bitwise.
"""

from __future__ import annotations

import hashlib
import struct
import zlib

import numpy as np

from .errors import CheckpointError
from .network import PARAM_NAMES, EmbeddingModel, ModelConfig

MAGIC = b"CVEC"
FORMAT_VERSION = 1


def checkpoint_bytes(model: EmbeddingModel) -> bytes:
    c = model.config
    payload = struct.pack(
        "<6I",
        FORMAT_VERSION,
        c.n_players,
        c.embedding_dim,
        c.players_per_side,
        c.hidden_dim,
        c.n_outcomes,
    )
    for name in PARAM_NAMES:
        payload += np.ascontiguousarray(getattr(model, name), dtype="<f8").tobytes()
    return MAGIC + payload + struct.pack("<I", zlib.crc32(payload) & 0xFFFFFFFF)


def save_checkpoint(model: EmbeddingModel, sink) -> None:
    """Write the model to a path or binary file object."""
    data = checkpoint_bytes(model)
    if hasattr(sink, "write"):
        sink.write(data)
    else:
        with open(sink, "wb") as fh:
            fh.write(data)


def load_checkpoint_bytes(data: bytes) -> EmbeddingModel:
    if len(data) < 4 + 24 + 4:
        raise CheckpointError("truncated checkpoint (shorter than any valid file)")
    if data[:4] != MAGIC:
        raise CheckpointError(f"bad magic {data[:4]!r}, expected {MAGIC!r}")
    payload, (crc_stored,) = data[4:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(payload) & 0xFFFFFFFF != crc_stored:
        raise CheckpointError("CRC mismatch: checkpoint is corrupt")
    version, v, h, n, i, o = struct.unpack("<6I", payload[:24])
    if version != FORMAT_VERSION:
        raise CheckpointError(f"unsupported format version {version}")
    try:
        config = ModelConfig(
            n_players=v, embedding_dim=h, hidden_dim=i, players_per_side=n, n_outcomes=o
        )
    except Exception as exc:
        raise CheckpointError(f"invalid dimensions in header: {exc}") from exc
    shapes = [(v, h), (2 * h, i), (i,), (i, o), (o,)]
    expected = 24 + sum(int(np.prod(s)) for s in shapes) * 8
    if len(payload) != expected:
        raise CheckpointError(
            f"payload size {len(payload)} does not match header dimensions "
            f"(expected {expected})"
        )
    arrays = []
    offset = 24
    for shape in shapes:
        count = int(np.prod(shape))
        arr = np.frombuffer(payload, dtype="<f8", count=count, offset=offset)
        arrays.append(arr.astype(np.float64).reshape(shape))
        offset += count * 8
    if any(not np.all(np.isfinite(a)) for a in arrays):
        raise CheckpointError("checkpoint contains non-finite parameters")
    return EmbeddingModel(config, *arrays)


def load_checkpoint(source) -> EmbeddingModel:
    """Read a model from a path or binary file object."""
    if hasattr(source, "read"):
        data = source.read()
    else:
        with open(source, "rb") as fh:
            data = fh.read()
    return load_checkpoint_bytes(data)


def checkpoint_sha256(model: EmbeddingModel) -> str:
    """Content hash of the serialized model (reported by the service)."""
    return hashlib.sha256(checkpoint_bytes(model)).hexdigest()
