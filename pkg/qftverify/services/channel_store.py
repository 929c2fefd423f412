"""JSON file format for Kraus channels.

Each Kraus entry is stored as a ``[real, imag]`` pair of ``float.hex`` strings,
so a save/load cycle reproduces the arrays bit for bit::

    {"format": "kraus-channel", "version": 1, "dim": 4, "rank": 1,
     "kraus": [[["0x1.0p-1", "0x0.0p+0"], ...], ...]}
"""
from __future__ import annotations

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from ..exceptions import InvalidChannelError, ReportIOError
from .channel import KrausChannel

logger = logging.getLogger(__name__)

CHANNEL_FORMAT = "kraus-channel"
CHANNEL_FORMAT_VERSION = 1


def _to_document(c: KrausChannel) -> Dict[str, Any]:
    rows = []
    for op in c.kraus_ops:
        flat = op.reshape(-1)
        rows.append([[float(z.real).hex(), float(z.imag).hex()] for z in flat])
    return {
        "format": CHANNEL_FORMAT,
        "version": CHANNEL_FORMAT_VERSION,
        "dim": c.dim,
        "rank": c.rank,
        "kraus": rows,
    }


def _from_document(doc: Dict[str, Any]) -> KrausChannel:
    if doc.get("format") != CHANNEL_FORMAT:
        raise InvalidChannelError(f"not a {CHANNEL_FORMAT} document: format={doc.get('format')!r}")
    if doc.get("version") != CHANNEL_FORMAT_VERSION:
        raise InvalidChannelError(f"unsupported channel format version {doc.get('version')!r}")
    try:
        dim = int(doc["dim"])
        rank = int(doc["rank"])
        rows = doc["kraus"]
        if len(rows) != rank:
            raise InvalidChannelError(f"header says rank {rank}, found {len(rows)} operators")
        ops = np.empty((rank, dim * dim), dtype=np.complex128)
        for i, row in enumerate(rows):
            if len(row) != dim * dim:
                raise InvalidChannelError(f"operator {i} has {len(row)} entries, expected {dim * dim}")
            ops[i] = [complex(float.fromhex(re), float.fromhex(im)) for re, im in row]
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidChannelError(f"malformed channel document: {e}") from e
    return KrausChannel(ops.reshape(rank, dim, dim))


def dumps_channel(c: KrausChannel) -> str:
    return json.dumps(_to_document(c))


def loads_channel(text: str) -> KrausChannel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidChannelError(f"channel file is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise InvalidChannelError("channel document must be a JSON object")
    return _from_document(doc)


def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as e:
        raise ReportIOError(f"could not write {path}: {e}") from e
    return path


def save_channel(c: KrausChannel, path: Union[str, Path]) -> Path:
    written = atomic_write_text(path, dumps_channel(c))
    logger.info("Saved channel (dim=%d, rank=%d) to %s", c.dim, c.rank, written)
    return written


def load_channel(path: Union[str, Path]) -> KrausChannel:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ReportIOError(f"could not read {path}: {e}") from e
    return loads_channel(text)


__all__ = [
    "CHANNEL_FORMAT",
    "CHANNEL_FORMAT_VERSION",
    "dumps_channel",
    "loads_channel",
    "save_channel",
    "load_channel",
    "atomic_write_text",
]
