"""Container format for compressed files

    b"AEDC" | version (1 byte) | flags (1 byte)
    | table section | total symbol count (LEB128) | block count (LEB128)
    | per block: length (LEB128) + bitstream bytes

The table section is a LEB128 length followed by the serialized table when
it is embedded, or the 32-byte table digest when the table is kept in a side
file. Empty inputs carry no table section and no blocks.
"""


import logging
from dataclasses import dataclass
from typing import Sequence

from .codec import DIGEST_SIZE, leb128_groups
from .errors import MalformedStream, VersionMismatch

logger = logging.getLogger(__name__)

CONTAINER_MAGIC = b"AEDC"
CONTAINER_VERSION = 1

FLAG_EMBEDDED = 0
FLAG_REFERENCE = 1
FLAG_EMPTY = 2


@dataclass(frozen=True)
class Container:
    """Parsed container; `table` is empty unless the table is embedded"""
    flags: int
    table: bytes
    digest: bytes
    length: int
    blocks: tuple[bytes, ...]

    @property
    def embedded(self) -> bool:
        return self.flags == FLAG_EMBEDDED


class ByteCursor:
    """Sequential reader over whole bytes"""

    def __init__(self, data: bytes) -> None:
        self.data = data
        self.pos = 0

    def take(self, size: int) -> bytes:
        if self.pos + size > len(self.data):
            raise MalformedStream("container ended early")
        chunk = self.data[self.pos:self.pos + size]
        self.pos += size
        return chunk

    def read_leb128(self) -> int:
        value = 0
        shift = 0
        while True:
            group = self.take(1)[0]
            value |= (group & 0x7F) << shift
            shift += 7
            if not group & 0x80:
                return value


def _leb128(value: int) -> bytes:
    return bytes(leb128_groups(value))


def write_container(table: bytes, digest: bytes, length: int, blocks: Sequence[bytes],
                    embed_table: bool = True) -> bytes:
    if length == 0:
        return CONTAINER_MAGIC + bytes([CONTAINER_VERSION, FLAG_EMPTY]) + _leb128(0) * 2
    if len(digest) != DIGEST_SIZE:
        raise ValueError(f"table digest must be {DIGEST_SIZE} bytes")
    parts = [CONTAINER_MAGIC,
             bytes([CONTAINER_VERSION, FLAG_EMBEDDED if embed_table else FLAG_REFERENCE])]
    if embed_table:
        parts += [_leb128(len(table)), table]
    else:
        parts.append(digest)
    parts += [_leb128(length), _leb128(len(blocks))]
    for block in blocks:
        parts += [_leb128(len(block)), block]
    return b''.join(parts)


def read_container(data: bytes) -> Container:
    cursor = ByteCursor(data)
    if len(data) < len(CONTAINER_MAGIC) + 2 or cursor.take(len(CONTAINER_MAGIC)) != \
            CONTAINER_MAGIC:
        raise MalformedStream("not a compressed container")
    version, flags = cursor.take(2)
    if version != CONTAINER_VERSION:
        raise VersionMismatch(f"container version {version}, expected {CONTAINER_VERSION}")
    table = b''
    digest = b''
    if flags == FLAG_EMBEDDED:
        table = cursor.take(cursor.read_leb128())
    elif flags == FLAG_REFERENCE:
        digest = cursor.take(DIGEST_SIZE)
    elif flags != FLAG_EMPTY:
        raise MalformedStream(f"unknown container flags {flags}")
    length = cursor.read_leb128()
    block_count = cursor.read_leb128()
    blocks = tuple(cursor.take(cursor.read_leb128()) for _ in range(block_count))
    if cursor.pos != len(data):
        raise MalformedStream(f"{len(data) - cursor.pos} bytes after the last block")
    if flags == FLAG_EMPTY and (length or blocks):
        raise MalformedStream("empty container declares symbols")
    logger.debug("Read container: flags=%d, %d symbols in %d blocks", flags, length, len(blocks))
    return Container(flags=flags, table=table, digest=digest, length=length, blocks=blocks)
