from .core import (
    HEADER,
    MAGIC,
    VERSION,
    decode_grid,
    decode_pgm,
    encode_grid,
    encode_pgm,
    read_grid,
    read_pgm,
    write_grid,
    write_pgm,
)

__all__ = [
    "HEADER", "MAGIC", "VERSION", "decode_grid", "decode_pgm", "encode_grid",
    "encode_pgm", "read_grid", "read_pgm", "write_grid", "write_pgm",
]
