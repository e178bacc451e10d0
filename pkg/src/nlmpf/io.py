"""File formats: PGM (P2/P5), plain float CSV, and key-value run configs.

PGM covers 8- and 16-bit integer count images (16-bit samples are big-endian
per the netpbm convention) and round-trips counts exactly up to the bit
depth.  Real-valued intensities use ``float_csv``: one row per line,
comma-separated decimals with 9 significant digits.
"""

from __future__ import annotations

import numpy as np

FORMATS = ("pgm8", "pgm16", "float_csv")


class ParseError(Exception):
    """Malformed image file; message carries the byte offset where parsing failed."""


def read_image(path, format: str | None = None) -> np.ndarray:
    """Read an image file; autodetects PGM vs CSV when ``format`` is None.

    Returns an int64 array for PGM files and float64 for CSV.
    """
    if format is not None and format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; choose from {FORMATS}")
    with open(path, "rb") as fh:
        data = fh.read()
    if format in ("pgm8", "pgm16") or (format is None and data[:2] in (b"P2", b"P5")):
        return _parse_pgm(data)
    text = data.decode("ascii")
    rows = [line for line in text.splitlines() if line.strip()]
    if not rows:
        raise ParseError(f"{path}: empty CSV at byte offset 0")
    try:
        parsed = [[float(tok) for tok in line.split(",")] for line in rows]
    except ValueError as exc:
        raise ParseError(f"{path}: bad CSV value ({exc})") from None
    widths = {len(r) for r in parsed}
    if len(widths) != 1:
        raise ParseError(f"{path}: ragged CSV rows (widths {sorted(widths)})")
    return np.asarray(parsed, dtype=np.float64)


def write_image(image, path, format: str = "float_csv") -> None:
    """Write an image in the given format.

    PGM formats require nonnegative integral values within the bit depth
    (255 or 65535); violations raise ValueError.
    """
    arr = np.asarray(image)
    if arr.ndim != 2:
        raise ValueError("write_image expects a 2D image")
    if format == "float_csv":
        with open(path, "w", encoding="ascii") as fh:
            for row in np.asarray(arr, dtype=np.float64):
                fh.write(",".join(f"{v:.9g}" for v in row))
                fh.write("\n")
        return
    if format not in ("pgm8", "pgm16"):
        raise ValueError(f"unknown format {format!r}; choose from {FORMATS}")
    maxval = 255 if format == "pgm8" else 65535
    if np.issubdtype(arr.dtype, np.floating):
        if np.any(arr != np.floor(arr)):
            raise ValueError("PGM requires integral pixel values")
    vals = arr.astype(np.int64)
    if vals.min() < 0:
        raise ValueError("PGM requires nonnegative pixel values")
    if vals.max() > maxval:
        raise ValueError(f"range error: max value {vals.max()} exceeds {format} maxval {maxval}")
    h, w = vals.shape
    header = f"P5\n{w} {h}\n{maxval}\n".encode("ascii")
    if maxval < 256:
        raster = vals.astype(">u1").tobytes()
    else:
        raster = vals.astype(">u2").tobytes()
    with open(path, "wb") as fh:
        fh.write(header + raster)


def _parse_pgm(data: bytes) -> np.ndarray:
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise ParseError(f"not a PGM file (magic {magic!r}) at byte offset 0")
    pos = 2
    fields = []
    while len(fields) < 3:
        tok, pos = _next_token(data, pos)
        if tok is None:
            raise ParseError(f"incomplete PGM header at byte offset {pos}")
        try:
            fields.append(int(tok))
        except ValueError:
            raise ParseError(
                f"non-numeric PGM header token {tok!r} at byte offset {pos - len(tok)}"
            ) from None
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise ParseError(f"bad PGM dimensions {width}x{height} at byte offset {pos}")
    if not (0 < maxval < 65536):
        raise ParseError(f"bad PGM maxval {maxval} at byte offset {pos}")
    count = width * height
    if magic == b"P2":
        try:
            vals = np.array([int(tok) for tok in data[pos:].split()], dtype=np.int64)
        except ValueError:
            raise ParseError(f"non-numeric P2 raster after byte offset {pos}") from None
        if vals.size != count:
            raise ParseError(
                f"P2 raster has {vals.size} samples, expected {count}, at byte offset {pos}"
            )
    else:
        # single whitespace byte separates maxval from the raster
        pos += 1
        bytes_per = 1 if maxval < 256 else 2
        need = count * bytes_per
        have = len(data) - pos
        if have < need:
            raise ParseError(
                f"truncated P5 raster: expected {need} bytes, got {have}, at byte offset {pos}"
            )
        dtype = ">u1" if bytes_per == 1 else ">u2"
        vals = np.frombuffer(data[pos : pos + need], dtype=dtype).astype(np.int64)
    if vals.min() < 0 or vals.max() > maxval:
        raise ParseError(f"PGM sample out of range [0, {maxval}]")
    return vals.reshape(height, width)


def _next_token(data: bytes, pos: int):
    """Advance past whitespace and '#' comments; return (token, new_pos)."""
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
        pos += 1
    if start == pos:
        return None, pos
    return data[start:pos].decode("ascii"), pos


# --- run configuration files -------------------------------------------------

_INT_KEYS = {"search", "patch", "d", "seed", "threads"}
_FLOAT_KEYS = {"delta", "mu", "hg"}
_STR_KEYS = {"kernel", "variant", "input", "output"}
RUN_CONFIG_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | {"sigma_h"}


def load_run_config(path) -> dict:
    """Parse a flat ``key = value`` run configuration file.

    Blank lines and ``#`` comments are ignored; unknown keys are rejected.
    ``sigma_h`` is accepted as an alias for ``hg``.  Values are converted to
    their declared types; semantic validation happens when the filter
    configuration is built.
    """
    out: dict = {}
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in RUN_CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            if key == "sigma_h":
                key = "hg"
            if key in out:
                raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
            try:
                if key in _INT_KEYS:
                    out[key] = int(value)
                elif key in _FLOAT_KEYS:
                    out[key] = float(value)
                else:
                    out[key] = value
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad value {value!r} for {key!r}") from None
    return out
