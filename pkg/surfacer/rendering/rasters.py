"""Raster file formats: PFM for float depth, PNG for color."""
import pathlib
import typing

import numpy as np
from PIL import Image

from surfacer.definitions import errors

PathLike = typing.Union[str, pathlib.Path]


def write_pfm(path: PathLike, raster: np.ndarray) -> pathlib.Path:
    """
    Write a float raster as little-endian PFM.

    Single-channel rasters use the "Pf" header and 3-channel rasters "PF".
    Rows are stored bottom to top. Invalid depths are stored as NaN.
    """
    raster = np.asarray(raster, dtype="<f4")
    if raster.ndim == 2:
        header = "Pf"
    elif raster.ndim == 3 and raster.shape[2] == 3:
        header = "PF"
    else:
        raise errors.InvalidInputError(
            f"Cannot store raster of shape {raster.shape} as PFM."
        )

    target = pathlib.Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    height, width = raster.shape[:2]
    with open(target, "wb") as f:
        f.write(f"{header}\n{width} {height}\n-1.0\n".encode("ascii"))
        f.write(np.ascontiguousarray(raster[::-1]).tobytes())
    return target


def read_pfm(path: PathLike) -> np.ndarray:
    """Read a PFM raster written in either byte order."""
    contents = pathlib.Path(path).read_bytes()
    lines = contents.split(b"\n", 3)
    if len(lines) < 4 or lines[0] not in (b"Pf", b"PF"):
        raise errors.InvalidInputError(f'File "{path}" is not a PFM raster.')

    width, height = (int(v) for v in lines[1].split())
    scale = float(lines[2])
    channels = 1 if lines[0] == b"Pf" else 3
    dtype = "<f4" if scale < 0 else ">f4"
    data = np.frombuffer(lines[3], dtype=dtype, count=width * height * channels)
    shape = (height, width) if channels == 1 else (height, width, 3)
    return data.reshape(shape)[::-1].astype(np.float32)


def write_png(path: PathLike, rgb: np.ndarray) -> pathlib.Path:
    """Write an H x W x 3 image with values in [0, 1] as 8-bit PNG."""
    target = pathlib.Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    data = np.round(np.clip(np.asarray(rgb, dtype=np.float64), 0.0, 1.0) * 255)
    Image.fromarray(data.astype(np.uint8)).save(target)
    return target


def read_png(path: PathLike) -> np.ndarray:
    """Read a PNG image as float RGB in [0, 1]."""
    with Image.open(path) as image:
        return np.asarray(image.convert("RGB"), dtype=np.float64) / 255.0
