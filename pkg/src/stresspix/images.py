"""PNG image IO with the dataset's fixed encodings.

Grayscale x / p / M_s are 8-bit; normal maps are 8-bit RGB; stress maps y and
attention maps M_p are 16-bit gray (value = round(65535 * v)). All in-memory
images are float arrays in [0, 1], row 0 at the top.
"""

import io

import numpy as np
from PIL import Image


def to_u8(img: np.ndarray) -> np.ndarray:
    return np.round(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)


def to_u16(img: np.ndarray) -> np.ndarray:
    return np.round(np.clip(img, 0.0, 1.0) * 65535.0).astype(np.uint16)


def encode_gray8(img: np.ndarray) -> bytes:
    return _png_bytes(Image.fromarray(to_u8(img), mode="L"))


def encode_gray16(img: np.ndarray) -> bytes:
    return _png_bytes(Image.fromarray(to_u16(img)))


def encode_rgb8(img: np.ndarray) -> bytes:
    return _png_bytes(Image.fromarray(to_u8(img), mode="RGB"))


def _png_bytes(image: Image.Image) -> bytes:
    buf = io.BytesIO()
    image.save(buf, format="PNG")
    return buf.getvalue()


def save_gray8(path, img: np.ndarray) -> None:
    Image.fromarray(to_u8(img), mode="L").save(path)


def save_gray16(path, img: np.ndarray) -> None:
    Image.fromarray(to_u16(img)).save(path)


def save_rgb8(path, img: np.ndarray) -> None:
    Image.fromarray(to_u8(img), mode="RGB").save(path)


def load_image(source) -> np.ndarray:
    """Load a PNG (path, bytes, or file object) to float [0, 1].

    Returns (H, W) for grayscale and (H, W, 3) for color inputs.
    """
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)
    with Image.open(source) as im:
        im.load()
        arr = np.asarray(im)
    if arr.dtype == np.uint8:
        out = arr.astype(np.float64) / 255.0
    elif arr.dtype == np.uint16:
        out = arr.astype(np.float64) / 65535.0
    elif arr.dtype == np.int32:  # PIL mode "I" for some 16-bit files
        out = arr.astype(np.float64) / 65535.0
    else:
        raise ValueError(f"unsupported PNG sample type {arr.dtype}")
    if out.ndim == 3 and out.shape[2] == 4:
        out = out[:, :, :3]
    return out
