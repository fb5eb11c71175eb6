"""Low-light degradation, CLAHE and normalization of RGB frames."""

from .clahe import clahe, clip_histogram
from .clahe_params import ClaheMode, ClaheParams
from .degrade import degrade
from .image_io import encode_image, read_image, write_image
from .image_tensor import ImageTensor, ValueRange
from .pad import normalize_and_pad, padded_size

__all__ = [
    "ClaheMode",
    "ClaheParams",
    "ImageTensor",
    "ValueRange",
    "clahe",
    "clip_histogram",
    "degrade",
    "encode_image",
    "normalize_and_pad",
    "padded_size",
    "read_image",
    "write_image",
]
