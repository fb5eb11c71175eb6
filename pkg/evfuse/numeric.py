"""Small numeric helpers shared by the fusion and detection stages."""

from __future__ import annotations

import numpy as np

# Representable neighbours of 0 and 1 that bound the open unit interval.
OPEN_LOW = float(np.finfo(np.float64).tiny)
OPEN_HIGH = float(np.nextafter(1.0, 0.0))


def sigmoid(z: np.ndarray | float) -> np.ndarray:
    """Logistic function evaluated without overflow for large ``|z|``.

    Args:
        z: Input value(s).

    Returns:
        ``1 / (1 + exp(-z))`` as a ``float64`` array.
    """

    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def clamp_open_unit(values: np.ndarray) -> np.ndarray:
    """Clamp values into the open interval ``(0, 1)``.

    Sigmoid outputs saturate to exactly 0 or 1 in double precision for
    ``|z|`` beyond roughly 37 and 745; they are pulled back onto the nearest
    representable interior values.
    """

    return np.clip(values, OPEN_LOW, OPEN_HIGH)
