"""Shared fixtures for the evfuse test suite."""

from __future__ import annotations

from typing import Callable

import numpy as np
import pytest

from evfuse.events import EventStream

StreamFactory = Callable[..., EventStream]


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so randomized tests are reproducible."""
    return np.random.default_rng(20240611)


@pytest.fixture
def make_stream(rng: np.random.Generator) -> StreamFactory:
    """Factory of random time-ordered streams."""

    def make(
        count: int,
        width: int = 346,
        height: int = 260,
        t_max: int = 30000,
    ) -> EventStream:
        t = np.sort(rng.integers(0, t_max, count))
        return EventStream(
            sensor_width=width,
            sensor_height=height,
            t=t,
            x=rng.integers(0, width, count),
            y=rng.integers(0, height, count),
            p=rng.choice(np.array([-1, 1]), count),
        )

    return make
