import numpy as np
import pytest

from interiorct import (Image, make_geometry, rasterize, reference_phantom,
                        analytic_sinogram)

# Shared desk-scale geometry: same dso/dsd and detector pitch as the
# nominal scanner but half the channel count and pixel grid, so every
# full pipeline runs in seconds.  Detector-truncation counts scale by
# the same factor of two (e.g. 380 of 1440 -> 190 of 720).
SCALED = dict(n_det=720, pitch=1.0, n_views=360, dso=800.0, dsd=1400.0,
              n_pix=256)


@pytest.fixture(scope="session")
def geom():
    return make_geometry(**SCALED)


@pytest.fixture(scope="session")
def phantom(geom):
    # body sized to 85% of the field of view
    return reference_phantom(scale=(geom.fov / 2.0 * 0.85) / 170.0)


@pytest.fixture(scope="session")
def truth(geom, phantom):
    return Image(rasterize(phantom, geom.n_pix, geom.fov, supersample=2),
                 geom.fov)


@pytest.fixture(scope="session")
def sino(geom, phantom):
    return analytic_sinogram(phantom, geom)
