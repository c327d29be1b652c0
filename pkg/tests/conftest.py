import numpy as np
import pytest

from nsgevlm.series import AnnualSeries


def philox(seed):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def gev11_series(n=50, xi=-0.1, seed=7, mu=(0.0, -0.1), logsigma=(1.0, 0.02)):
    """Synthetic trending annual-maximum series by inversion sampling."""
    rng = philox(seed)
    t = np.arange(1, n + 1, dtype=float)
    m = mu[0] + mu[1] * t
    s = np.exp(logsigma[0] + logsigma[1] * t)
    y = -np.log(np.clip(rng.random(n), 1e-16, 1 - 1e-16))
    if abs(xi) < 1e-7:
        z = m - s * np.log(y)
    else:
        z = m + (s / xi) * (1.0 - y**xi)
    return AnnualSeries(np.arange(1950, 1950 + n), z)


@pytest.fixture
def rng():
    return philox(0)
