import io
import json

import numpy as np
import pytest

from ffwm import cavityqed, dispersion, tables


@pytest.fixture
def diamond():
    return dispersion.MaterialIndex.diamond()


@pytest.fixture
def ring_curve():
    """The shipped effective-index table, which puts m = 143, 115, and 28 at 615, 750, and 2095 nm for r = 6 um."""
    return dispersion.load_curve(tables.package_data('diamond_ring_neff.csv'))


@pytest.fixture
def reference_quartet():
    return dispersion.make_quartet((143, 0.615e-6), (28, 2.095e-6), (115, 0.750e-6))


@pytest.fixture
def device():
    return cavityqed.DeviceContext.reference_device()


@pytest.fixture
def write_config(tmp_path):
    """Return a function that writes the shipped example configuration, with some sections updated, to a file."""

    def write(name='run.json', **sections):
        with io.open(tables.package_data('diamond_ring.json'), 'r', encoding='utf-8') as f:
            document = json.load(f)
        for key, value in sections.items():
            if isinstance(value, dict) and isinstance(document.get(key), dict):
                document[key].update(value)
            else:
                document[key] = value
        path = tmp_path / name
        path.write_text(json.dumps(document, indent=2), encoding='utf-8')
        return str(path)

    return write


def random_rates(generator, number):
    """Draw dimensionless rate sets whose loss rates are bounded below, so every population decays within t = 60."""
    rates = []
    for _ in range(number):
        m_e, m_sig = generator.uniform(0.5, 4, size=2)
        g_e, g_nl = generator.uniform(0.2, 4, size=2)
        idler_rate = generator.uniform(1, 10)
        rates.append(cavityqed.HamiltonianInputs(emitter_coupling=g_e, nonlinear_coupling=g_nl, emitter_loss=m_e,
                                                 signal_loss=m_sig, idler_rate=idler_rate))
    return rates


@pytest.fixture
def rate_sets():
    return random_rates(np.random.default_rng(20240611), 100)


def log_uniform_rates(generator, number, low=1e6, high=1e12):
    """Draw rate sets in rad/s with every rate log-uniform between low and high."""
    rates = []
    for _ in range(number):
        g_e, g_nl, m_e, m_sig, idler_rate = 10 ** generator.uniform(np.log10(low), np.log10(high), size=5)
        rates.append(cavityqed.HamiltonianInputs(emitter_coupling=g_e, nonlinear_coupling=g_nl, emitter_loss=m_e,
                                                 signal_loss=m_sig, idler_rate=idler_rate))
    return rates


@pytest.fixture
def wide_rate_sets():
    return log_uniform_rates(np.random.default_rng(20240612), 100)
