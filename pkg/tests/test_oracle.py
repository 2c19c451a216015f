"""The brute-force reference itself: amplitudes, stabilizers, unreduced spectra."""

import numpy as np
import pytest

from setscope import InvalidParameterError, ModelParams, VerificationError
from setscope import oracle

ALL_SIGNS = [(+1, +1), (+1, -1), (-1, +1), (-1, -1)]


def test_2x2_support_uniform_at_fixed_point():
    params = ModelParams(+1, +1, 1.0)
    table = oracle.brute_wavefunction(params, 2, 2)
    # 8 spins, 3 independent vertex constraints -> 32 support configurations
    assert len(table) == 32
    assert all(amp.sign == +1 for amp in table.values())
    # every excluded configuration violates some vertex parity
    geom = oracle.TorusGeometry(2, 2)
    for config in range(256):
        if config in table:
            continue
        parities = [
            sum((config >> i) & 1 for i in geom.vertex_spins(x, y)) % 2
            for x in range(2) for y in range(2)
        ]
        assert any(p == 1 for p in parities)


@pytest.mark.parametrize("km,ke", ALL_SIGNS)
def test_stabilizers_exhaustive_2x2(km, ke):
    params = ModelParams(km, ke, 1.0)
    assert oracle.check_stabilizers(params, 2, 2) == []


@pytest.mark.parametrize("km,ke", ALL_SIGNS)
def test_stabilizers_sampled_4x4(km, ke):
    params = ModelParams(km, ke, 1.0)
    configs = oracle.sample_support_configs(params, 4, 4, 40, seed=11)
    assert oracle.check_stabilizers(params, 4, 4, configs) == []


def test_sampler_rejects_frustrated_torus():
    with pytest.raises(InvalidParameterError, match="incompatible-extent"):
        oracle.sample_support_configs(ModelParams(-1, +1, 1.0), 3, 3, 1)


def test_sampler_configs_have_support():
    params = ModelParams(-1, +1, 0.9)
    for config in oracle.sample_support_configs(params, 3, 4, 25, seed=3):
        assert not oracle.amplitude(params, config, 3, 4).is_zero


def test_brute_spectrum_fixed_point():
    ev = oracle.brute_transfer_spectrum(ModelParams(+1, +1, 1.0), 4)
    mags = np.sort(np.abs(ev))[::-1]
    assert mags[0] == pytest.approx(16.0, rel=1e-12)
    assert mags[1] == pytest.approx(16.0, rel=1e-12)
    assert (mags[2:] < 1e-12 * 16).all()


def test_brute_spectrum_negation_closure_odd():
    ev = oracle.brute_transfer_spectrum(ModelParams(-1, +1, 0.9), 3)
    scale = np.abs(ev).max()
    a = np.sort(ev.real)
    assert np.allclose(a, -a[::-1], atol=1e-9 * scale)


def test_two_column_spectrum_nonnegative():
    ev = oracle.brute_transfer_spectrum(ModelParams(-1, -1, 0.9), 4)
    scale = np.abs(ev).max()
    assert (ev.real >= -1e-9 * scale).all()
    assert np.abs(ev.imag).max() <= 1e-9 * scale


def test_unreduced_support_is_coincident():
    full = oracle.unreduced_transfer(ModelParams(+1, +1, 0.9), 3)
    dim = 8
    for b in range(dim):
        for bb in range(dim):
            if b != bb:
                assert not full[b * dim + bb].any()
                assert not full[:, b * dim + bb].any()
    # and the guarded restriction trips on planted off-support weight
    bad = full.copy()
    bad[1, 0] = 1e-3
    with pytest.raises(VerificationError):
        oracle.coincident_restriction(bad, 3)


def test_size_caps():
    with pytest.raises(InvalidParameterError, match="oracle size cap"):
        oracle.brute_wavefunction(ModelParams(+1, +1, 1.0), 4, 4)
    with pytest.raises(InvalidParameterError, match="oracle size cap"):
        oracle.brute_transfer_spectrum(ModelParams(+1, +1, 1.0), 7)


def test_plaquette_parity_on_support_any_w():
    """Vertex parity is a property of the support, independent of w."""
    params = ModelParams(-1, +1, 0.6)
    geom = oracle.TorusGeometry(2, 3)
    table = oracle.brute_wavefunction(params, 2, 3)
    assert table
    for config in table:
        for x in range(2):
            for y in range(3):
                n_down = sum((config >> i) & 1 for i in geom.vertex_spins(x, y))
                assert (-1) ** n_down == -1
