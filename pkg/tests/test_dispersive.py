import numpy as np
import pytest

from tdswt import dispersive, pulses, transmon
from tdswt.dispersive import ModelVariant
from tdswt.operators import dagger, is_hermitian


@pytest.fixture(scope="module")
def tan_trace(tan_pulse, device):
    return pulses.sample(tan_pulse, 256, device)


@pytest.fixture(scope="module")
def static_trace(static_pulse, device):
    return pulses.sample(static_pulse, 64, device)


def test_variant_parse():
    assert ModelVariant.parse("no-sdot") is ModelVariant.NO_SDOT
    assert ModelVariant.parse("constant") is ModelVariant.CONSTANT_MEAN
    assert ModelVariant.parse("FULL") is ModelVariant.FULL
    with pytest.raises(ValueError):
        ModelVariant.parse("bogus")


def test_jc_hamiltonian_conserves_excitations(spec, tan_trace):
    h0, h1, h2 = dispersive.jc_hamiltonian(spec, tan_trace.energies[5], tan_trace.g[5])
    labels = spec.labels()
    excitations = labels.sum(axis=1)
    n = np.diag(excitations).astype(complex)
    h = h0 + h1 + h2
    assert is_hermitian(h)
    assert np.max(np.abs(h @ n - n @ h)) == 0


def test_jc_coupling_element(spec, tan_trace):
    k = 7
    h0, h1, h2 = dispersive.jc_hamiltonian(spec, tan_trace.energies[k], tan_trace.g[k])
    # <n=0, 1, 0| H |n=1, 0, 0> = g_01 of the first transmon
    assert np.isclose(h2[spec.index(0, 1, 0), spec.index(1, 0, 0)], tan_trace.g[k, 0, 0])
    # sqrt(2) enhancement for two photons
    assert np.isclose(h2[spec.index(1, 1, 0), spec.index(2, 0, 0)],
                      np.sqrt(2) * tan_trace.g[k, 0, 0])


@pytest.mark.parametrize("k", [0, 40, 128, 200])
def test_full_dispersive_hermitian(spec, tan_trace, k):
    h = dispersive.full_dispersive_hamiltonian(spec, tan_trace, k)
    assert np.max(np.abs(h - dagger(h))) < 1e-12


def test_static_limit_is_real(spec, static_trace):
    assert np.all(static_trace.lam_dot == 0)
    h = dispersive.full_dispersive_hamiltonian(spec, static_trace, 3)
    assert np.max(np.abs(h.imag)) == 0


def test_single_transmon_has_no_cross_terms():
    dev = transmon.default_device()
    single = transmon.Device((dev.transmons[1],), dev.omega_r, levels=3, cavity_cutoff=4, driven=0)
    spec = dispersive.system_spec(single)
    pulse = pulses.default_pulse("sinusoidal", single)
    trace = pulses.sample(pulse, 64, single)
    h = dispersive.full_dispersive_hamiltonian(spec, trace, 10)
    assert np.count_nonzero(h - np.diag(np.diag(h))) == 0


def test_dispersive_eigenvalues_track_exact_jc(spec, static_trace):
    e, g = static_trace.energies[0], static_trace.g[0]
    h0, h1, h2 = dispersive.jc_hamiltonian(spec, e, g)
    exact = np.linalg.eigvalsh(h0 + h1 + h2)
    disp = dispersive.full_dispersive_hamiltonian(spec, static_trace, 0)
    # neglected terms grow like n^2 g^4 / Delta^3, so stay at low photon number
    keep = spec.labels()[:, 0] <= 1
    delta = np.min(np.abs(static_trace.delta[0]))
    evals = np.linalg.eigvalsh(disp[np.ix_(keep, keep)])
    err = np.array([np.min(np.abs(exact - x)) for x in evals])
    assert np.max(err) < 5e-4 * delta


def test_static_dispersive_matches_operator_assembly(spec, static_trace):
    a = dispersive.full_dispersive_hamiltonian(spec, static_trace, 0)
    b = dispersive.static_dispersive_hamiltonian(spec, static_trace.energies[0],
                                                 static_trace.g[0])
    n = spec.labels()[:, 0]
    keep = n <= spec.cavity_cutoff - 2
    mask = keep[:, None] & keep[None, :]
    assert np.max(np.abs(np.where(mask, a - b, 0))) < 1e-10


@pytest.mark.parametrize("k", [0, 64, 128, 191, 256])
def test_reduced_entries_match_projected_hamiltonian(spec, tan_trace, k):
    h = dispersive.full_dispersive_hamiltonian(spec, tan_trace, k)
    i11, i20 = spec.index(0, 1, 1), spec.index(0, 2, 0)
    entries = dispersive.extract_reduced_entries(tan_trace)
    assert np.isclose(h[i11, i20], entries.g_r[k] - 1j * entries.g_i[k], rtol=0, atol=1e-10)
    assert np.isclose(0.5 * (h[i11, i11] - h[i20, i20]).real, entries.omega[k], atol=1e-10)
    assert np.isclose(0.5 * (h[i11, i11] + h[i20, i20]).real, entries.offset[k], atol=1e-10)


def test_reduced_hamiltonian_shapes_and_trace(tan_trace):
    entries = dispersive.extract_reduced_entries(tan_trace)
    for v in ModelVariant:
        h = dispersive.reduced_hamiltonian(entries, v)
        assert h.shape == (tan_trace.n_samples, 2, 2)
        assert np.max(np.abs(np.trace(h, axis1=1, axis2=2))) == 0
        assert np.max(np.abs(h - np.conj(np.swapaxes(h, 1, 2)))) == 0
    one = dispersive.reduced_hamiltonian(entries, "full", t_index=3)
    assert one.shape == (2, 2)


def test_no_sdot_drops_only_the_imaginary_coupling(tan_trace):
    entries = dispersive.extract_reduced_entries(tan_trace)
    full = dispersive.reduced_hamiltonian(entries, ModelVariant.FULL)
    nos = dispersive.reduced_hamiltonian(entries, ModelVariant.NO_SDOT)
    assert np.max(np.abs(entries.g_i)) > 0
    assert np.array_equal(full.real, nos.real)
    assert np.max(np.abs(nos.imag)) == 0


def test_variants_coincide_without_drive(static_trace):
    entries = dispersive.extract_reduced_entries(static_trace)
    hs = [dispersive.reduced_hamiltonian(entries, v) for v in ModelVariant]
    assert np.allclose(hs[0], hs[1], atol=0)
    assert np.allclose(hs[0], hs[2], atol=1e-12)


def test_constant_mean_keeps_detuning_time_dependent(tan_trace):
    entries = dispersive.extract_reduced_entries(tan_trace)
    g_bar, d_bar = dispersive.mean_primitives(entries)
    h = dispersive.reduced_hamiltonian(entries, ModelVariant.CONSTANT_MEAN)
    assert np.ptp(h[:, 0, 1].real) == 0                  # coupling constant
    assert np.ptp(h[:, 0, 0].real) > 0                   # omega follows delta_omega(t)
    chi = g_bar**2 / d_bar
    expected = 0.5 * (chi[0, 0] + chi[1, 0] - chi[0, 1] + entries.delta_omega - entries.alpha)
    assert np.allclose(h[:, 0, 0].real, expected, atol=1e-13)


def test_reduced_model_needs_three_levels():
    dev = transmon.default_device(levels=2)
    trace = pulses.sample(pulses.default_pulse("sinusoidal", dev), 32, dev)
    with pytest.raises(ValueError):
        dispersive.extract_reduced_entries(trace)


def test_analytic_generators_antihermitian(spec, tan_trace):
    s1, s2 = dispersive.analytic_generators(spec, tan_trace.lam, tan_trace.lam_dot,
                                            tan_trace.delta)
    for s in (s1, s2):
        assert np.max(np.abs(s + dagger(s))) < 1e-15
    static = dispersive.analytic_generators(spec, tan_trace.lam[:1], 0 * tan_trace.lam_dot[:1],
                                            tan_trace.delta[:1])[1]
    assert np.max(np.abs(static)) == 0


def test_adiabaticity_report(tan_trace, static_trace):
    rep = dispersive.adiabaticity_report(tan_trace)
    assert rep.ok and 0 < rep.max_lambda < transmon.VALIDITY_LIMIT
    assert rep.max_lambda_dot_over_delta > 0
    still = dispersive.adiabaticity_report(static_trace)
    assert still.max_lambda_dot_over_delta == 0
    assert not dispersive.adiabaticity_report(tan_trace, limit=1e-6).ok
