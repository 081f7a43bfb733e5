import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm, solve_sylvester

from tdswt import dispersive, pulses, swt
from tdswt.errors import DegeneracyError
from tdswt.operators import commutator, dagger, nested_commutator

from conftest import random_hermitian


def random_problem(seed, n=6, eps=0.05, split=3, times=None):
    """Block-diagonal H0 (well separated blocks), small H1 (diag) and H2 (offdiag)."""
    rng = np.random.default_rng(seed)
    labels = np.array([0] * split + [1] * (n - split))
    part = swt.BlockPartition(labels)
    e = np.concatenate([rng.uniform(0, 1, split), rng.uniform(5, 6, n - split)])
    h0 = np.diag(e).astype(complex)
    h1 = part.diag(random_hermitian(rng, n, eps))
    h2 = part.offdiag(random_hermitian(rng, n, eps))
    if times is not None:
        w = rng.uniform(0.5, 1.5)
        mod = (1 + 0.3 * np.sin(w * times))[:, None, None]
        return part, h0 + 0 * mod, h1 * mod, h2 * mod
    return part, h0, h1, h2


def sylvester_solve(h0, rhs, part):
    """Independent oracle: block-pair Sylvester equations H0_PP S - S H0_QQ = RHS_PQ."""
    s = np.zeros_like(rhs, dtype=complex)
    blocks = [np.flatnonzero(part.labels == b) for b in np.unique(part.labels)]
    for p in blocks:
        for q in blocks:
            if p is q:
                continue
            s[np.ix_(p, q)] = solve_sylvester(h0[np.ix_(p, p)], -h0[np.ix_(q, q)],
                                              rhs[np.ix_(p, q)])
    return s


def test_partition_projections_sum_to_identity():
    part = swt.BlockPartition([0, 1, 1, 0])
    a = np.arange(16.0).reshape(4, 4)
    assert np.array_equal(part.diag(a) + part.offdiag(a), a)
    assert part.is_bipartition and part.dim == 4
    assert not swt.BlockPartition([0, 1, 2]).is_bipartition


def test_solve_generator_two_level_by_hand():
    delta, g = 2.0, 0.1
    sp = np.array([[0, 1], [0, 0]], dtype=complex)     # |0><1|, state 0 has energy Delta
    sm = sp.T.copy()
    h0 = np.diag([delta, 0.0]).astype(complex)
    part = swt.BlockPartition([0, 1])
    s = swt.solve_generator(h0, -g * (sp + sm), part)
    assert np.allclose(s, (g / delta) * (sm - sp), atol=1e-15)
    assert np.array_equal(swt.solve_generator(h0, np.zeros((2, 2)), part), np.zeros((2, 2)))


@given(st.integers(0, 2**32 - 1))
def test_solve_generator_residual_and_antihermiticity(seed):
    part, h0, _, h2 = random_problem(seed)
    rng = np.random.default_rng(seed + 1)
    u = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))[0]
    rot = np.zeros((6, 6), dtype=complex)
    rot[:3, :3] = u
    rot[3:, 3:] = np.eye(3)
    h0 = rot @ h0 @ dagger(rot)          # block diagonal but not diagonal
    s = swt.solve_generator(h0, -h2, part)
    assert np.max(np.abs(commutator(h0, s) + h2)) < 1e-10 * np.max(np.abs(h2))
    assert np.max(np.abs(s + dagger(s))) < 1e-12 * np.max(np.abs(s))
    assert np.max(np.abs(part.diag(s))) == 0


def test_degenerate_denominator_names_pair():
    h0 = np.diag([1.0, 1.0]).astype(complex)
    rhs = np.array([[0, 1], [1, 0]], dtype=complex)
    with pytest.raises(DegeneracyError) as info:
        swt.solve_generator(h0, rhs, swt.BlockPartition([0, 1]))
    assert set(info.value.pair) == {0, 1}
    # a degenerate pair without coupling is fine
    swt.solve_generator(np.diag([1.0, 1.0, 3.0]), np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]]),
                        swt.BlockPartition([0, 1, 1]))


@given(st.integers(0, 2**32 - 1))
def test_static_hierarchy_matches_literal_equations(seed):
    part, h0, h1, h2 = random_problem(seed)
    series = swt.build_hierarchy(h0, h1, h2, part)
    s1 = sylvester_solve(h0, -h2, part)
    s2 = sylvester_solve(h0, -commutator(h1, s1), part)
    s3 = sylvester_solve(h0, -commutator(h1, s2) - nested_commutator(h2, s1, 2) / 3, part)
    for ours, ref in ((series.S1, s1), (series.S2, s2), (series.S3, s3)):
        assert np.max(np.abs(ours - ref)) < 1e-12 * max(np.max(np.abs(ref)), 1e-300) + 1e-15
    assert np.all(series.S1_dot == 0) and series.times is None


def test_time_dependent_hierarchy_matches_literal_equations():
    times = np.linspace(0, 10, 201)
    part, h0, h1, h2 = random_problem(7, times=times)
    series = swt.build_hierarchy(h0, h1, h2, part, times=times)
    s1 = np.stack([sylvester_solve(a, -b, part) for a, b in zip(h0, h2)])
    s1_dot = np.gradient(s1, times, axis=0, edge_order=2)
    s2 = np.stack([sylvester_solve(a, -commutator(b, c) + 1j * d, part)
                   for a, b, c, d in zip(h0, h1, s1, s1_dot)])
    s2_dot = np.gradient(s2, times, axis=0, edge_order=2)
    s3 = np.stack([sylvester_solve(a, -commutator(b, c) - nested_commutator(e, f, 2) / 3 + 1j * d,
                                   part)
                   for a, b, c, d, e, f in zip(h0, h1, s2, s2_dot, h2, s1)])
    assert np.allclose(series.S1, s1, atol=1e-13)
    assert np.allclose(series.S2, s2, atol=1e-13)
    assert np.allclose(series.S3, s3, atol=1e-13)
    for s in series.generators:
        assert np.max(np.abs(s + dagger(s))) <= 1e-12 * np.max(np.abs(s))
        assert np.max(np.abs(part.diag(s))) == 0


def test_h1_zero_static_gives_vanishing_s2():
    part, h0, _, h2 = random_problem(3)
    series = swt.build_hierarchy(h0, np.zeros_like(h0), h2, part)
    assert np.max(np.abs(series.S2)) == 0


def test_generator_orders_scale_with_perturbation():
    norms = []
    eps = np.array([1e-2, 3e-2, 1e-1])
    for e in eps:
        part, h0, h1, h2 = random_problem(11, eps=e)
        series = swt.build_hierarchy(h0, h1, h2, part)
        norms.append([np.linalg.norm(s, 2) for s in series.generators])
    norms = np.array(norms)
    for j in range(3):
        slope = np.polyfit(np.log(eps), np.log(norms[:, j]), 1)[0]
        assert abs(slope - (j + 1)) < 0.1


def test_input_validation():
    part, h0, h1, h2 = random_problem(0)
    with pytest.raises(ValueError):
        swt.build_hierarchy(h0, h2, h2, part)            # H1 must be block diagonal
    with pytest.raises(ValueError):
        swt.build_hierarchy(h0, h1, h1 + h2, part)       # H2 must be off diagonal
    with pytest.raises(ValueError):
        swt.build_hierarchy(h0 + h2, h1, h2, part)
    with pytest.raises(ValueError):
        swt.build_hierarchy(np.stack([h0] * 3), np.stack([h1] * 3), np.stack([h2] * 3), part,
                            times=np.array([0.0, 1.0, 3.0]))


def test_effective_terms_closed_forms_two_blocks():
    times = np.linspace(0, 10, 101)
    part, h0, h1, h2 = random_problem(5, times=times)
    series = swt.build_hierarchy(h0, h1, h2, part, times=times)
    general = swt.effective_hamiltonian_terms(h0, h1, h2, series, part)
    closed = swt.bipartite_effective_terms(h0, h1, h2, series)
    # the closed forms hold for static problems; with time dependence H~3 and H~4 also
    # carry S-dot commutators, so only compare the first three exactly
    for a, b in zip(general[:3], closed[:3]):
        assert np.allclose(a, b, atol=1e-14)
    static_part, s0, s1, s2 = random_problem(5)
    st_series = swt.build_hierarchy(s0, s1, s2, static_part)
    for a, b in zip(swt.effective_hamiltonian_terms(s0, s1, s2, st_series, static_part),
                    swt.bipartite_effective_terms(s0, s1, s2, st_series)):
        assert np.allclose(a, b, atol=1e-14)
        assert np.max(np.abs(static_part.offdiag(a))) <= 1e-9 * max(np.max(np.abs(a)), 1e-300)


def test_effective_terms_vanish_without_coupling():
    part, h0, h1, _ = random_problem(2)
    series = swt.build_hierarchy(h0, h1, np.zeros_like(h0), part)
    terms = swt.effective_hamiltonian_terms(h0, h1, np.zeros_like(h0), series, part)
    assert all(np.max(np.abs(t)) == 0 for t in terms[2:])


def test_jc_first_generator_matches_closed_form(device, spec, static_pulse):
    trace = pulses.sample(static_pulse, 16, device)
    h0, h1, h2 = dispersive.jc_hamiltonian(spec, trace.energies[0], trace.g[0])
    s1 = swt.solve_generator(h0, -h2, swt.photon_parity_partition(spec))
    ref, _ = dispersive.analytic_generators(spec, trace.lam[0], trace.lam_dot[0], trace.delta[0])
    assert np.max(np.abs(s1 - ref)) < 1e-10


def test_jc_effective_hamiltonian_reproduces_dispersive_shifts(device, spec, static_pulse):
    trace = pulses.sample(static_pulse, 16, device)
    h0, h1, h2 = dispersive.jc_hamiltonian(spec, trace.energies[0], trace.g[0])
    part = swt.photon_parity_partition(spec)
    terms = swt.effective_hamiltonian_terms(h0, h1, h2, swt.build_hierarchy(h0, h1, h2, part),
                                            part)
    heff = terms[0] + terms[1] + terms[2]
    hd = dispersive.full_dispersive_hamiltonian(spec, trace, 0)
    n = spec.labels()[:, 0]
    keep = n <= spec.cavity_cutoff - 2          # away from the Fock truncation edge
    mask = (n[:, None] == n[None, :]) & keep[:, None] & keep[None, :]
    assert np.max(np.abs(np.where(mask, heff - hd, 0))) < 1e-10


def test_jc_effective_eigenvalues_close_to_exact(device, spec, static_pulse):
    trace = pulses.sample(static_pulse, 16, device)
    h0, h1, h2 = dispersive.jc_hamiltonian(spec, trace.energies[0], trace.g[0])
    part = swt.photon_parity_partition(spec)
    terms = swt.effective_hamiltonian_terms(h0, h1, h2, swt.build_hierarchy(h0, h1, h2, part),
                                            part)
    exact = np.linalg.eigvalsh(h0 + h2)
    approx = np.linalg.eigvalsh(terms[0] + terms[1] + terms[2])
    lam = np.max(np.abs(trace.lam[0]))
    delta = np.min(np.abs(trace.delta[0]))
    # low-lying states only; the truncated top photon level is not dispersive
    low = slice(0, 18)
    assert np.max(np.abs(exact[low] - approx[low])) < 10 * lam**3 * delta


def test_residual_with_zero_generator_is_coupling_norm():
    part, h0, h1, h2 = random_problem(4)
    res = swt.offdiagonal_residual(h0 + h1 + h2, np.zeros_like(h0), part)
    assert np.isclose(res[0], np.linalg.norm(h2, 2))


def test_residual_decreases_with_order():
    part, h0, h1, h2 = random_problem(8, eps=0.05)
    series = swt.build_hierarchy(h0, h1, h2, part)
    h = h0 + h1 + h2
    r = [swt.offdiagonal_residual(h, series.total(k), part)[0] for k in (1, 2, 3)]
    assert r[0] > r[1] > r[2]


def test_frame_derivative_term_matches_finite_difference():
    rng = np.random.default_rng(9)
    a = 1j * random_hermitian(rng, 4, 0.3)      # anti-Hermitian S0
    b = 1j * random_hermitian(rng, 4, 0.2)      # S_dot
    h = 1e-5
    fd = 1j * (expm(-(a + h * b)) - expm(-(a - h * b))) / (2 * h) @ expm(a)
    assert np.allclose(swt.frame_derivative_term(a, b), fd, atol=1e-9)


def test_transformed_hamiltonian_static_exact():
    rng = np.random.default_rng(12)
    h = random_hermitian(rng, 5)
    s = 1j * random_hermitian(rng, 5, 0.2)
    out = swt.transformed_hamiltonian(h, s, np.zeros_like(s))
    assert np.allclose(out, expm(-s) @ h @ expm(s), atol=1e-12)


def test_time_derivative_second_order():
    t = np.linspace(0, 1, 101)
    d = swt.time_derivative(t**2, t)
    assert np.allclose(d, 2 * t, atol=1e-12)
