import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from _oracles import f_alpha_ref, rand_density, rand_pure, rand_unitary
from renyi_lab.concurrence import concurrence_of_assistance, wootters_concurrence
from renyi_lab.linalg import DensityMatrix, PureState, herm_eig, reduced_state
from renyi_lab.roof import (
    Measure,
    RoofBudget,
    convex_roof_min,
    decompositions_from_unitary,
    pure_measure,
    roof_max,
    spectral_average,
)
from renyi_lab.states import bell_phi_plus, ghz, maximally_mixed, w_state, werner

SMALL = RoofBudget(restarts=3, max_iter=200, patience=None)


def rank2(seed):
    return DensityMatrix(rand_density(4, 2, np.random.default_rng(seed)))


def isometry(m, r, seed):
    return rand_unitary(m, np.random.default_rng(seed))[:, :r]


def test_measure_parse():
    assert Measure.parse("concurrence") == Measure("concurrence")
    assert Measure.parse("renyi:2") == Measure("renyi", 2.0)
    assert Measure.parse(("renyi", 1.5)).alpha == 1.5
    assert str(Measure("renyi", 2.0)) == "renyi:2"
    with pytest.raises(ValueError):
        Measure("negativity")
    with pytest.raises(ValueError):
        Measure("renyi", -1.0)


def test_decomposition_identity_is_spectral():
    rho = rank2(1)
    w, v = herm_eig(rho.matrix)
    dec = decompositions_from_unitary(rho, np.eye(2))
    assert np.allclose(dec.weights, w[:2])
    for s, e in zip(dec.states, v[:, :2].T):
        assert abs(abs(np.vdot(s.amplitudes, e)) - 1) < 1e-12


@given(st.integers(0, 10**6), st.integers(2, 8))
def test_decomposition_reconstructs(seed, m):
    rho = rank2(seed)
    dec = decompositions_from_unitary(rho, isometry(m, 2, seed + 1))
    assert np.max(np.abs(dec.reconstruct() - rho.matrix)) < 1e-8
    assert abs(dec.weights.sum() - 1) < 1e-12 and np.all(dec.weights > 0)


def test_rank_one_decompositions():
    psi = PureState(rand_pure(4, np.random.default_rng(0)))
    dec = decompositions_from_unitary(psi.density_matrix(), isometry(5, 1, 3))
    for s in dec.states:
        assert abs(abs(np.vdot(s.amplitudes, psi.amplitudes)) - 1) < 1e-12


def test_decomposition_errors():
    rho = rank2(2)
    with pytest.raises(ValueError):
        decompositions_from_unitary(rho, np.ones((4, 2)))
    with pytest.raises(ValueError):
        decompositions_from_unitary(rho, np.eye(3))


def test_pure_inputs_exact():
    psi = PureState(rand_pure(4, np.random.default_rng(8)))
    rho = psi.density_matrix()
    for meas in ("concurrence", "renyi:2", "renyi:1"):
        exact = pure_measure(psi, meas)
        assert convex_roof_min(rho, meas).value == pytest.approx(exact, abs=1e-12)
        assert roof_max(rho, meas).value == pytest.approx(exact, abs=1e-12)
    assert pure_measure(bell_phi_plus(), "concurrence") == pytest.approx(1.0)


def test_werner_examples():
    rho = werner(0.5)
    assert convex_roof_min(rho, "concurrence").value == pytest.approx(0.25, abs=2e-3)
    assert convex_roof_min(rho, "renyi:2").value == pytest.approx(-np.log2(31 / 32), abs=2e-3)
    assert convex_roof_min(rho, "renyi:2").value == pytest.approx(0.04580368961312479, abs=2e-3)


def test_roof_max_examples():
    assert roof_max(maximally_mixed(2), "concurrence").value == pytest.approx(1.0, abs=2e-3)
    assert roof_max(reduced_state(w_state(), [0, 1]), "concurrence").value == pytest.approx(2 / 3, abs=2e-3)
    # GHZ pairs: C^a = 1 and every decomposition member can be a Bell state
    res = roof_max(reduced_state(ghz(), [0, 1]), "renyi:1")
    assert res.value == pytest.approx(1.0, abs=2e-3)


def test_non_two_qubit_rejected():
    with pytest.raises(ValueError):
        convex_roof_min(ghz().density_matrix(), "concurrence")


@settings(max_examples=15)
@given(st.integers(0, 10**6), st.sampled_from(["concurrence", "renyi:0.9", "renyi:1", "renyi:2"]), st.integers(0, 50))
def test_min_spectral_max_ordering(seed, meas, run_seed):
    rho = DensityMatrix(rand_density(4, 1 + seed % 4, np.random.default_rng(seed)))
    budget = RoofBudget(restarts=2, max_iter=100, seed=run_seed, patience=None)
    lo = convex_roof_min(rho, meas, budget)
    hi = roof_max(rho, meas, budget)
    spec = spectral_average(rho, meas)
    assert lo.value <= spec + 1e-12 and spec <= hi.value + 1e-12
    if meas == "concurrence":
        assert hi.value <= concurrence_of_assistance(rho) + 1e-9
        assert lo.value >= wootters_concurrence(rho) - 1e-9


def test_result_decomposition_is_consistent():
    rho = rank2(5)
    res = convex_roof_min(rho, "renyi:2")
    dec = res.decomposition
    assert np.max(np.abs(dec.reconstruct() - rho.matrix)) < 1e-8
    avg = sum(p * pure_measure(s, "renyi:2") for p, s in zip(dec.weights, dec.states))
    assert avg == pytest.approx(res.value, abs=1e-9)


def test_reproducible():
    rho = rank2(6)
    a = convex_roof_min(rho, "renyi:3", SMALL)
    b = convex_roof_min(rho, "renyi:3", SMALL)
    assert a.value == b.value and a.nfev == b.nfev


def test_nelder_mead_option_runs():
    budget = RoofBudget(restarts=2, max_iter=300, method="nelder-mead", patience=None, ensemble_size=2)
    res = convex_roof_min(werner(0.5), "concurrence", budget)
    assert 0.25 - 1e-9 <= res.value <= spectral_average(werner(0.5), "concurrence") + 1e-12


def test_budget_validation():
    with pytest.raises(ValueError):
        RoofBudget(restarts=0)
    with pytest.raises(ValueError):
        RoofBudget(method="bfgs")


def test_concurrence_oracle_on_100_rank2_states():
    worst_min = worst_max = 0.0
    for k in range(100):
        rho = rank2(1000 + k)
        worst_min = max(worst_min, abs(convex_roof_min(rho, "concurrence").value - wootters_concurrence(rho)))
        worst_max = max(worst_max, abs(roof_max(rho, "concurrence").value - concurrence_of_assistance(rho)))
    assert worst_min <= 2e-3
    assert worst_max <= 2e-3


def test_local_unitary_invariance():
    rng = np.random.default_rng(77)
    for k in range(3):
        m = rand_density(4, 2, rng)
        u = np.kron(rand_unitary(2, rng), rand_unitary(2, rng))
        rot = u @ m @ u.conj().T
        rho, rho_rot = DensityMatrix(m), DensityMatrix(0.5 * (rot + rot.conj().T))
        for meas in ("concurrence", "renyi:2"):
            assert convex_roof_min(rho, meas).value == pytest.approx(convex_roof_min(rho_rot, meas).value, abs=2e-3)
        assert roof_max(rho, "concurrence").value == pytest.approx(roof_max(rho_rot, "concurrence").value, abs=2e-3)


def test_renyi_roof_matches_closed_form_on_werner_family():
    for p in (0.4, 0.7, 0.9):
        rho = werner(p)
        c = (3 * p - 1) / 2
        assert convex_roof_min(rho, "renyi:1.5").value == pytest.approx(f_alpha_ref(c, 1.5), abs=2e-3)


def test_equal_concurrence_members_observed():
    # the optimum is not forced to have members of equal concurrence; record the spread only
    res = convex_roof_min(werner(0.8), "concurrence")
    cs = [pure_measure(s, "concurrence") for s in res.decomposition.states]
    assert len(cs) >= 1 and all(0 <= c <= 1 + 1e-12 for c in cs)
    assert np.dot(res.decomposition.weights, cs) == pytest.approx(res.value, abs=1e-9)
