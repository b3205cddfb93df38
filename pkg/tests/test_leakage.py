"""Leakage functionals, POVM information, and the extraction attack."""

import math

import numpy as np
import pytest
from scipy.special import rel_entr

from conftest import make_code, zero_code
from qfp import codes, fingerprint as fp, leakage
from qfp.linalg import DensityOperator, haar_matrix, haar_unit_vector
from qfp.rng import master_stream, substream


def hadamard_code():
    """n=3, d=3 code whose 8 fingerprints are the orthogonal rows of a
    Hadamard matrix: C(x)_j = <x, bits(j)>."""
    params = codes.CodeParams(n=3, k=0, r=1, d=3)
    linear = np.array([[(j >> 1) & 3] for j in range(8)], dtype=np.uint64)
    nonlinear = np.array([[0], [0xAA]], dtype=np.uint64)
    return codes.QuasiLinearCode(params, linear, nonlinear)


def adversarial_equal_column_code(seed=0):
    """Distinct-column code corrupted so columns 0 and 1 coincide and
    every nonlinear row agrees on bits 0 and 1: the off-identity cross
    term survives with full weight."""
    code = make_code(n=10, k=0, r=2, d=8, seed=seed, distinct=True)
    code.linear[1] = code.linear[0]
    bit0 = code.nonlinear[:, 0] & np.uint64(1)
    code.nonlinear[:, 0] &= ~np.uint64(2)
    code.nonlinear[:, 0] |= bit0 << np.uint64(1)
    return codes.QuasiLinearCode(code.params, code.linear, code.nonlinear)


def dense_rho_prime_sum(code, k):
    p = code.params
    u = fp.fingerprint_matrix(code)
    scale = 2.0 ** (p.d - (p.message_bits - k) - k)
    acc = np.zeros((p.codeword_bits, p.codeword_bits))
    for row in u:
        acc += np.outer(row, row)
    return scale * acc


def mi_oracle_nats(code, k, povm):
    """Brute-force joint-table mutual information."""
    labels = 2 ** (code.params.message_bits - k)
    u = fp.fingerprint_matrix(code)
    joint = np.zeros((len(povm.weights), labels))
    for a in range(labels):
        rho = np.zeros((povm.dim, povm.dim), dtype=complex)
        for i in range(2 ** k):
            s = u[fp.message_value(i, a, k)]
            rho += np.outer(s, s) / 2 ** k
        for j in range(len(povm.weights)):
            vec = povm.vectors[j]
            joint[j, a] = povm.weights[j] * np.real(vec.conj() @ rho @ vec) / labels
    pj = joint.sum(axis=1, keepdims=True)
    pa = joint.sum(axis=0, keepdims=True)
    mask = joint > 0
    return float((joint[mask] * np.log(joint[mask] / (pj @ pa)[mask])).sum())


# --- completeness ----------------------------------------------------------

def test_completeness_distinct_columns():
    code = make_code(n=10, k=0, r=2, d=8, seed=3, distinct=True)
    assert leakage.completeness_defect(code, 0) <= 1e-8


def test_completeness_mixed_distinct_columns():
    code = make_code(n=8, k=2, r=2, d=8, seed=4, distinct=True)
    assert leakage.completeness_defect(code, 2) <= 1e-8


def test_completeness_adversarial_equal_columns():
    code = adversarial_equal_column_code()
    assert leakage.completeness_defect(code, 0) > 0.5


def test_completeness_matches_dense_sum_oracle():
    code = make_code(n=6, k=0, r=3, d=8, seed=5)
    streaming = leakage.completeness_defect(code, 0)
    dense = dense_rho_prime_sum(code, 0)
    oracle = np.abs(np.linalg.eigvalsh(dense - np.eye(2 ** 8))).max()
    assert abs(streaming - oracle) <= 1e-10


def test_completeness_guard():
    code = make_code(n=13, k=0, r=3, d=4, seed=0)
    with pytest.raises(codes.ScaleGuardError):
        leakage.completeness_defect(code, 0)


# --- mu distributions ------------------------------------------------------

def test_mu_at_own_fingerprint():
    code = make_code(n=5, k=0, r=2, d=6, seed=7)
    a0 = 9
    v = fp.fingerprint_matrix(code)[a0]
    mu = leakage.mu_distribution(code, 0, v)
    assert mu.values[a0] == pytest.approx(2.0 ** (6 - 5), abs=1e-9)


def test_mu_normalization_distinct_columns():
    code = make_code(n=10, k=0, r=2, d=8, seed=9, distinct=True)
    for i in range(100):
        v = haar_unit_vector(256, substream(11, i))
        mu = leakage.mu_distribution(code, 0, v)
        assert abs(mu.total - 1.0) <= 1e-8
        assert (mu.values >= 0).all()


def test_mu_dimension_mismatch():
    code = make_code(n=5, k=0, r=2, d=6, seed=9)
    with pytest.raises(Exception, match="shape|dimension"):
        leakage.mu_distribution(code, 0, np.ones(32) / np.sqrt(32))


def test_mu_matches_dense_quadratic_form_oracle():
    code = make_code(n=3, k=1, r=2, d=3, seed=13)
    v = haar_unit_vector(8, master_stream(2))
    mu = leakage.mu_distribution(code, 1, v)
    u = fp.fingerprint_matrix(code)
    scale = 2.0 ** (3 - 3 - 1)
    for a in range(8):
        rho_p = np.zeros((8, 8))
        for i in range(2):
            s = u[fp.message_value(i, a, 1)]
            rho_p += np.outer(s, s) / 2
        rho_p *= scale * 2  # rho'_a = 2^(d-n) rho_a with d=n=3
        oracle = np.real(v.amplitudes.conj() @ rho_p @ v.amplitudes)
        assert mu.values[a] == pytest.approx(oracle, abs=1e-12)


# --- the relative-entropy functional ---------------------------------------

def test_relent_uniform_is_zero():
    code = make_code(n=6, k=0, r=3, d=7, seed=15)
    e0 = np.zeros(128, dtype=complex)
    e0[3] = 1.0
    # every fingerprint coordinate has the same magnitude, so mu is uniform
    assert leakage.relent_functional(code, 0, e0) == pytest.approx(0.0, abs=1e-12)


def test_relent_formula_edges():
    assert leakage._relent(np.array([1.0] + [0.0] * 15), 4) == pytest.approx(
        4 * math.log(2), abs=1e-12)
    assert leakage._relent(np.full(16, 1 / 16), 4) == pytest.approx(0.0, abs=1e-12)


def test_relent_matches_kl_oracle():
    code = make_code(n=10, k=0, r=2, d=8, seed=17, distinct=True)
    v = haar_unit_vector(256, master_stream(4))
    mu = leakage.mu_distribution(code, 0, v)
    kl = float(rel_entr(mu.values, np.full(1024, 1 / 1024)).sum())
    assert leakage.relent_functional(code, 0, v) == pytest.approx(kl, abs=1e-8)


# --- functional maximization -------------------------------------------------

def test_functional_max_single_start_no_iters():
    code = make_code(n=5, k=0, r=2, d=6, seed=19)
    _, value = leakage.functional_max(code, 0, restarts=1, iters=0, seed=23)
    start = haar_unit_vector(64, substream(23, 0))
    assert value == pytest.approx(
        leakage.relent_functional(code, 0, start), abs=1e-12)


def test_functional_max_more_restarts_never_worse():
    code = make_code(n=5, k=0, r=2, d=6, seed=19)
    _, v1 = leakage.functional_max(code, 0, restarts=1, iters=20, seed=29)
    _, v32 = leakage.functional_max(code, 0, restarts=32, iters=20, seed=29)
    assert v32 >= v1 - 1e-12


def test_functional_max_fingerprint_seeded_lower_bound():
    # at d > n the fingerprint seed alone contributes 2^(d-n) d ln2
    # minus at most 1/e from the negative terms
    code = make_code(n=6, k=0, r=3, d=10, seed=21)
    u0 = fp.fingerprint_matrix(code)[11]
    seeded = leakage.relent_functional(code, 0, u0)
    floor = 2.0 ** (10 - 6) * (10 - 6) * math.log(2)
    assert seeded >= floor
    _, best = leakage.functional_max(code, 0, restarts=1, iters=10, seed=31,
                                     extra_starts=[u0])
    assert best >= seeded - 1e-12


def test_functional_max_threads_do_not_change_result():
    code = make_code(n=5, k=0, r=2, d=6, seed=19)
    _, a = leakage.functional_max(code, 0, restarts=8, iters=15, seed=37, threads=1)
    _, b = leakage.functional_max(code, 0, restarts=8, iters=15, seed=37, threads=4)
    assert a == b


# --- POVM mutual information -------------------------------------------------

def test_povm_mi_degenerate_code_is_zero():
    code = zero_code(n=4, k=0, r=2, d=4)
    povm = leakage.RankOnePovm(np.ones(16), haar_matrix(16, master_stream(6)).T)
    assert leakage.mutual_information_povm(code, 0, povm) == pytest.approx(
        0.0, abs=1e-9)


def test_povm_mi_orthogonal_states_full_information():
    code = hadamard_code()
    u = fp.fingerprint_matrix(code)
    assert np.abs(u @ u.T - np.eye(8)).max() <= 1e-12
    povm = leakage.RankOnePovm(np.ones(8), u.astype(complex))
    mi = leakage.mutual_information_povm(code, 0, povm)
    assert mi == pytest.approx(3 * math.log(2), abs=1e-9)


def test_povm_mi_matches_joint_table_oracle():
    code = make_code(n=3, k=1, r=2, d=4, seed=23)
    povm = leakage.random_rank_one_povm(16, master_stream(8), parts=2)
    mi = leakage.mutual_information_povm(code, 1, povm)
    assert mi == pytest.approx(mi_oracle_nats(code, 1, povm), abs=1e-10)


def test_povm_validation():
    with pytest.raises(leakage.InvalidPovmError):
        leakage.RankOnePovm(np.array([1.0, -1.0]), np.eye(2, dtype=complex))
    code = make_code(n=4, k=0, r=2, d=4, seed=2)
    bad = leakage.RankOnePovm(np.full(16, 0.5),
                              haar_matrix(16, master_stream(0)).T)
    with pytest.raises(leakage.InvalidPovmError):
        leakage.mutual_information_povm(code, 0, bad)


# --- accessible-information convexity bound ---------------------------------

def test_iacc_bound_random_povms():
    code = make_code(n=10, k=0, r=2, d=8, seed=25, distinct=True)
    for i in range(10):
        povm = leakage.random_rank_one_povm(256, substream(41, i))
        assert leakage.iacc_bound_check(code, 0, povm)


def test_iacc_bound_projective_measurement():
    code = make_code(n=8, k=2, r=2, d=8, seed=27, distinct=True)
    povm = leakage.RankOnePovm(np.ones(256), haar_matrix(256, master_stream(10)).T)
    assert leakage.iacc_bound_check(code, 2, povm)


def test_iacc_bound_requires_distinct_columns():
    code = zero_code(n=4, k=0, r=2, d=4)
    povm = leakage.RankOnePovm(np.ones(16), haar_matrix(16, master_stream(1)).T)
    with pytest.raises(leakage.HypothesisError):
        leakage.iacc_bound_check(code, 0, povm)


# --- extraction attack -------------------------------------------------------

def test_extraction_identical_states_leak_nothing():
    rho = DensityOperator(4, matrix=np.eye(4) / 4)
    result = leakage.extraction_attack({0: rho, 1: rho, 2: rho}, 25, seed=43)
    assert np.abs(result.per_basis_bits).max() <= 1e-9


def test_extraction_orthogonal_qubit_states():
    e0 = DensityOperator(2, matrix=np.diag([1.0, 0.0]).astype(complex))
    e1 = DensityOperator(2, matrix=np.diag([0.0, 1.0]).astype(complex))
    result = leakage.extraction_attack({0: e0, 1: e1}, 200, seed=45)
    assert result.mean_bits > 0.0
    assert (result.per_basis_bits >= -1e-12).all()
    # computational-basis measurement distinguishes them perfectly:
    # the conditional table is the identity, worth exactly 1 bit
    cond = np.eye(2)
    h_j = leakage._entropy(cond.mean(axis=1))
    assert (h_j - leakage._entropy(cond, axis=0).mean()) / math.log(2) == \
        pytest.approx(1.0, abs=1e-12)
    assert result.per_basis_bits.max() <= 1.0 + 1e-12


def test_extraction_stream_recomposition():
    code = make_code(n=4, k=0, r=2, d=4, seed=29)
    states = leakage.scheme_states(code, 0)
    full = leakage.extraction_attack(states, 30, seed=47)
    part1 = leakage.extraction_attack(states, 18, seed=47)
    part2 = leakage.extraction_attack(states, 12, seed=47, base_offset=18)
    assert np.array_equal(full.per_basis_bits,
                          np.concatenate([part1.per_basis_bits,
                                          part2.per_basis_bits]))
    recombined = (18 * part1.mean_bits + 12 * part2.mean_bits) / 30
    assert full.mean_bits == pytest.approx(recombined, abs=1e-12)


def test_extraction_relabeling_invariance():
    code = make_code(n=4, k=1, r=2, d=4, seed=31)
    states = leakage.scheme_states(code, 1)
    base = leakage.extraction_attack(states, 10, seed=49)
    permuted = {(a + 5) % len(states): s for a, s in states.items()}
    again = leakage.extraction_attack(permuted, 10, seed=49)
    assert np.allclose(base.per_basis_bits, again.per_basis_bits, atol=1e-12)


def test_extraction_threads_do_not_change_result():
    code = make_code(n=4, k=0, r=2, d=4, seed=29)
    states = leakage.scheme_states(code, 0)
    a = leakage.extraction_attack(states, 16, seed=51, threads=1)
    b = leakage.extraction_attack(states, 16, seed=51, threads=4)
    assert np.array_equal(a.per_basis_bits, b.per_basis_bits)


def test_extraction_dimension_mismatch():
    a = DensityOperator(2, matrix=np.eye(2) / 2)
    b = DensityOperator(4, matrix=np.eye(4) / 4)
    with pytest.raises(Exception, match="dimension"):
        leakage.extraction_attack({0: a, 1: b}, 5, seed=0)


def test_extraction_label_guard():
    one = DensityOperator(1, matrix=np.eye(1))
    states = {i: one for i in range(2 ** 12 + 1)}
    with pytest.raises(codes.ScaleGuardError):
        leakage.extraction_attack(states, 1, seed=0)


# --- Lipschitz continuity ----------------------------------------------------

def _rotated(v, theta, rng):
    g = rng.standard_normal(v.shape[0]) + 1j * rng.standard_normal(v.shape[0])
    g -= v * np.vdot(v, g)
    g /= np.linalg.norm(g)
    return math.cos(theta) * v + math.sin(theta) * g


def test_lipschitz_identical_vectors():
    code = make_code(n=10, k=0, r=2, d=8, seed=33, distinct=True)
    v = haar_unit_vector(256, master_stream(12)).amplitudes
    assert leakage.lipschitz_check(code, 0, v, v)


def test_lipschitz_random_rotations():
    code = make_code(n=10, k=0, r=2, d=8, seed=33, distinct=True)
    rng = master_stream(14)
    max_theta = math.asin(1.0 / math.e)
    for _ in range(50):
        v = haar_unit_vector(256, rng).amplitudes
        w = _rotated(v, rng.uniform(1e-4, max_theta), rng)
        assert leakage.lipschitz_check(code, 0, v, w)


def test_lipschitz_hypothesis_errors():
    code = make_code(n=10, k=0, r=2, d=8, seed=33, distinct=True)
    v = np.zeros(256, dtype=complex)
    v[0] = 1.0
    w = np.zeros(256, dtype=complex)
    w[1] = 1.0  # orthogonal: trace distance 2 > 2/e
    with pytest.raises(leakage.HypothesisError):
        leakage.lipschitz_check(code, 0, v, w)
    bad = make_code(n=6, k=0, r=3, d=8, seed=1)
    with pytest.raises(leakage.HypothesisError):
        leakage.lipschitz_check(bad, 0, v, v)


# --- expectation bound -------------------------------------------------------

def test_expectation_bound_basis_vector_start():
    params = codes.CodeParams(n=6, k=0, r=3, d=8)
    e1 = np.zeros(256, dtype=complex)
    e1[0] = 1.0
    mean, bound = leakage.expectation_bound_mc(
        params, e1, codes.BitString.from_int(5, 6), samples=50, seed=53)
    assert mean == 0.0
    assert bound == pytest.approx(23 / 64)


def test_expectation_bound_pure_scheme():
    params = codes.CodeParams(n=8, k=0, r=4, d=10)
    v = haar_unit_vector(1024, master_stream(16))
    mean, bound = leakage.expectation_bound_mc(
        params, v, codes.BitString.from_int(77, 8), samples=2000, seed=55)
    assert bound == pytest.approx(23 / 256)
    assert mean < bound


def test_expectation_bound_shrinks_with_rank():
    # mixing 2^k i.i.d. components flattens mu, so the positive part of
    # mu ln(2^n mu) shrinks; separated at three combined standard errors
    v = haar_unit_vector(1024, master_stream(901))
    a0 = codes.BitString.from_int(99, 8)
    m0, _, v0 = leakage.expectation_bound_mc(
        codes.CodeParams(8, 0, 4, 10), v, a0, 4000, seed=902, return_values=True)
    m2, bound2, v2 = leakage.expectation_bound_mc(
        codes.CodeParams(8, 2, 4, 10), v, a0, 4000, seed=903, return_values=True)
    assert bound2 is None  # the 23/2^n constant is pure-scheme only
    sem = math.sqrt(v0.var(ddof=1) / 4000 + v2.var(ddof=1) / 4000)
    assert m2 < m0 - 3 * sem


def test_expectation_bound_threads_deterministic():
    params = codes.CodeParams(n=6, k=0, r=3, d=8)
    v = haar_unit_vector(256, master_stream(18))
    a0 = codes.BitString.from_int(3, 6)
    m1, _ = leakage.expectation_bound_mc(params, v, a0, samples=200, seed=57,
                                         threads=1)
    m2, _ = leakage.expectation_bound_mc(params, v, a0, samples=200, seed=57,
                                         threads=4)
    assert m1 == m2


def test_report_json_keys():
    report = leakage.LeakageReport(1.0, 8, 1.0, 0.25, 100, 7)
    obj = report.to_json()
    assert set(obj) == {"functional_max_nats", "iacc_bound_nats",
                        "extraction_mi_bits", "bases", "restarts", "seed",
                        "estimate"}
    assert obj["estimate"] is True
