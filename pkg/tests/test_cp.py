import numpy as np
import pytest

from oracles import (
    SIGMAS,
    affine_oracle,
    choi_oracle,
    jacobi_eigvalsh,
    min_eig_oracle,
    random_kraus,
    random_state,
    uhlmann_margin,
)
from qubitrecon import (
    AffineChannel,
    NotCompletelyPositiveError,
    NotTracePreservingError,
    affine_from_choi,
    affine_from_kraus,
    apply,
    certify_cp,
    choi_from_affine,
    fa_margins,
    kraus_from_affine,
    kraus_from_choi,
    trace_distance,
    uhlmann_compatible,
)
from qubitrecon.cp import kraus_completeness_error, partial_trace_first, uhlmann_default_grid
from qubitrecon.reconstruct import TransformationRecord

TRANSPOSE = AffineChannel(np.zeros(3), np.diag([1.0, -1.0, 1.0]))


def random_affine(rng):
    return AffineChannel(rng.uniform(-1, 1, 3), rng.uniform(-1, 1, (3, 3)))


def test_jacobi_oracle_sanity(rng):
    G = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    H = G + G.conj().T
    assert np.allclose(jacobi_eigvalsh(H), np.linalg.eigvalsh(H), atol=1e-11)


def test_choi_matches_ejk_oracle(rng, example_channel):
    for ch in [example_channel, TRANSPOSE] + [random_affine(rng) for _ in range(50)]:
        assert np.abs(choi_from_affine(ch) - choi_oracle(ch.t, ch.E)).max() < 1e-14


def test_choi_examples():
    omega = choi_from_affine(AffineChannel.identity())
    p_plus = np.outer([1, 0, 0, 1], [1, 0, 0, 1]) / 2
    assert np.allclose(omega, p_plus, atol=1e-15)
    assert np.allclose(jacobi_eigvalsh(omega), [0, 0, 0, 1], atol=1e-13)
    omega = choi_from_affine(AffineChannel.total_contraction())
    assert np.allclose(omega, np.eye(4) / 4, atol=1e-15)
    assert jacobi_eigvalsh(choi_from_affine(TRANSPOSE))[0] == pytest.approx(-0.5, abs=1e-12)


def test_choi_structure(rng):
    for _ in range(100):
        omega = choi_from_affine(random_affine(rng))
        assert np.abs(omega - omega.conj().T).max() <= 1e-15
        assert np.trace(omega).real == pytest.approx(1.0, abs=1e-12)
        assert np.abs(partial_trace_first(omega) - np.eye(2) / 2).max() < 1e-14
        assert np.sum(np.linalg.eigvalsh(omega)) == pytest.approx(1.0, abs=1e-12)


def test_affine_from_choi_examples(example_channel):
    p_plus = np.outer([1, 0, 0, 1], [1, 0, 0, 1]) / 2
    ch = affine_from_choi(p_plus)
    assert np.allclose(ch.E, np.eye(3), atol=1e-15) and np.allclose(ch.t, 0, atol=1e-15)
    ch = affine_from_choi(choi_from_affine(example_channel))
    assert np.abs(ch.E - example_channel.E).max() < 1e-10 and np.abs(ch.t - example_channel.t).max() < 1e-10
    ch = affine_from_choi(np.eye(4) / 4)
    assert np.abs(ch.E).max() < 1e-15 and np.abs(ch.t).max() < 1e-15


def test_affine_from_choi_rejects_bad_input():
    bad = np.eye(4) / 4
    bad[0, 0] += 0.1
    with pytest.raises(NotTracePreservingError):
        affine_from_choi(bad)
    skew = np.eye(4, dtype=complex) / 4
    skew[0, 1] = 1e-6
    with pytest.raises(ValueError):
        affine_from_choi(skew)


def test_affine_choi_roundtrip_any_channel(rng):
    for _ in range(200):
        ch = random_affine(rng)
        back = affine_from_choi(choi_from_affine(ch))
        assert np.abs(back.E - ch.E).max() < 1e-10 and np.abs(back.t - ch.t).max() < 1e-10


def test_certify_examples():
    cert = certify_cp(AffineChannel.identity())
    assert cert.is_cp and cert.min_choi_eigenvalue == pytest.approx(0.0, abs=1e-15)
    cert = certify_cp(AffineChannel(np.zeros(3), np.diag([1.0, 1.0, -1.0])))
    assert not cert.is_cp
    # the sign of det E is carried by lambda_3 = -1, so the (l1 + l2) branch is the violated one
    assert cert.fa_margins[2] == pytest.approx(-4.0) and cert.fa_margins[3] == pytest.approx(4.0)
    assert not cert.fa_necessary_ok


def test_certificate_threshold():
    for lam, expected in ((-1 / 3, True), (1.0, True), (-1 / 3 - 1e-3, False), (1.0 + 1e-6, False)):
        cert = certify_cp(AffineChannel(np.zeros(3), np.eye(3) * lam))
        assert cert.is_cp is expected
        assert cert.is_cp == (cert.min_choi_eigenvalue >= -1e-9)


def test_depolarizing_eigenvalues_match_formula():
    for lam in np.linspace(-1, 1, 41):
        ev = jacobi_eigvalsh(choi_from_affine(AffineChannel(np.zeros(3), np.eye(3) * lam)))
        expected = np.sort([(1 + 3 * lam) / 4] + [(1 - lam) / 4] * 3)
        assert np.allclose(ev, expected, atol=1e-12)
        assert certify_cp(AffineChannel(np.zeros(3), np.eye(3) * lam)).is_cp == (lam >= -1 / 3 - 1e-12)


def test_unital_fa_agreement(rng):
    checked = 0
    for _ in range(1000):
        lam = rng.uniform(-1, 1, 3)
        cert = certify_cp(AffineChannel(np.zeros(3), np.diag(lam)))
        margins = cert.fa_margins[2:]
        if min(abs(m) for m in margins) < 1e-7:
            continue
        assert cert.is_cp == (min(margins) >= 0)
        checked += 1
    assert checked > 900


def test_fa_margins_match_rotated_diagonal(rng):
    # t3 is the component of t along the third singular direction
    lam = np.array([0.5, 0.3, 0.2])
    U = np.linalg.qr(rng.standard_normal((3, 3)))[0]
    U *= np.sign(np.linalg.det(U))
    t = U @ np.array([0.0, 0.0, 0.4])
    m = fa_margins(AffineChannel(t, U @ np.diag(lam)))
    assert m[0] == pytest.approx((1 + 0.2) ** 2 - 0.16 - 0.8**2, abs=1e-12)
    assert m[1] == pytest.approx((1 - 0.2) ** 2 - 0.16 - 0.2**2, abs=1e-12)


def test_fa_conditions_are_necessary(rng):
    for _ in range(300):
        ch = affine_from_kraus(random_kraus(rng))
        assert certify_cp(ch).fa_necessary_ok


def test_cp_implies_contraction(rng, example_channel):
    cert = certify_cp(example_channel)
    assert cert.is_cp and cert.min_choi_eigenvalue == pytest.approx(min_eig_oracle(example_channel.t, example_channel.E), abs=1e-12)
    for _ in range(1000):
        r, s = random_state(rng), random_state(rng)
        assert trace_distance(apply(example_channel, r), apply(example_channel, s)) <= trace_distance(r, s) + 1e-9


def test_kraus_examples():
    ops = kraus_from_affine(AffineChannel.identity())
    assert len(ops) == 1
    assert np.allclose(ops[0] / ops[0][0, 0], np.eye(2), atol=1e-12)
    ops = kraus_from_affine(AffineChannel.total_contraction())
    assert len(ops) == 4
    assert kraus_completeness_error(ops) < 1e-12
    back = affine_from_kraus(ops)
    assert np.abs(back.E).max() < 1e-12 and np.abs(back.t).max() < 1e-12
    psi = np.array([0.0, 0.0, 1.0])
    const = AffineChannel(psi, np.zeros((3, 3)))
    ops = kraus_from_affine(const)
    assert len(ops) == 2
    t, E = affine_oracle(ops)
    assert np.allclose(t, psi, atol=1e-12) and np.abs(E).max() < 1e-12


def test_kraus_rejects_non_cp():
    with pytest.raises(NotCompletelyPositiveError):
        kraus_from_choi(choi_from_affine(TRANSPOSE))


def test_kraus_roundtrip_random(rng):
    for _ in range(300):
        ops = random_kraus(rng)
        t, E = affine_oracle(ops)
        ch = affine_from_kraus(ops)
        assert np.abs(ch.t - t).max() < 1e-12 and np.abs(ch.E - E).max() < 1e-12
        again = kraus_from_affine(ch)
        assert kraus_completeness_error(again) < 1e-9
        t2, E2 = affine_oracle(again)
        assert np.abs(t2 - t).max() < 1e-9 and np.abs(E2 - E).max() < 1e-9


def test_kraus_convention_is_row_major():
    # Kraus operator of a unitary channel is the unitary itself (up to phase)
    U = np.array([[np.cos(0.3), -np.sin(0.3)], [np.sin(0.3), np.cos(0.3)]], dtype=complex) @ np.diag([1, 1j])
    ch = affine_from_kraus([U])
    (A,) = kraus_from_affine(ch)
    phase = A[0, 0] / U[0, 0]
    assert abs(abs(phase) - 1) < 1e-12
    assert np.allclose(A, phase * U, atol=1e-12)


def _rec(a, b):
    return TransformationRecord(a, b)


def test_uhlmann_examples(example_channel):
    recs = [_rec((0.6, 0, 0), (0.6, 0, 0)), _rec((0.4, 0.1, 0.8), (0.4, 0.1, 0.8))]
    res = uhlmann_compatible(recs)
    assert res.compatible and abs(res.worst_margin) < 1e-15
    bad = [_rec((0.6, 0, 0), (0.9, 0, 0)), _rec((0, 0, 0), (0, 0, 0))]
    res = uhlmann_compatible(bad, t_grid=[1.0])
    assert not res.compatible and res.worst_margin == pytest.approx(-0.3)
    pair = [_rec(v, example_channel(v)) for v in ((0.6, 0, 0), (0.4, 0.1, 0.8))]
    assert uhlmann_compatible(pair)


def test_uhlmann_matches_matrix_oracle(rng):
    grid = uhlmann_default_grid()
    assert len(grid) == 201 and 1.0 in grid
    for _ in range(20):
        ch = affine_from_kraus(random_kraus(rng))
        r1, r2 = random_state(rng), random_state(rng)
        recs = [_rec(r1, ch(r1)), _rec(r2, ch(r2))]
        res = uhlmann_compatible(recs)
        expected = min(uhlmann_margin(r1, r2, ch(r1), ch(r2), t) for t in grid)
        assert res.worst_margin == pytest.approx(expected, abs=1e-12)
        assert res.compatible


def test_uhlmann_rejects_bad_grid():
    recs = [_rec((0.6, 0, 0), (0.6, 0, 0)), _rec((0, 0, 0), (0, 0, 0))]
    for grid in ([], [0.0, 1.0], [-1.0], [np.inf]):
        with pytest.raises(ValueError):
            uhlmann_compatible(recs, t_grid=grid)
    with pytest.raises(ValueError):
        uhlmann_compatible(recs[:1])


def test_pauli_oracle_consistency():
    from qubitrecon.cp import PAULI

    for a, b in zip(PAULI, SIGMAS):
        assert np.array_equal(a, b)
