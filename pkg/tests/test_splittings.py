import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gdsplit import GridSpec, check_invariance, constant_splitting, principal_angles, splitting_from_terms
from gdsplit.errors import DimensionError, InvalidBasisError, ParameterError
from gdsplit.splittings import check_orthonormal, fiberwise_splitting, transversality_angle


def _line(theta):
    return np.array([[math.cos(theta)], [math.sin(theta)]])


def test_principal_angle_examples():
    u = np.eye(3)[:, :2]
    assert np.all(principal_angles(u, u) == 0)
    assert principal_angles(_line(0), _line(math.pi / 2))[0] == pytest.approx(math.pi / 2, abs=1e-15)
    assert principal_angles(_line(0.2), _line(0.2 + math.pi / 6))[0] == pytest.approx(math.pi / 6, abs=1e-12)


def test_principal_angles_tiny_angle_resolved():
    # arccos would lose everything below ~1e-8
    assert principal_angles(_line(0), _line(1e-12))[0] == pytest.approx(1e-12, rel=1e-6)


def test_principal_angles_rank_mismatch():
    with pytest.raises(DimensionError):
        principal_angles(np.eye(3)[:, :1], np.eye(3)[:, :2])


@given(st.floats(0, math.pi), st.floats(0, math.pi))
def test_principal_angles_symmetric_and_bounded(a, b):
    u, v = _line(a), _line(b)
    ab, ba = principal_angles(u, v), principal_angles(v, u)
    assert ab[0] == pytest.approx(ba[0], abs=1e-12)
    assert 0 <= ab[0] <= math.pi / 2


def test_orthonormal_check():
    check_orthonormal(np.eye(3)[:, :2])
    with pytest.raises(InvalidBasisError):
        check_orthonormal(np.array([[1.0], [1.0]]))


def test_constant_splitting_validation():
    with pytest.raises(ParameterError):
        constant_splitting(np.eye(2), np.zeros((2, 0)))
    with pytest.raises(ParameterError):
        # E and F coincide
        constant_splitting(np.eye(2)[:, :1], np.eye(2)[:, :1])
    # spanning vectors are orthonormalized
    sp = constant_splitting(np.array([[2.0], [0.0]]), np.array([[1.0], [1.0]]))
    assert sp.constant and sp.dim_E == 1 and sp.dim_F == 1
    assert np.allclose(sp.basis_E([0.1, 0.2])[:, 0], [1.0, 0.0])
    assert np.allclose(np.abs(sp.basis_F([0.1, 0.2])[:, 0]), [2**-0.5, 2**-0.5])


def test_transversality_angle():
    assert transversality_angle(_line(0), _line(math.pi / 2)) == pytest.approx(math.pi / 2)
    assert transversality_angle(_line(0), _line(0.5)) == pytest.approx(0.5, abs=1e-12)


def test_frames_orthonormal(ex31_splittings):
    pts = np.random.default_rng(1).random((20, 3))
    for sp in ex31_splittings.values():
        for frame in (sp.frame_E(pts), sp.frame_F(pts)):
            gram = np.swapaxes(frame, -1, -2) @ frame
            assert np.max(np.abs(gram - np.eye(frame.shape[-1]))) <= 1e-10


def test_builtin_splittings_invariant(ex31, ex31_splittings, cat, cat_split, rot2, rot2_split):
    pairs = [(ex31, sp) for sp in ex31_splittings.values()] + [(cat, cat_split), (rot2, rot2_split)]
    for system, sp in pairs:
        rep = check_invariance(system, sp, GridSpec.uniform(system, 16))
        assert rep.invariant and rep.max_principal_angle_defect <= 1e-9
    assert check_invariance(rot2, rot2_split).max_principal_angle_defect == 0.0


def test_slanted_plane_not_invariant(ex31):
    # E spanned by e1 and (e2 + e3)/sqrt(2); the image of the second vector is (3, 2)/sqrt(2)
    E = np.array([[1.0, 0.0], [0.0, 1 / math.sqrt(2)], [0.0, 1 / math.sqrt(2)]])
    F = np.array([[0.0], [1 / math.sqrt(2)], [-1 / math.sqrt(2)]])
    sp = constant_splitting(E, F, "slanted")
    rep = check_invariance(ex31, sp)
    expected = math.atan2(1, 5)  # angle between (3, 2) and (1, 1)
    assert rep.defect_E == pytest.approx(expected, abs=1e-12)
    assert rep.max_principal_angle_defect > 0.1 and not rep.invariant


def test_fiberwise_continuity_is_evidence_only():
    def frame_E(p):
        t = 0.1 * np.sin(2 * np.pi * p[:, 0])
        return np.stack([np.cos(t), np.sin(t)], axis=-1)[:, :, None]

    def frame_F(p):
        t = 0.1 * np.sin(2 * np.pi * p[:, 0])
        return np.stack([-np.sin(t), np.cos(t)], axis=-1)[:, :, None]

    sp = fiberwise_splitting(frame_E, frame_F, 2, 1, 1, "wobble")
    ev = sp.continuity_evidence(GridSpec((32, 4)))
    assert ev["continuous"] is None and "evidence" in ev["basis"]
    # the field turns by at most 0.2 pi radians per unit length
    assert 0 < ev["lipschitz_estimate"] <= 0.2 * math.pi + 1e-12
    const = constant_splitting(np.eye(2)[:, :1], np.eye(2)[:, 1:])
    assert const.continuity_evidence()["continuous"] is True


def test_terms_and_labels(ex31):
    sp = splitting_from_terms(ex31, [("factor", "g"), ("stable", "h")], [("unstable", "h")])
    assert sp.label == "E=g + stable(h); F=unstable(h)"
    with pytest.raises(ParameterError):
        splitting_from_terms(ex31, [("factor", "g")], [("unstable", "h")])
    with pytest.raises(ParameterError):
        splitting_from_terms(ex31, [("factor", "nope")], [("factor", "h")])
