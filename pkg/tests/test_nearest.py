import math

import numpy as np
import pytest

from geomeas.families import SymmetricParams, WTypeParams, symmetric_bloch, wtype_bloch
from geomeas.nearest import detect_family, measure, third_qubit
from geomeas.oracle import eliminate_third
from geomeas.states import (
    ProductState,
    PureState3,
    bloch_to_state,
    ghz_state,
    overlap_form,
    overlap_sq,
    pair_reduction,
    random_qubit,
    random_state,
    symmetric_state,
    w_state,
    wtilde_state,
    wtype_state,
    ww_state,
)

from conftest import random_acute, random_obtuse, random_unit

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)


def test_third_qubit_examples(rng):
    assert np.allclose(third_qubit(ghz_state(), KET0, KET0), KET0)

    s1, s2, _ = wtype_bloch(WTypeParams.normalized(1, 1, 1), 0.4)
    q1, q2 = bloch_to_state(s1), bloch_to_state(s2)
    assert np.allclose(third_qubit(w_state(), q1, q2), q1, atol=1e-12)

    for _ in range(200):
        s = random_state(rng)
        q1, q2 = random_qubit(rng), random_qubit(rng)
        q3 = third_qubit(s, q1, q2)
        lam, _ = eliminate_third(s, q1, q2)
        assert abs(overlap_sq(s, ProductState(q1, q2, q3)) - lam) < 1e-12


def test_third_qubit_orthogonal():
    with pytest.raises(ValueError, match="orthogonal pair"):
        third_qubit(w_state(), KET1, KET1)


def test_measure_examples():
    r = measure(w_state())
    assert r.lambda_sq == pytest.approx(4 / 9, abs=1e-12)
    assert r.e_g == 1 - r.lambda_sq
    assert r.degenerate and r.family_param["samples"] == 12 and len(r.nearest) == 12

    r = measure(ghz_state())
    assert r.lambda_sq == pytest.approx(0.5, abs=1e-12)
    vecs = [p.vector() for p in r.nearest]
    for k in (0, 7):
        assert any(abs(abs(v[k]) - 1) < 1e-12 for v in vecs)

    r = measure(PureState3([1, 0, 0, 0, 0, 0, 0, 0]))
    assert r.lambda_sq == 1.0 and r.e_g == 0.0
    assert np.allclose(r.nearest[0].vector(), [1, 0, 0, 0, 0, 0, 0, 0])


def test_measure_rejects_bad_input():
    with pytest.raises(ValueError):
        measure(PureState3([2, 0, 0, 0, 0, 0, 0, 0]))
    with pytest.raises(ValueError):
        measure(w_state(), policy="fastest")
    with pytest.raises(ValueError):
        measure(random_state(np.random.default_rng(0)), policy="analytic_only")


def test_detect_family():
    assert detect_family(w_state())[0] == "wtype"
    assert detect_family(PureState3(-1j * w_state().amp))[0] == "wtype"
    assert detect_family(ghz_state())[0] == "symmetric"
    assert detect_family(symmetric_state(0.5, 0.5j, 0.5, -0.5))[0] == "symmetric"
    name, theta = detect_family(ww_state(0.3))
    assert name == "ww" and theta == pytest.approx(0.3, abs=1e-12)
    assert detect_family(wtilde_state())[0] == "ww"
    assert detect_family(random_state(np.random.default_rng(3))) is None
    # negative W-type amplitude is outside the closed form's domain
    assert detect_family(PureState3(np.array([0, 1, 1, 0, -1, 0, 0, 0]) / math.sqrt(3))) is None


def test_reconstruction(rng):
    cases = [w_state(), ghz_state(), wtilde_state(), ww_state(0.9)]
    cases += [wtype_state(*random_acute(rng)) for _ in range(10)]
    cases += [wtype_state(*random_obtuse(rng)) for _ in range(10)]
    cases += [random_state(rng) for _ in range(10)]
    for s in cases:
        for policy in ("auto", "stationary", "oracle"):
            r = measure(s, policy)
            assert 0.25 - 1e-12 <= r.lambda_sq <= 1.0
            for p in r.nearest:
                assert abs(overlap_sq(s, p) - r.lambda_sq) < 1e-9


def test_degenerate_family_constant(rng):
    for _ in range(20):
        s = wtype_state(*random_acute(rng))
        r = measure(s, family_samples=36)
        assert r.degenerate and len(r.nearest) == 36
        vals = [overlap_sq(s, p) for p in r.nearest]
        assert max(vals) - min(vals) < 1e-10


def _tangent_decrease(red, s1, s2, rng, n=50):
    base = overlap_form(red, s1, s2)
    worst = math.inf
    for _ in range(n):
        d = rng.standard_normal(6)
        d[:3] -= (d[:3] @ s1) * s1
        d[3:] -= (d[3:] @ s2) * s2
        d *= 1e-4 / np.linalg.norm(d)
        t1, t2 = s1 + d[:3], s2 + d[3:]
        worst = min(worst, base - overlap_form(red, t1 / np.linalg.norm(t1), t2 / np.linalg.norm(t2)))
    return worst


def test_obtuse_optimum_isolated(rng):
    for _ in range(20):
        p = WTypeParams(*random_obtuse(rng))
        red = pair_reduction(wtype_state(p.a, p.b, p.c))
        s1, s2, _ = wtype_bloch(p)
        assert _tangent_decrease(red, s1, s2, rng) > 0


def test_symmetric_optimum_isolated(rng):
    for _ in range(20):
        v = rng.standard_normal(4)
        p = SymmetricParams.normalized(*v)
        if abs(p.a**2 + p.c**2 - p.b**2 - p.d**2) < 1e-3:
            continue
        red = pair_reduction(symmetric_state(p.a, p.b, p.c, p.d))
        (s1, s2), = symmetric_bloch(p)
        assert _tangent_decrease(red, s1, s2, rng) > 0


def test_policy_consistency(rng):
    cases = [wtype_state(*random_acute(rng)) for _ in range(5)]
    cases += [wtype_state(*random_obtuse(rng)) for _ in range(5)]
    cases += [symmetric_state(*(v / np.linalg.norm(v))) for v in rng.standard_normal((5, 4))]
    cases += [ww_state(t) for t in rng.uniform(0, math.pi, 5)]
    for s in cases:
        vals = [measure(s, pol).lambda_sq for pol in ("analytic_only", "stationary", "oracle")]
        assert max(vals) - min(vals) < 1e-6


def test_to_dict_roundtrip():
    d = measure(ghz_state()).to_dict()
    assert d["method"] == "analytic_symmetric"
    assert len(d["nearest"]) == 2
    assert d["e_g"] == 1 - d["lambda_sq"]
    assert d["nearest"][0]["bloch"][0] == [0.0, 0.0, 1.0]


def test_complex_symmetric_support_uses_magnitudes(rng):
    for _ in range(30):
        z = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        z /= np.linalg.norm(z)
        amp = np.zeros(8, dtype=complex)
        amp[[0, 7, 1, 6]] = z
        s = PureState3(amp)
        r = measure(s)
        assert r.method == "analytic_symmetric"
        assert abs(r.lambda_sq - measure(s, "oracle").lambda_sq) < 1e-10
        for p in r.nearest:
            assert abs(overlap_sq(s, p) - r.lambda_sq) < 1e-9
