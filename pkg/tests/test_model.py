import math

import pytest
from hypothesis import given, strategies as st

from puc.kb import KBError
from puc.model import (
    MixingProportions,
    ModelParams,
    ObservationParams,
    anomaly_likelihood,
    anomaly_log_likelihood,
    default_params,
    missing_likelihood,
    regular_likelihood,
    uniform_pi,
)


def test_defaults(kb, params):
    m = params.mixing
    assert (m.w_regular, m.w_missing, m.w_anomalous) == (0.98, 0.01, 0.01)
    assert abs(m.w_regular + m.w_missing + m.w_anomalous - 1) <= 1e-12
    assert m.w_missing < m.w_regular and m.w_anomalous < m.w_regular
    assert params.obs.anomaly_alphabet_size == 128
    for u, dist in params.obs.pi.items():
        assert set(dist) == kb.entries[u].all_symbols
        assert abs(math.fsum(dist.values()) - 1) <= 1e-12
        assert all(p > 0 for p in dist.values())


@pytest.mark.parametrize("w", [(0.5, 0.3, 0.3), (0.4, 0.5, 0.1), (0.4, 0.1, 0.5), (1.2, -0.1, -0.1)])
def test_mixing_constraints(w):
    with pytest.raises(ValueError):
        MixingProportions(*w)


def test_litre_regular_likelihood():
    from puc.kb import load_kb
    litre = {"name": "litre", "surfaces": ["cubic decimetre", "litre", "cubic decimeter", "liter"],
             "entity": "volume", "symbols": ["l", "L", "ltr"]}
    gram = {"name": "gram", "entity": "mass", "symbols": ["g"]}
    kb = load_kb([[litre, gram]])
    params = default_params(kb)
    assert regular_likelihood("l", "litre", params) == pytest.approx(1 / 7, abs=1e-15)
    assert regular_likelihood("g", "litre", params) == 0
    assert regular_likelihood(None, "litre", params) == 0
    with pytest.raises(KBError):
        regular_likelihood("l", "furlong", params)


def test_missing_likelihood():
    assert missing_likelihood(None) == 1
    assert missing_likelihood("") == 1
    assert missing_likelihood("l") == 0


def test_anomaly_likelihood_values(params):
    # closed form evaluated separately: 128**-4 * 2**-5
    assert anomaly_likelihood("ltrs", params) == pytest.approx(1.1641532182693481e-10, rel=1e-12)
    assert anomaly_likelihood("l", params) == pytest.approx(0.001953125, rel=1e-12)
    assert anomaly_likelihood("l", params) < 1 / 7
    assert anomaly_likelihood(None, params) == 0


def test_anomaly_mass_bounded(params):
    # sum over lengths n >= 1 of A**n strings each with mass A**-n 2**-(n+1)
    a = params.obs.anomaly_alphabet_size
    total = math.fsum(a ** n * math.exp(anomaly_log_likelihood("x" * n, params))
                      for n in range(1, 60))
    assert total <= 1.0
    assert total == pytest.approx(0.5, rel=1e-12)


def test_regular_beats_anomaly_for_known_symbols(kb, params):
    for u, dist in params.obs.pi.items():
        for s in dist:
            assert regular_likelihood(s, u, params) > anomaly_likelihood(s, params)


@given(x=st.one_of(st.none(), st.text(max_size=6)))
def test_missing_xor_present(params, x):
    present = any(regular_likelihood(x, u, params) > 0 for u in params.obs.pi) \
        or anomaly_likelihood(x, params) > 0
    assert (missing_likelihood(x) > 0) != present


def test_params_validation(fixture_kb):
    pi = uniform_pi(fixture_kb)
    pi["litre"] = {"l": 1.0}
    with pytest.raises(ValueError, match="support"):
        ModelParams(MixingProportions(), ObservationParams(pi), fixture_kb)
    with pytest.raises(ValueError):
        ObservationParams({"litre": {"l": 0.5, "L": 0.4}})
    with pytest.raises(ValueError):
        ObservationParams(uniform_pi(fixture_kb), anomaly_alphabet_size=0)
    with pytest.raises(ValueError, match="unknown units"):
        ModelParams(MixingProportions(), ObservationParams(uniform_pi(fixture_kb)), fixture_kb,
                    {"furlong": MixingProportions()})
