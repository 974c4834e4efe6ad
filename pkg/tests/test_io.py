import json
import tempfile
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qkalman.corpus import EXAMPLE_IDS, fixture_path
from qkalman.errors import ModelFormatError
from qkalman.generators import random_annihilation, random_dims, random_hgamma
from qkalman.io import evaluate_expression, load_model, parse_document, read_document, save_model
from qkalman.model import HGammaParams, QuadratureSystem, assemble
from qkalman.parameterization import build_from_hgamma


def doc(**over):
    d = {"format_version": 1, "kind": "hgamma", "dims": {"n1": 1, "n2": 0, "n3": 0, "m": 1},
         "matrices": {"H_co": [[0, 1], [1, 0]], "Gamma_co": [[[0, 1], [0, -1]], [[0, -1], [0, 1]]]}}
    d.update(over)
    return d


def test_minimal_document():
    p = parse_document(doc()).model
    assert isinstance(p, HGammaParams)
    assert p.Gamma_co[0, 0] == 1j


def test_missing_dimension_is_named():
    d = doc(dims={"n2": 0, "n3": 0, "m": 1})
    with pytest.raises(ModelFormatError) as e:
        parse_document(d)
    assert e.value.field == "dims.n1"
    assert "dims.n1" in str(e.value)


def test_na_nb_split():
    d = doc(dims={"n1": 1, "n2": 0, "na": 1, "nb": 1, "m": 1})
    assert parse_document(d).model.dims.n3 == 2


def test_bad_version_and_kind():
    with pytest.raises(ModelFormatError):
        parse_document(doc(format_version=2))
    with pytest.raises(ModelFormatError):
        parse_document(doc(kind="transfer"))


def test_unknown_block():
    with pytest.raises(ModelFormatError) as e:
        parse_document(doc(matrices={"H_xx": [[1]]}))
    assert e.value.field == "matrices.H_xx"


def test_invariant_violation_is_reported():
    d = doc(matrices={"H_co": [[0, 1], [2, 0]]})
    with pytest.raises(ModelFormatError) as e:
        parse_document(d)
    assert "symmetric" in str(e.value)


def test_expressions_and_overrides():
    d = doc(parameters={"kappa": 2.0},
            matrices={"Gamma_co": {"scale": "sqrt(kappa/2)", "data": [[1, [0, 1]], [1, [0, -1]]]}})
    assert parse_document(d).model.Gamma_co[0, 0] == 1.0
    assert parse_document(d, {"kappa": 8.0}).model.Gamma_co[0, 0] == 2.0
    with pytest.raises(ModelFormatError):
        parse_document(d, {"nope": 1.0})


def test_expression_evaluator_is_restricted():
    assert evaluate_expression("2*sqrt(2)*g", {"g": 0.5}) == pytest.approx(np.sqrt(2))
    assert evaluate_expression("-mass*omega_m**2", {"mass": 2, "omega_m": 3}) == -18
    assert evaluate_expression("1e-3 + pi", {}) == pytest.approx(np.pi + 1e-3)
    for bad in ("__import__('os')", "g.real", "[1]", "lam", "1/0", "open"):
        with pytest.raises(ModelFormatError):
            evaluate_expression(bad, {"g": 1.0})


def test_truncated_file_reports_line(tmp_path):
    f = tmp_path / "m.json"
    f.write_text(json.dumps(doc(), indent=2)[:80])
    with pytest.raises(ModelFormatError) as e:
        read_document(f)
    assert e.value.line is not None


def test_scientific_notation():
    d = doc(matrices={"H_co": [[1e-3, "2.5E2"], [250.0, 0]]})
    assert parse_document(d).model.H_co[0, 1] == 250.0


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_save_load_round_trip_is_exact(seed):
    rng = np.random.default_rng(seed)
    p = random_hgamma(random_dims(rng), rng)
    models = [p, build_from_hgamma(p), assemble(build_from_hgamma(p)),
              random_annihilation(2, 1, rng)]
    with tempfile.TemporaryDirectory() as d:
        for i, m in enumerate(models):
            path = Path(d) / f"{i}.json"
            save_model(m, path)
            m2 = load_model(path)
            assert type(m2) is type(m)
            for f in ("A", "B", "C", "Abar", "Bbar", "Cbar") + tuple(getattr(m, "blocks", dict)()):
                if hasattr(m, f):
                    assert np.array_equal(getattr(m, f), getattr(m2, f))


@pytest.mark.parametrize("eid", EXAMPLE_IDS)
def test_fixtures_load(eid):
    d = read_document(fixture_path(eid))
    assert d.id == eid


def test_michelson_fixture_is_quadrature():
    m = load_model(fixture_path("michelson"))
    assert isinstance(m, QuadratureSystem) and (m.n, m.m) == (2, 2)
