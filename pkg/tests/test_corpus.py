import pytest

from qkalman.analysis import run_document
from qkalman.corpus import EXAMPLE_IDS, list_examples, load_example, run_example
from qkalman.errors import UnknownExample


def test_list_examples():
    ids = [eid for eid, _ in list_examples()]
    assert ids == list(EXAMPLE_IDS)
    assert all(desc for _, desc in list_examples())


@pytest.mark.parametrize("eid", EXAMPLE_IDS)
def test_every_example_matches_its_verdicts(eid):
    report, diff = run_example(eid)
    assert diff == []
    assert report["pr"]["passed"]


def test_unknown_example():
    with pytest.raises(UnknownExample):
        run_example("no-such-example")


def test_overrides_change_the_model():
    a, _ = run_example("michelson")
    b, _ = run_example("michelson", {"omega_m": 2.0})
    assert a["spectrum"] != b["spectrum"]


def test_run_is_deterministic():
    assert run_example("optomech-bae")[0].as_dict() == run_example("optomech-bae")[0].as_dict()


def test_wrong_expectation_shows_in_diff():
    doc = load_example("corollary-bae")
    doc.expected["bae_qp"] = True
    _, diff = run_document(doc)
    assert any(d.startswith("bae_qp") for d in diff)
