"""Bundled example models with their reference verdicts."""
import json
from importlib import resources

from .analysis import run_document
from .errors import UnknownExample
from .io import parse_document

__all__ = ["EXAMPLE_IDS", "list_examples", "fixture_path", "load_example", "run_example"]

EXAMPLE_IDS = (
    "hurwitz-counterexample",
    "optomech-phase-shift",
    "optomech-bae",
    "corollary-bae",
    "michelson",
    "co-asymmetric-poles",
)


def fixture_path(example_id):
    if example_id not in EXAMPLE_IDS:
        raise UnknownExample(example_id)
    return resources.files("qkalman") / "fixtures" / f"{example_id}.json"


def fixture_bytes(example_id):
    return fixture_path(example_id).read_bytes()


def list_examples():
    """[(id, description)] in a fixed order."""
    out = []
    for eid in EXAMPLE_IDS:
        doc = json.loads(fixture_bytes(eid))
        out.append((eid, doc.get("description", "")))
    return out


def load_example(example_id, overrides=None):
    return parse_document(json.loads(fixture_bytes(example_id)), overrides)


def run_example(example_id, overrides=None, tol=None):
    """(AnalysisReport, diff) where diff lists mismatches with the stored verdicts."""
    return run_document(load_example(example_id, overrides), tol)
