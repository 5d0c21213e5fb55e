import os
import pathlib

import numpy as np
import pytest

import mdlite

ROOT = pathlib.Path(os.environ.get("MDLITE_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))
FIXTURES = ROOT / "tests" / "fixtures"
CORPUS = ROOT / "tests" / "regression" / "corpus"

SETUP = """units lj
region box block 0 6.6 0 6.6 0 6.6
create_box 1 box
create_atoms 1 sc 1.1
mass 1 1.0
pair_style lj/cut 2.5
pair_coeff 1 1 1.0 1.0
"""


@pytest.fixture
def handle():
    h = mdlite.open([])
    assert h != 0
    yield h
    mdlite.close(h)


def test_version():
    assert mdlite.version() == mdlite.__version__
    assert "lj/cut" in mdlite.styles()


def test_commands_and_introspect(handle):
    assert mdlite.commands_string(handle, SETUP) == mdlite.OK
    status, n = mdlite.introspect(handle, "natoms")
    assert status == mdlite.OK and n == 216
    status, box = mdlite.introspect(handle, "box")
    assert box == pytest.approx((0, 6.6, 0, 6.6, 0, 6.6))
    status, pe = mdlite.introspect(handle, "pe")
    assert status == mdlite.OK and pe < 0


def test_extract_arrays(handle):
    mdlite.commands_string(handle, SETUP)
    status, x = mdlite.extract(handle, "x")
    assert status == mdlite.OK
    assert x.shape == (216, 3) and x.dtype == np.float64
    status, ids = mdlite.extract(handle, "id")
    assert list(ids) == list(range(1, 217))
    # perfect lattice: forces cancel
    status, f = mdlite.extract(handle, "f")
    assert np.abs(f).max() < 1e-10


def test_error_slot(handle):
    assert mdlite.command(handle, "frobnicate 1") == mdlite.FAILED
    assert mdlite.has_error(handle)
    has, code, message, rendered = mdlite.get_last_error(handle)
    assert has and code == "E-UNKNOWN-CMD"
    assert "frobnicate" in rendered and "^" in rendered
    assert not mdlite.has_error(handle)
    # the instance is still usable
    assert mdlite.command(handle, "units lj") == mdlite.OK


def test_bad_flag_and_closed_handle():
    assert mdlite.open(["-bogus"]) == 0
    assert mdlite.get_last_error(0)[1] == "E-BAD-FLAG"
    h = mdlite.open(["-echo", "none"])
    mdlite.close(h)
    mdlite.close(h)
    assert mdlite.command(h, "units lj") == mdlite.FAILED
    assert mdlite.get_last_error(0)[1] == "E-INVALID-HANDLE"


def test_restart_bytes_deterministic(handle):
    mdlite.commands_string(handle, SETUP)
    status, a = mdlite.restart_bytes(handle)
    status, b = mdlite.restart_bytes(handle)
    assert status == mdlite.OK and isinstance(a, bytes) and a == b and len(a) > 0


def test_rel_err():
    assert mdlite.rel_err(1.0, 1.0) == 0.0
    assert mdlite.rel_err(2.0, 1.0) == 0.5
    assert mdlite.rel_err(0.0, 1e-12) == pytest.approx(1e-12)


def test_style_suite():
    reports = mdlite.style_test(str(FIXTURES / "force-styles"), include_tags=["morse"])
    assert len(reports) == 2
    assert all(r["status"] == "PASS" for r in reports)
    perturbed = mdlite.style_test(str(FIXTURES / "perturbed"))
    assert [r["status"] for r in perturbed] == ["PASS", "FAIL"]
    with pytest.raises(ValueError):
        mdlite.style_test(str(FIXTURES / "force-styles"), variants=["bogus"])


def test_generate_reference_is_reproducible():
    path = FIXTURES / "force-styles" / "morse.yaml"
    assert mdlite.generate_reference(str(path)) == path.read_text()


def test_regression_selection_and_run():
    sel = mdlite.select_examples(str(CORPUS), ["src/pair/morse.cpp"])
    assert sel["mode"] == "quick"
    assert sel["chosen"] == ["morse/basic", "table/build"]
    assert mdlite.select_examples(str(CORPUS), ["docs/cli.md"])["mode"] == "none"
    results = mdlite.regress(str(CORPUS), ["src/pair/morse.cpp"], workers=2)
    assert [r[0] for r in results] == sel["chosen"]
    assert all(passed for _, passed, _ in results)
