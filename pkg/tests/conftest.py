from __future__ import annotations

from importlib import resources
from pathlib import Path

import pytest

from tcountopt.circuit import parse_qasm
from tcountopt.compiler import compile_circuit
from tcountopt.tensor import SignatureTensor

CORPUS = Path(str(resources.files("tcountopt") / "corpus"))


def load(name: str):
    return parse_qasm((CORPUS / f"{name}.qasm").read_text())


@pytest.fixture(scope="session")
def cs_tensor() -> SignatureTensor:
    return SignatureTensor.from_entries(2, [(0, 0, 1), (0, 1, 1)])


@pytest.fixture(scope="session")
def ccz_tensor() -> SignatureTensor:
    return SignatureTensor.from_entries(3, [(0, 1, 2)])


@pytest.fixture(scope="session")
def gf2_2_target():
    (t,) = compile_circuit(load("gf2_2_mult"))
    return t


@pytest.fixture(scope="session")
def gf2_3_target():
    (t,) = compile_circuit(load("gf2_3_mult"))
    return t


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
