import numpy as np
import pytest
from hypothesis import strategies as st

from njl_qet.pauli import PauliString, PauliSum

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
SINGLE = {"I": I2, "X": X, "Y": Y, "Z": Z}


def kron_oracle(factors: str) -> np.ndarray:
    """Dense matrix by explicit Kronecker products; qubit 0 is the rightmost factor."""
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(SINGLE[f], out)
    return out


def pauli_strings(width):
    return st.builds(PauliString, st.text("IXYZ", min_size=width, max_size=width),
                     st.integers(0, 3))


@st.composite
def pauli_sums(draw, max_width=5, max_terms=6):
    w = draw(st.integers(1, max_width))
    n = draw(st.integers(0, max_terms))
    terms = []
    for _ in range(n):
        f = draw(st.text("IXYZ", min_size=w, max_size=w))
        # eighths keep cancellations exact, away from the drop tolerance
        re = draw(st.integers(-16, 16)) / 8
        im = draw(st.integers(-16, 16)) / 8
        terms.append((complex(re, im), PauliString(f)))
    return PauliSum(w, terms)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# acceptance criteria register here and are listed after the run
ACCEPTANCE = {}


def record(number, title, ok, detail=""):
    ACCEPTANCE[number] = (title, bool(ok), detail)
    print(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:2d}. {title}: {detail}")
