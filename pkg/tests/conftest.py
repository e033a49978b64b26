import numpy as np
import pytest
from hypothesis import settings, strategies as st

from grassfock import GrassmannElement

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

coeff = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
small_int_coeff = st.builds(complex, st.integers(-4, 4), st.integers(-4, 4))


def elements(max_gen=6, max_terms=12, coeffs=coeff):
    masks = st.integers(0, (1 << max_gen) - 1)
    return st.dictionaries(masks, coeffs, max_size=max_terms).map(GrassmannElement)


def odd_elements(max_gen=6, coeffs=coeff):
    return elements(max_gen, coeffs=coeffs).map(
        lambda z: GrassmannElement({m: c for m, c in z.items() if m.bit_count() % 2})
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS, key=lambda k: (int(str(k).split('[')[0]), str(k))):
            terminalreporter.write_line(RESULTS[key])
