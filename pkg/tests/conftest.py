import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from chernsimons.cyclo import Level
from chernsimons.states import DenseState, basis_state, fusion_state, state_from_ints, tensor_product
from chernsimons.surgery import Component, SurgeryPresentation
from chernsimons.tensornet import random_word, stabilizer_state_from_word

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


# float oracles -------------------------------------------------------------------

def reduced_spectrum(s: DenseState, region) -> np.ndarray:
    """Nonzero eigenvalues of the normalized reduced density matrix."""
    psi = s.to_complex()
    psi = psi / np.linalg.norm(psi)
    a = sorted(s.index(x) for x in region)
    rest = [i for i in range(s.n) if i not in a]
    m = np.transpose(psi, a + rest).reshape(s.k ** len(a), -1)
    sv = np.linalg.svd(m, compute_uv=False) ** 2
    return sv[sv > 1e-10]


def entropy_oracle_dits(s: DenseState, region) -> float:
    ev = reduced_spectrum(s, region)
    return float(-(ev * np.log(ev)).sum() / np.log(s.k))


def hopf_state(level: Level) -> DenseState:
    p = SurgeryPresentation.build(level, [Component("a", "boundary"), Component("b", "boundary")], {("a", "b"): 1})
    from chernsimons.surgery import state_from_presentation

    return state_from_presentation(p)


def bell_state(level: Level, names=("a", "b")) -> DenseState:
    return state_from_ints(level, np.eye(level.k, dtype=np.int64), list(names))


def word_states(level: Level, count: int, seed: int, max_n: int = 3, length: int = 10):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, max_n + 1))
        w = random_word(rng, n, length)
        out.append(stabilizer_state_from_word(level, w, n))
    return out


def corpus(level: Level) -> list[DenseState]:
    """Stabilizer test states on at most three sites."""
    states = [
        fusion_state(level),
        hopf_state(level),
        basis_state(level, [0, 0]),
        tensor_product(bell_state(level), basis_state(level, [0], ["c"])),
        bell_state(level),
    ]
    return states + word_states(level, 8, seed=level.k)


@pytest.fixture(params=[3, 5, 7], ids=lambda k: f"k{k}")
def level(request):
    return Level(request.param)
