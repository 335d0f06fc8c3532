import numpy as np
import pytest

from bpec.channel import ChannelModel, GilbertElliottParams, from_gilbert_elliott

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"ACCEPTANCE #{number} {title}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def ge_from_average(eps1, g1, eps2, g2) -> ChannelModel:
    return from_gilbert_elliott(GilbertElliottParams.from_average(eps1, g1, eps2, g2))


@pytest.fixture
def ge_sym():
    return ge_from_average(0.5, 0.2, 0.5, 0.3)


@pytest.fixture
def ge_asym():
    return ge_from_average(0.6, 0.3, 0.4, 0.7)


@pytest.fixture
def ge_sticky():
    return ge_from_average(0.6, 0.1, 0.5, 0.1)


def random_ge(rng: np.random.Generator) -> ChannelModel:
    b1, g1, b2, g2 = rng.uniform(0.05, 0.95, size=4)
    return from_gilbert_elliott(GilbertElliottParams(b1, g1, b2, g2))


def random_two_state(rng: np.random.Generator) -> ChannelModel:
    p, q = rng.uniform(0.05, 0.95, size=2)
    pmf = rng.dirichlet(np.ones(4), size=2)
    return ChannelModel(("a", "b"), np.array([[1 - p, p], [q, 1 - q]]), pmf)
