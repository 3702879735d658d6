import warnings
from pathlib import Path

import numpy as np
import pytest

from stabnet import Graph, load_edge_list, load_gml

DATA = Path(__file__).resolve().parent.parent / "data"

# optional datasets: documented in data/README.md, not shipped
OPTIONAL = {
    "dolphins": "dolphins.gml",
    "football": "football.gml",
    "polbooks": "polbooks.gml",
}


def optional_graph(name: str) -> Graph:
    path = DATA / OPTIONAL[name]
    if not path.exists():
        pytest.skip(f"dataset {OPTIONAL[name]} not present; see data/README.md")
    return load_gml(path.read_text())


@pytest.fixture(scope="session")
def karate() -> Graph:
    return load_edge_list((DATA / "karate.txt").read_text())


@pytest.fixture(scope="session")
def lesmis() -> Graph:
    return load_gml((DATA / "lesmis.gml").read_text())


def random_graph(rng: np.random.Generator, n: int, p: float = 0.4,
                 weighted: bool = True) -> Graph:
    """Random connected-ish symmetric graph without self-loops."""
    adj = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                adj[i, j] = adj[j, i] = rng.uniform(0.5, 3.0) if weighted else 1.0
    # chain fallback keeps every node attached
    for i in range(n - 1):
        if adj[i, i + 1] == 0 and adj[i].sum() == 0:
            adj[i, i + 1] = adj[i + 1, i] = 1.0
    if adj[n - 1].sum() == 0:
        adj[n - 1, n - 2] = adj[n - 2, n - 1] = 1.0
    return Graph([str(i) for i in range(n)], adj)


@pytest.fixture(autouse=True)
def _quiet_disconnection_warnings():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*disconnected.*")
        warnings.filterwarnings("ignore", message=".*no connected community pair.*")
        yield


ACCEPTANCE_RESULTS: list[tuple[int, str, str]] = []


def record_criterion(num: int, name: str, status: str) -> None:
    ACCEPTANCE_RESULTS.append((num, name, status))
    print(f"[criterion {num:02d}] {name}: {status}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, name, status in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"[criterion {num:02d}] {name}: {status}")
