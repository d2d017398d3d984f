import numpy as np
import pytest

from srspm_sfs.geometry import make_architecture

TABLE1 = {
    "srspm1": (0.5, 0.5328, 0.7073),
    "srspm2": (0.5, 0.8652, 0.9875),
    "srspm3": (0.5, 0.8425, 0.5694),
    "srspm4": (0.5, 0.1506, 0.5173),
}
C_REF = np.array([0.0639, 0.1107, 0.2597])
P0 = np.array([0.0, 0.0, 2.5])


@pytest.fixture
def srspm1():
    return make_architecture(*TABLE1["srspm1"])


@pytest.fixture
def archs():
    return {k: make_architecture(*v) for k, v in TABLE1.items()}


def random_instance(rng, phi_max=np.pi / 6):
    """Architecture and orientation drawn from the valid ranges."""
    while True:
        r_m = rng.uniform(0.2, 1.0)
        gf, gm = rng.uniform(0.05, 2.0, 2)
        if abs(np.sin(gf - gm)) > 0.05:
            break
    k = rng.normal(size=3)
    k /= np.linalg.norm(k)
    phi = rng.uniform(0.0, phi_max)
    return make_architecture(r_m, gf, gm), k * np.tan(phi / 2)


ACCEPTANCE_LINES: list[str] = []


def report(criterion: int, ok: bool, detail: str) -> None:
    """Record one acceptance line; printed live and repeated in the terminal summary."""
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
