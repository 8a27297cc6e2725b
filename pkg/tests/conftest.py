import numpy as np
import pytest

from uavcovert import _backend
from uavcovert.model import Scenario


@pytest.fixture(scope="session")
def paper():
    return Scenario.paper_default()


@pytest.fixture(params=_backend.available_backends())
def backend(request):
    with _backend.use_backend(request.param):
        yield request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_scenario(rng, N=None, **overrides):
    """Small random geometry that is always reachable."""
    q_u0 = rng.uniform(-200, 200, 2)
    q_uF = rng.uniform(-200, 200, 2)
    v, sigma_t = 3.0, 0.5
    need = int(np.ceil(np.linalg.norm(q_uF - q_u0) / (v * sigma_t)))
    N = N or need + int(rng.integers(1, 60))
    kw = dict(
        q_a=rng.uniform(-150, 150, 2),
        q_b=rng.uniform(-250, 250, 2),
        q_w=rng.uniform(-250, 250, 2),
        q_u0=q_u0,
        q_uF=q_uF,
        H=float(rng.uniform(50, 150)),
        v_max=v,
        sigma_t=sigma_t,
        N=N,
        beta_0=1e-6,
        sigma_b2=1e-14,
        sigma_w2=1e-14,
        rho_b=float(rng.uniform(0.05, 0.3)),
        epsilon=float(rng.uniform(0.02, 0.3)),
        p_hat_u=float(rng.uniform(1e-3, 0.1)),
    )
    kw.update(overrides)
    return Scenario(**kw)


def pytest_terminal_summary(terminalreporter):
    from acceptance_report import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS, key=lambda k: (int("".join(c for c in k if c.isdigit()) or 0), k)):
        terminalreporter.write_line(RESULTS[key])
