import numpy as np
import pytest

from imcf_lab import AxisymGrid, WarpedProfile, exact_round_flow, perturbed_sphere, run_imcf

T_DESK, NT_DESK, NTH_DESK = 2.0, 256, 64


@pytest.fixture(scope="session")
def exact_flows():
    """The four model flows at desk scale, keyed by profile kind."""
    return {
        "flat": exact_round_flow(WarpedProfile.flat(), 1.0, T_DESK, NT_DESK, NTH_DESK),
        "schwarzschild": exact_round_flow(WarpedProfile.schwarzschild(0.2), 2.0, T_DESK, NT_DESK, NTH_DESK),
        "hyperbolic": exact_round_flow(WarpedProfile.hyperbolic(), 1.0, T_DESK, NT_DESK, NTH_DESK),
        "adss": exact_round_flow(WarpedProfile.adss(0.2), 2.0, T_DESK, NT_DESK, NTH_DESK),
    }


_pde_cache = {}


def pde_flow(n=NTH_DESK, nt=NT_DESK, ell=2, eps=0.1, T=T_DESK):
    key = (n, nt, ell, eps, T)
    if key not in _pde_cache:
        grid = AxisymGrid(n)
        _pde_cache[key] = run_imcf(WarpedProfile.flat(), perturbed_sphere(grid, 1.0, ell, eps), T, nt)
    return _pde_cache[key]


@pytest.fixture(scope="session")
def p2_flow():
    return pde_flow()


@pytest.fixture(scope="session")
def refinement_flows():
    """``1 + 0.1 P2`` at (N_theta, N_t) = (32, 128), (64, 256), (128, 512)."""
    return [pde_flow(32, 128), pde_flow(64, 256), pde_flow(128, 512)]


def observed_order(errors):
    e = np.abs(np.asarray(errors, dtype=float))
    return np.log2(e[:-1] / e[1:])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
