import pytest

from twinflight.aero.database import AeroDatabase, CoefficientTables
from twinflight.aero.tables import AeroTable
from twinflight.fusion.emulators import truth_database


@pytest.fixture(scope="session")
def analytic_db():
    """Fast tabulated database shared by simulation tests."""
    return truth_database()


@pytest.fixture(scope="session")
def avl_db():
    return truth_database(tool="avl")


def make_flat_db(
    cl0: float = 0.4,
    cm_q_value: float = 0.0,
    geometry: tuple[float, float, float] = (2.0, 0.2995, 0.8544),
) -> AeroDatabase:
    """Minimal hand-built database with constant baselines.

    Useful for buildup arithmetic checks; bypasses load-time validation on
    purpose so increment tables can hold arbitrary constants.
    """
    alpha = (-20.0, 30.0)
    beta = (0.0, 20.0)
    baselines = {
        "CL": cl0, "CD": 0.05, "Cm": 0.01, "CY": 0.0, "Cl": 0.0, "Cn": 0.0,
    }
    coeffs = {}
    for name, value in baselines.items():
        rate_increments = {}
        if name == "Cm" and cm_q_value != 0.0:
            rate_increments["q"] = AeroTable.constant(
                ("alpha", "q_hat"), (alpha, (-2.0, 2.0)), cm_q_value
            )
        coeffs[name] = CoefficientTables(
            baseline=AeroTable.constant(("alpha", "beta"), (alpha, beta), value),
            rate_increments=rate_increments,
        )
    b, c, s = geometry
    return AeroDatabase(coefficients=coeffs, wingspan=b, mean_chord=c, reference_area=s)
