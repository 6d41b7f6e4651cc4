from pathlib import Path

from py_chemostat import HollingII, HollingIII, Parameters

CONFIG_DIR = Path(__file__).resolve().parents[2] / "configs"

# Holling II, equal removal rates: lambda_P = 0.2, lambda_Z = 0.25, mu_c1 = 0.325.
HOLLING2_F1 = HollingII(1.0, 0.2)
HOLLING2_F2 = HollingII(2.0, 0.5)

# Holling III: lambda_P(1.2) = sqrt(6).
HOLLING3_F1 = HollingIII(1.7, 0.8)
HOLLING3_F2 = HollingIII(1.6, 0.9)


def holling2_equal(mu: float = 0.6) -> Parameters:
    return Parameters(mu=mu, D=1.0, gamma1=2.0, gamma2=1.5, f1=HOLLING2_F1, f2=HOLLING2_F2)


def holling2_perturbed(mu: float = 0.9) -> Parameters:
    return Parameters(mu=mu, D=1.0, D1=1.2, D2=1.3, gamma1=2.0, gamma2=1.5,
                      f1=HOLLING2_F1, f2=HOLLING2_F2)


def holling3_perturbed(mu: float = 7.25) -> Parameters:
    return Parameters(mu=mu, D=1.0, D1=1.2, D2=1.1, gamma1=0.8, gamma2=0.9,
                      f1=HOLLING3_F1, f2=HOLLING3_F2)
