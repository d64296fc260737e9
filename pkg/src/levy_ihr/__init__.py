"""Intra-horizon value at risk and expected shortfall for Lévy-driven P&L."""
from .approximation import ApproxConfig, ApproximationReport, approximate, bernstein_measure, discretize
from .calibration import (CalibrationResult, FitConfig, ReturnSeries, ingest_prices, mle_fit,
                          rolling_calibrate)
from .cos import cos_density
from .errors import *  # noqa: F401,F403
from .hejd import (Direction, RandomizedFPP, Regime, RootSet, build_dirichlet_matrix, find_roots,
                   lc_fpp, randomized_fpp, solve_weights)
from .inversion import GaverStehfestTable, gs_coefficients, invert_at
from .models import (CGMY, VG, Diffusion, HyperExpSpec, Scenario, ScenarioKind,
                     check_ies_well_defined, kou, laplace_exponent, levy_exponent,
                     model_from_json, model_to_json)
from .montecarlo import McConfig, McResult, simulate_fpp
from .risk import RiskQuery, RiskReport, contributions, fpp, ies, ivar, pit_risk, risk_report

__version__ = "0.1.0"
