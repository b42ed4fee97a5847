"""Plane-wave scattering from real confined potentials with confined nonlinearity."""

from .models import (ConfinementGeometry, Gaussian, NonlinearitySpec, PiecewiseGaussian,
                     Rectangular, ShiftedGaussian, Tabulated, eval_nonlinearity, eval_potential,
                     is_symmetric)
from .ode import IntegratorConfig, OdeProblem, integrate
from .scattering import (ScatterConfig, amplitudes_half_interval, amplitudes_symmetric_closed_form,
                         amplitudes_two_sided, integrate_basis, solve, solve_energy,
                         unitarity_defect, wronskian)
from .sweep import SweepSpec, run_sweep, theorem_report

__version__ = "0.1.0"
