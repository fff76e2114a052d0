"""Numerical laboratory for dynamical instability in delta-kicked
Bose-Einstein condensates on a ring.

Engines:
  gpe          -- split-step mean-field evolution with instantaneous kicks
  bogoliubov   -- time-dependent quasiparticle evolution and N_ex diagnostics
  perturbative -- analytic one-period maps, Bessel kick matrices, closed forms
  scan         -- parameter sweeps and instability-window extraction
  core         -- parameters, spectrum, and resonance predictors
"""

from .core import (KickKind, ModeSpectrum, PhysicalParams, ResonancePrediction,
                   RingGrid, mode_coefficients, mode_frequency, mode_spectrum,
                   predict_single_mode_resonances, predict_two_mode_resonances)
from .special import bessel_i_array, bessel_j_array, phi_function
from .gpe import (CondensateField, EnergyRecord, EvolutionConfig,
                  apply_kick_phase, average_energy, condensate_energy,
                  evolve_kicked, init_homogeneous, mode_population, strang_step)
from .bogoliubov import (BogoliubovModeSet, NexSeries, apply_kick_to_modes,
                         bogoliubov_step, evolve_coupled, init_modes,
                         noncondensed_number)
from .perturbative import (Basis, KickMatrix, OnePeriodMap, PerturbationState,
                           a_from_b, b_from_a, closed_form_amplitude,
                           floquet_growth_rate, free_ringing, iterate_map,
                           kick_matrix_double, kick_matrix_single,
                           one_period_map, qkr2_closed_form_wavefunction)
from .scan import (SweepRow, SweepSpec, classify_growth, extract_windows,
                   run_sweep)

__version__ = "0.1.0"
