"""Tunneling times, delay times and age differences for a 1-D square barrier.

Three independent routes to the same physics:

* closed forms assembled from the barrier phase time and the packet shape
  (:mod:`tunneltimes.closedform`, :mod:`tunneltimes.phasetime`),
* direct principal-value quadrature of the defining momentum-space integrals
  (:mod:`tunneltimes.quadrature`),
* time-domain wave-packet propagation with a flux-based arrival estimator
  (:mod:`tunneltimes.propagator`),

plus resonance-pole extraction and lifetime-weighted delay sums
(:mod:`tunneltimes.resonances`) and a CSV/JSON command-line driver
(:mod:`tunneltimes.cli`). Natural units, hbar = 1.
"""

from .closedform import (
    TimeBudget,
    age_difference,
    branch_point_terms,
    delay_A,
    delay_B,
    inverse_velocity,
    t_no_barrier,
    time_outside,
    tunneling_time,
    validity_check,
)
from .errors import (
    CountMismatchError,
    DomainError,
    GridTooSmallError,
    ImaginaryResidueError,
    InsufficientFluxError,
    NonConvergenceError,
    PoleProximityError,
    RegimeViolationError,
    ValidityWarning,
)
from .phasetime import PhaseTimeSample, k_tau_limit, phase_time, phase_time_fd
from .propagator import (
    ArrivalRecord,
    Grid1D,
    GridSpec,
    empirical_delay,
    evolve,
    init_state,
    measure_arrival,
    suggest_grid,
)
from .quadrature import (
    QuadratureConfig,
    oracle_delay_A,
    oracle_delay_B,
    oracle_inverse_velocity,
    oracle_tunneling_time,
    pv_integrate,
)
from .resonances import (
    ResonanceDecomposition,
    ResonancePole,
    build_decomposition,
    find_poles,
    lorentzian_delay,
    reconstruct_amplitude,
    remainder_delay,
    resonance_delay_logderiv,
    verify_remainder,
    winding_count,
)
from .scattering import (
    Barrier,
    ScatteringData,
    amplitude_grid,
    amplitudes,
    kappa,
    phase_sweep,
    small_a_amplitudes,
)
from .wavepacket import Packet, f_amp, g_phase, momentum_density

__version__ = "0.1.0"
