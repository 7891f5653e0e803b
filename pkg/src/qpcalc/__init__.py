"""Quasi-probability calculus for successive projective yes-no measurements.

Modules:

* :mod:`qpcalc.hilbert` - validated states, projectors, PVMs and seeded generators
* :mod:`qpcalc.measurement` - probabilities, collapse, the Lüders map, phase rotations
* :mod:`qpcalc.quasiprob` - Margenau-Hill / Kirkwood-Dirac values, disturbance, tables
* :mod:`qpcalc.reconstruct` - state reconstruction from Kirkwood-Dirac tables
* :mod:`qpcalc.extremal` - checks of the [-1/8, 1] range
* :mod:`qpcalc.simulate` - Monte-Carlo projective and Gaussian-pointer sequences
* :mod:`qpcalc.cli` - the ``qpcalc`` command
"""

from .errors import QPCalcError
from .hilbert import (
    DensityMatrix,
    Projector,
    Pvm,
    Seed,
    complement,
    hs_inner,
    pvm_from_basis,
    random_density,
    random_projector,
    random_pvm,
    validate_density,
    validate_projector,
    validate_pvm,
)
from .measurement import (
    collapse_yes,
    is_undisturbed,
    luders_map,
    phase_rotate,
    probability,
    wigner_joint,
)
from .quasiprob import (
    QuasiProbTable,
    disturbance,
    factorized_joint,
    kd,
    kd_imag_via_phase,
    kd_table,
    mh,
    mh_table,
    mh_via_disturbance,
    wigner_table,
)
from .reconstruct import completeness_check, parameter_count_demo, reconstruct_state
from .extremal import refine_minimum, scan_bounds, trine_config
from .simulate import (
    PointerModel,
    SimulationReport,
    estimate_disturbance,
    pointer_correlation_exact,
    sample_projective_sequence,
    sample_weak_pointer,
)

__version__ = "0.1.0"
