"""Invariant integration on compact and finite groups.

Angle charts and Haar densities on SO(n)/SU(n), quadrature and Monte Carlo
integration, Schur orthogonality, Weyl integration over the Cartan torus,
and exact character theory of finite groups.
"""

from .charts import (
    AngleVectorAlt,
    AngleVectorSO,
    AngleVectorSU,
    Chart,
    ChartSpec,
    alt_density,
    get_chart,
    metric_density,
    so_density,
    so_from_angles,
    so_from_angles_alt,
    so_total_volume,
    su_density,
    su_density_classical_prefactor,
    su_from_angles,
    su_total_volume,
)
from .errors import (
    AngleRangeError,
    CalibrationError,
    CharacterSolveError,
    CostCapExceeded,
    GroupFileError,
    GroupMismatchError,
    HaarlabError,
    NonFiniteIntegrandError,
    NumericalResolutionError,
    SingularChartPointError,
    SingularGramError,
)
from .haar import (
    HaarSampler,
    MeanAxiomsReport,
    QuadratureSpec,
    conjugation_average,
    default_quadrature,
    haar_grid,
    integrate,
    integrate_trace_power,
    mean_axioms_report,
    moment_tensor,
    monte_carlo,
    sample,
)
from .invariants import (
    Poly,
    PolyForm,
    invariant_basis,
    invariant_dimension,
    invariant_project,
    symmetric_power_action,
)
from .matgroup import (
    SO,
    SU,
    Group,
    GroupElement,
    Tolerance,
    conjugate,
    identity,
    invariant_metric,
    inverse,
    multiply,
    planar_rotation,
    validate,
)

__all__ = [
    "AngleVectorAlt",
    "AngleVectorSO",
    "AngleVectorSU",
    "Chart",
    "ChartSpec",
    "alt_density",
    "get_chart",
    "metric_density",
    "so_density",
    "so_from_angles",
    "so_from_angles_alt",
    "so_total_volume",
    "su_density",
    "su_density_classical_prefactor",
    "su_from_angles",
    "su_total_volume",
    "AngleRangeError",
    "CalibrationError",
    "CharacterSolveError",
    "CostCapExceeded",
    "GroupFileError",
    "GroupMismatchError",
    "HaarlabError",
    "NonFiniteIntegrandError",
    "NumericalResolutionError",
    "SingularChartPointError",
    "SingularGramError",
    "HaarSampler",
    "MeanAxiomsReport",
    "QuadratureSpec",
    "conjugation_average",
    "default_quadrature",
    "haar_grid",
    "integrate",
    "integrate_trace_power",
    "mean_axioms_report",
    "moment_tensor",
    "monte_carlo",
    "sample",
    "Poly",
    "PolyForm",
    "invariant_basis",
    "invariant_dimension",
    "invariant_project",
    "symmetric_power_action",
    "SO",
    "SU",
    "Group",
    "GroupElement",
    "Tolerance",
    "conjugate",
    "identity",
    "invariant_metric",
    "inverse",
    "multiply",
    "planar_rotation",
    "validate",
]

__version__ = "0.1.0"
