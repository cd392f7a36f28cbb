"""Mirror descent for non-smooth, non-Lipschitz convex optimization.

The package is organized around the relative-continuity toolchain:

* :mod:`relmirror.geometry` - polynomial-norm reference functions, Bregman
  distances, and certificate-preserving combinators;
* :mod:`relmirror.subproblem` - the exact linearization-subproblem solver
  behind every mirror descent update;
* :mod:`relmirror.solvers` - deterministic and stochastic mirror descent,
  step policies, traces, and convergence-bound calculators;
* :mod:`relmirror.problems` - SVM and intersection-of-ellipsoids instances
  with oracles, references, radius/iteration budgets, and I/O;
* :mod:`relmirror.certify` - sampled numerical verification of the
  continuity definitions and the Bregman distance bounds;
* :mod:`relmirror.cli` - the ``relmirror`` command-line harness.
"""

from .errors import (
    ConfigError,
    DimensionMismatchError,
    InvalidInputError,
    InvalidPolynomialError,
    NumericalFailureError,
    ParseError,
    ReferenceDegeneracyError,
    RelMirrorError,
)
from .geometry import (
    PolyNormReference,
    bregman,
    h_eval,
    h_grad,
    reference_from_growth_polynomial,
    scale_reference,
    sum_references,
)
from .subproblem import LsSolution, mirror_update, solve_ls
from .solvers import (
    ConstantStep,
    EpsOverMSquaredStep,
    RelativeStrongStep,
    SolverConfig,
    Trace,
    TraceRow,
    gap_bound,
    iteration_budget,
    markov_tail_bound,
    mirror_descent,
    stochastic_mirror_descent,
    strong_gap_bound,
)
from .problems import (
    IepInstance,
    SvmInstance,
    generate_instance,
    generate_iep,
    generate_svm,
    iep_constants,
    iep_iteration_budget,
    iep_objective,
    iep_reference,
    iep_subgradient,
    instance_from_dict,
    instance_to_dict,
    parse_libsvm,
    svm_full_subgradient,
    svm_iteration_budget,
    svm_objective,
    svm_radius_bound,
    svm_reference,
    svm_stochastic_subgradient,
)
from .certify import (
    BallSampler,
    BoxSampler,
    CertificationReport,
    check_bregman_lower_bound,
    check_bregman_upper_bounds,
    check_key_property,
    check_relative_continuity,
    check_stochastic_boundedness,
    estimate_relative_strong_convexity,
)

__version__ = "0.1.0"
