"""Exact checking of multiplier Hopf and weak multiplier Hopf structures built from integrals."""

from .algebra import DenseAlgebra, SupportedAlgebra, PointwiseIntegers, TensorAlgebra, Multiplier
from .coproduct import Coproduct, dual_function, explicit, grouplike
from .evidence import Classification, Evidence, InconsistencyError
from .integrals import Functional, scalar_invariance_to_integral
from .instance import Instance, InstanceError, load_instance, parse_instance
from .ls_engine import LSEngine, classify
from .weak_engine import classify_weak

__version__ = "0.1.0"

__all__ = [
    "Classification", "Coproduct", "DenseAlgebra", "Evidence", "Functional", "InconsistencyError", "Instance",
    "InstanceError", "LSEngine", "Multiplier", "PointwiseIntegers", "SupportedAlgebra", "TensorAlgebra",
    "classify", "classify_weak", "dual_function", "explicit", "grouplike", "load_instance", "parse_instance",
    "scalar_invariance_to_integral",
]
