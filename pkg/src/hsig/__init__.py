"""Higher-rank expected signatures of finite adapted processes."""

from .dp import PhiResult, brute_force_phi, complexity_probe, expsig0_dp, expsig1_dp, phi_r
from .errors import (ConfigurationError, HsigError, InvalidIncrement, ResourceError,
                     ValidationError)
from .graded import (Tensor, algebra, basis_enumerate, dilate, dim_graded, exp_r, norm,
                     product_r)
from .process import (AdaptedFunctional, Atom, CondExp, Compose, CoordEval, FiltrationTree,
                      cond_exp, enumerate_paths, eval_adapted_functional, load_tree, validate)
from .signatures import (conditional_signature_process, expected_signature, robust_normalize,
                         signature, signature_rank_r)
from .tensor import shuffle_product, tensor_exp, tensor_product

__version__ = "0.1.0"
