"""Phase factors for quantum signal processing through the SU(2) nonlinear Fourier transform."""

from .errors import (
    AdmissibilityError,
    DivisionDegenerate,
    GapTooSmall,
    NonConvergent,
    NonRealGamma,
    NormError,
    ParityError,
    QSPError,
    SolverFailure,
)
from .fpi import ReducedPhases, forward_map, fpi_solve
from .inverse import inverse_nlfft, layer_stripping, rh_factorization, rh_gamma_at, solve_inverse
from .nlft import GammaSeq, NlftPair, nlft_direct, nlft_fast, validate_pair
from .poly import ChebPoly, LaurentPoly, b_from_cheb, check_admissible, cheb_eval, cheb_interpolate
from .qsp import (
    PhaseFactors,
    convention_shift,
    gamma_to_psi,
    gqsp_from_gamma,
    synthesize,
    u_eval,
    verify,
)
from .qsvt import block_encode, inverse_demo, qsp_on_spectrum, svt_reference
from .targets import TargetSpec, inverse_poly, jacobi_anger, step_poly
from .weiss import WeissConfig, weiss_complement

__version__ = "0.1.0"
