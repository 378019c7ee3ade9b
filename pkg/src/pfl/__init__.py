"""Exact flags, Engel ranks and contact-system classification for polynomial distributions."""

__version__ = "0.1.0"

from .errors import (ChartMismatchError, InconsistencyError, InputError, InternalError, PflError,
                     PreconditionError, RankNotConstantError, ReductionError, VerificationError)
from .poly import Polynomial, Rational, as_rational, compose, evaluate, parse_point, partial_derivative, poly_arith
from .linalg import PolyMatrix, generic_rank, minors_vanish_identically, rank_at_point
from .exterior import (Chart, DiffeoPair, Distribution, FourForm, OneForm, PfaffianSystem, TwoForm,
                       VectorField, annihilator, exterior_derivative, interior_product, kernel,
                       lie_bracket, pairing, pushforward, wedge_two_forms)
from .flags import FlagReport, RegularityVerdict, derived_flag, derived_flag_forms, is_regular_point, lie_flag
from .bryant import (CorankOneVerdict, StructureFunctions, characteristic_distribution, corank_one_B,
                     decide_corank_one_involutive, engel_rank_le_one, engel_relations_check,
                     structure_functions)
from .jets import (JetSpec, ProlongationLetter, ProlongationWord, canonical_contact_system,
                   constant_parameter_family, jet_frame,
                   generate_kumpera_ruiz, lift_vector_field, prolong)
from .contact import (CANONICAL, EXTENDED_KR, REJECTED, ClassificationVerdict, classify_contact,
                      classify_pfaffian, kr_signature_at_point)
from .reduction import KRReduction, kr_reduce, mobius_is_diffeo, mobius_map
