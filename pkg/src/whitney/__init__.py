"""Whitney numbers of matroids and c-arrangements, intrinsic volumes of
zonotopes and discotopes, arrangement extensions and concentration
experiments."""

from .exactnum import Poly, is_log_concave, is_unimodal, log_concavity_witness
from .matroid import Matroid, catalog, char_poly, flats_and_mobius

__version__ = "0.1.0"
