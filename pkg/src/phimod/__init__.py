"""phimod: exact twisted-module computations over two-variable Iwasawa algebras."""

__version__ = "0.1.0"

from .field import Fq, fq_make, frobenius

__all__ = ["Fq", "fq_make", "frobenius", "__version__"]
