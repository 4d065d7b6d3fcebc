"""Accuracy-matrix analysis of generalized qubit measurements."""
from .accuracy import AccuracyMatrix, accuracy_matrix, accuracy_parameter, error_from_accuracy, fisher_matrix
from .povm import Povm, PovmError, validate_povm
from .kernels import BACKEND

__version__ = "0.1.0"
