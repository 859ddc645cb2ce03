"""Simulated quantum least-squares SVM for two-character OCR."""

from .pipeline import ClassificationResult, QsvmConfig, hhl_solve, qsvm_classify
from .svm import SvmModel, TrainingSet, classify, decision_value, kernel_matrix, solve_ls_svm, solve_no_offset

__all__ = [
    "ClassificationResult",
    "QsvmConfig",
    "SvmModel",
    "TrainingSet",
    "classify",
    "decision_value",
    "hhl_solve",
    "kernel_matrix",
    "qsvm_classify",
    "solve_ls_svm",
    "solve_no_offset",
]
