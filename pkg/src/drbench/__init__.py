"""Dimension-reduction benchmark: ANOVA/PCA reducers, seven classifiers, CV grid search."""

__version__ = "0.1.0"
