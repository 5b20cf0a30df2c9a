"""btcgp - Gaussian-process regression on 1-D inputs with banded training covariances"""

__version__ = "0.1.0"
