"""Average-case verification of imperfect QFT channels and HHL fidelity certification."""

__version__ = "0.1.0"
