"""Simulator and analysis toolkit for contextuality-protected QKD.

Modules:
    qcore     -- exact / floating-point linear algebra for ququart states
    ksset     -- the 18-vector KS set, colorability, minimum mismatch
    channels  -- depolarizing noise (sampling and density forms)
    adversary -- classical ball attack and intercept-resend
    protocol  -- round generation, sifting, certification, key extraction
    cli       -- verify / analyze / simulate / sweep commands
    kernel    -- compiled or pure-Python Monte Carlo round loop
"""

from .kernel import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
