"""Verification engine for paraquaternionic contact (pqc) geometry."""

from pqc.paraquat import ParaQuaternion, ZeroNorm

__all__ = ["ParaQuaternion", "ZeroNorm"]
__version__ = "0.1.0"
