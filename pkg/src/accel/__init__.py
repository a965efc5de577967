"""Aitken-Steffensen acceleration of (R)ALS sweeps."""

from src.accel.aitken import AccelStep, accel_step, scalar_aitken

__all__ = ["AccelStep", "accel_step", "scalar_aitken"]
