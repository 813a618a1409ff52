"""Unit conversions applied at IO boundaries.

Inside the services lengths are in mm, times in µs, frequencies in MHz and
sound speeds in mm/µs. Files and configuration use SI units.
"""

HZ_PER_MHZ = 1.0e6
S_PER_US = 1.0e-6
M_PER_S_PER_MM_PER_US = 1.0e3
MM_PER_M = 1.0e3


def hz_to_mhz(value: float) -> float:
    return value / HZ_PER_MHZ


def mhz_to_hz(value: float) -> float:
    return value * HZ_PER_MHZ


def s_to_us(value: float) -> float:
    return value / S_PER_US


def us_to_s(value: float) -> float:
    return value * S_PER_US


def m_per_s_to_mm_per_us(value: float) -> float:
    return value / M_PER_S_PER_MM_PER_US


def mm_per_us_to_m_per_s(value: float) -> float:
    return value * M_PER_S_PER_MM_PER_US


def m_to_mm(value: float) -> float:
    return value * MM_PER_M
