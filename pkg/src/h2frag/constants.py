"""Physical constants and unit conversions.

Everything inside the package runs in Hartree atomic units
(hbar = m_e = e = 1); conversions live at the I/O boundaries only.
"""

HARTREE_EV = 27.211386245988
EV_HARTREE = 1.0 / HARTREE_EV

# 1 a.u. of time in femtoseconds
AU_TIME_FS = 0.02418884326586

# laser wavelength (nm) <-> carrier frequency (hartree): omega = WL_NM_AU / lambda
WL_NM_AU = 45.563352529

# atomic unit of intensity: I[W/cm^2] = 3.50945e16 * E0[a.u.]^2
INTENSITY_AU = 3.50945e16

PROTON_MASS = 1836.15267
H2_REDUCED_MASS = PROTON_MASS / 2.0


def omega_from_wavelength_nm(wavelength_nm: float) -> float:
    return WL_NM_AU / wavelength_nm


def field_from_intensity(intensity_w_cm2: float) -> float:
    return (intensity_w_cm2 / INTENSITY_AU) ** 0.5
