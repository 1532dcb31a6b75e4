"""Figure regeneration for h2frag simulation outputs.

Reads only the documented CSV/JSON contract of the simulator (no
physics is recomputed) and renders deterministic publication-style
panels: population dynamics, KER spectra with annotated peaks,
intensity scans, and dressed potential curves.
"""

__version__ = "0.1.0"

from .render import FigureSpec, render

__all__ = ["FigureSpec", "render", "__version__"]
