"""Figure rendering for clpcm run artifacts."""

from .render import KINDS, FigureSpec, render

__version__ = "0.1.0"
__all__ = ["FigureSpec", "KINDS", "render", "__version__"]
