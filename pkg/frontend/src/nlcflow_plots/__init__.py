from .renderer import PlotSpec, decay_annotations, fit_slope, render

__version__ = "0.1.0"
