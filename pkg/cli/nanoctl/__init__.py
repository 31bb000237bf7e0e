"""
nanoctl - In-silico Nanoparticle Treatment Design

Grows a virtual tumour, extracts 1-D tissue scenarios, simulates stochastic
nanoparticle transport and cell kill, and evolves nanoparticle/treatment
parameters to maximise cancer-cell kill at minimal injected dose.
"""

__version__ = "1.0.0"
__description__ = "In-silico nanoparticle treatment design pipeline"
__author__ = "nanoctl developers"
