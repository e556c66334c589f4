"""Design helpers for chip-scale ion-trap optics.

Subpackages cover the delivery side (Gaussian beams through trap chips,
shared prism relay chains, beam geometry rules) and the collection side
(photodetector readout budgets, fiber microcavity coupling, remote
entanglement rates).
"""

__version__ = "0.1.0"
