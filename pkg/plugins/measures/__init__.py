"""Built-in measure families -- implementations of the MeasureSampler protocol."""

from plugins.measures.perturbed import PerturbedSampler
from plugins.measures.subset import SubsetSampler

__all__ = ["PerturbedSampler", "SubsetSampler"]
