"""Statistical mechanics of multipartite entanglement on n qubits.

Pure states live on the unit sphere in 2**n complex dimensions.  The package
measures how entanglement distributes over bipartitions (purities and their
balanced average, the entanglement potential), samples the canonical ensemble
exp(-beta * potential) by Metropolis Monte Carlo, reweights between
temperatures, estimates cumulants, searches for maximally multipartite
entangled states by annealing, and checks everything against closed-form
typical-state moments.
"""

from .bipartitions import (Bipartition, balanced_bipartitions, balanced_masks,
                           join_index, reshape, split_index)
from .canonical import (CanonicalConfig, CumulantEstimate, EnergySamples,
                        MeanEnergyPoint, ReweightResult, cumulants,
                        effective_samples, haar_energy_samples, mean_and_se,
                        mean_energy_scan, metropolis_chain, reweight)
from .entanglement import (PurityProfile, potential, potential_gradient,
                           purity, purity_profile)
from .errors import (DegenerateWeightsError, DomainError, FormatError,
                     MmesError, NumericalError, ResourceError, ValidationError)
from .search import (AnnealSchedule, CertifyReport, MmesResult, anneal,
                     certify)
from .state import (PureState, apply_local_unitary, basis_state, deserialize,
                    ghz, haar_sample, load_state, max_qubits, perturb,
                    save_state, serialize, stream_rng, w_state)
from .theory import (CompareReport, GaussianModel, Histogram, asymptotic_kappa2,
                     balanced_typical_mean, balanced_typical_variance, compare,
                     gaussian_prediction, ks_critical, typical_mean,
                     typical_variance)

__version__ = "0.1.0"

__all__ = [
    "AnnealSchedule", "Bipartition", "CanonicalConfig", "CertifyReport",
    "CompareReport", "CumulantEstimate", "DegenerateWeightsError",
    "DomainError", "EnergySamples", "FormatError", "GaussianModel",
    "Histogram", "MeanEnergyPoint", "MmesError", "MmesResult",
    "NumericalError", "PureState", "PurityProfile", "ResourceError",
    "ReweightResult", "ValidationError", "anneal", "apply_local_unitary",
    "asymptotic_kappa2", "balanced_bipartitions", "balanced_masks",
    "balanced_typical_mean", "balanced_typical_variance", "basis_state",
    "certify", "compare", "cumulants", "deserialize", "effective_samples",
    "gaussian_prediction", "ghz", "haar_energy_samples", "haar_sample",
    "join_index", "ks_critical", "load_state", "max_qubits", "mean_and_se",
    "mean_energy_scan", "metropolis_chain", "perturb", "potential",
    "potential_gradient", "purity", "purity_profile", "reshape", "reweight",
    "save_state", "serialize", "split_index", "stream_rng", "typical_mean",
    "typical_variance", "w_state",
]
