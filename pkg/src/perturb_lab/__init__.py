"""Minor-monotone parameters of randomly perturbed graphs H + G(n, p)."""

__version__ = "0.1.0"

from .graph import ClusterFamily, Graph
from .rng import sample_gnp, sample_two_round, trial_seed, two_round_split
from .fragment import fragment
from .pipeline import PipelineParams, build_partition, meta_minor
from .bounds import (
    ParamBounds,
    genus_lower_bound,
    hadwiger_exact_small,
    hadwiger_lower_bound,
    param_bounds,
    treedepth_exact,
    treewidth_exact,
)
from .theorem import BoundFormulaInput, theorem_bound
from .pathcover import indep_pipeline, k_path_cover, tree_path_partition
