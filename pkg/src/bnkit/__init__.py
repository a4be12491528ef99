"""Discrete Bayesian networks for tabular listing data.

Learns network structure (BIC-guided Tabu search with bootstrap
consensus) and parameters (Dirichlet smoothing) from categorical
tables, answers exact probabilistic queries (posteriors, most probable
explanations, scenario simulation), and quantifies feature influence
(mutual information, variance-based indices, arc diameters, tornado
parameter sensitivity).
"""

from .core import (
    BayesianNetwork,
    Cpt,
    Dag,
    DiscreteVariable,
    joint_probability,
    parent_config_decode,
    parent_config_index,
    topological_order,
)
from .data import (
    BinEdges,
    ColumnSpec,
    Dataset,
    DiscretizationSpec,
    RawTable,
    RowFilter,
    deduplicate,
    encode_dataset,
    iqr_filter,
    neighborhood_frequency_rank,
    quantile_bins,
    read_csv,
)
from .errors import (
    ContractError,
    DiscretizationError,
    ImpossibleEvidenceError,
    RunSpecError,
    StructuralError,
)
from .infer import (
    Posterior,
    evidence_scan,
    mpe,
    posterior,
    run_scenarios,
    scenario,
    symmetrized_kl,
)
from .learn import (
    BootstrapResult,
    Constraints,
    LearnConfig,
    bic_family,
    bic_score,
    bootstrap_consensus,
    break_cycles,
    count_stats,
    fit_parameters,
    tabu_search,
)
from .sensitivity import (
    ParameterHandle,
    SensitivityReport,
    arc_diameter,
    mutual_information,
    node_sensitivity,
    one_way_sensitivity,
    sobol_index,
    tornado,
)
from .spatial import (
    CentroidSet,
    GeoPoint,
    Polyline,
    haversine,
    load_features,
    nearest_centroid,
    point_in_polygon,
    point_to_polyline_distance,
)

__version__ = "0.1.0"
