"""Structure-preserving spectral sparsification of well-clustered graphs.

Library surface: graph construction and partition statistics, symmetric
eigendecomposition and clusterability ratios, exact effective resistances
with sampling distributions, uniform and resistance edge samplers with
approximation certificates, spectral clustering metrics, seeded benchmark
generators, and an experiment harness with CSV output.
"""

from .graph import (
    Graph,
    GraphFormatError,
    LaplacianVariant,
    Partition,
    conductance,
    connected_components,
    incidence_quadratic,
    indicator_matrix,
    intercluster_edges,
    laplacian,
    load_edge_list,
    load_partition,
    rho_of_partition,
    save_edge_list,
    save_partition,
    volume,
)
from .spectral import (
    Spectrum,
    StructureStats,
    alignment_frobenius,
    eig_sym,
    rayleigh,
    structure_residuals_part1,
    structure_stats,
)
from .resistance import (
    DisconnectedGraphError,
    EdgeBoundReport,
    RelativeProbReport,
    ResistanceProfile,
    effective_resistance,
    pinv_psd,
    rank_nk_resistance,
    resistance_profile,
    verify_effres_bounds,
    verify_relative_probabilities,
)
from .sparsify import (
    CertificateReport,
    RankMode,
    SampleMethod,
    SparsifyConfig,
    SparsifyResult,
    quadratic_form_certificate,
    sample_count_reff,
    sample_count_uniform,
    sparsify_reff,
    sparsify_uniform,
)
from .metrics import (
    AngleReport,
    adjusted_rand_index,
    bound_reff,
    bound_uniform,
    kmeans,
    principal_angles,
    spectral_embedding,
)
from .generators import (
    HIER_PRESETS,
    SBM_PRESETS,
    HierSbmConfig,
    LfrConfig,
    SbmConfig,
    generate_hier_sbm,
    generate_lfr,
    generate_sbm,
    random_connected_graph,
    random_partition,
)
from .harness import (
    ExperimentConfig,
    InstanceSpec,
    TrialRecord,
    load_experiment_config,
    run_experiment,
    run_experiment_to_files,
)

__version__ = "0.1.0"
