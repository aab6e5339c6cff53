"""driftlens: drift-reducing subspace projections for electronic-nose data."""

from .classify import Prediction, accuracy, predict_1nn, predict_centroid
from .dataio import (
    UCSD_REGISTRY,
    BatchRegistry,
    NormStats,
    load_ucsd,
    parse_svmlight,
    synth_two_domain,
    validate_batches,
    write_svmlight,
    zscore_apply,
    zscore_fit,
    zscore_inverse,
)
from .densela import EigPairs, cholesky, gen_eig_sym_def, jacobi_eig_sym, tri_solve
from .harness import (
    GridSurface,
    TaskResult,
    emit_heatmap,
    emit_projection_2d,
    grid_search,
    reproduce_ucsd,
    run_task,
)
from .scatter import (
    LabeledDataset,
    ScatterSet,
    between_class_scatter,
    concat_datasets,
    mdd_matrix,
    mean_vector,
    scaled_second_moment,
    scatter_set,
    within_class_scatter,
)
from .subspace import (
    HyperParams,
    SubspaceModel,
    fit_ddrca,
    fit_drca,
    fit_lda,
    fit_pca,
    transform,
)

__version__ = "0.1.0"
