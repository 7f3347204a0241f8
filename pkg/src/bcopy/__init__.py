"""bcopy: copy hard-label black-box binary classifiers by regressing
signed distances to their decision boundary."""

from .distances import (ClusterParams, RefiningParams, SignedDataset,
                        SignedSample, alpha_transform, analytic_signed_distance,
                        build_clustered_dataset, check_holder_bounds,
                        estimate_distances_refining)
from .kernels import BACKEND as KERNEL_BACKEND
from .metrics import (DistanceErrorReport, FidelityReport, accuracy,
                      distance_error_report, empirical_fidelity,
                      relative_difference)
from .oracle import (CountingOracle, HyperplaneOracle, NearestNeighborOracle,
                     Oracle, QueryBudget, SphereOracle, classify_batch,
                     connect_remote_oracle, fit_nearest_neighbor_teacher,
                     make_analytic_oracle, with_counting)
from .sampling import (PointCloud, Region, map_to_region, sobol_sequence,
                       uniform_box, unit_ball_cloud)
from .students import (GbrtSpec, MlpSpec, TrainConfig, epochs_for, load_model,
                       predict_labels, predict_values, save_model, train_gbrt,
                       train_mlp)

__version__ = "0.1.0"
