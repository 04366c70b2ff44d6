"""Two-class classifier built on an unreliable binary-state complete network.

Attributes become nodes whose reliabilities are the normalized attribute
values; arc reliabilities are trained with simplified swarm optimization and
an instance is classified by comparing the estimated source-sink reliability
with the class-1 ratio theta.
"""

from .dataset import (ClassMap, DatasetError, RawDataset, TransformSpec, TransformedDataset, apply_transform,
                      fit_transform, load_dataset, map_classes)
from .reliability import (BoundsTable, ImcsOutcome, SimParams, build_bounds, imcs_classify, mcs_classify,
                          mcs_estimate)
from .sso import SsoParams, Swarm, init_swarm, update_solution
from .trainer import Model, TrainConfig, fitness, load_model, predict, predict_many, run_many, save_model, train
from .ubcn import (ComponentState, ReliabilityAssignment, Topology, build_topology, exact_reliability,
                   is_connected, sample_state)

__version__ = "0.1.0"
