"""Structural de-anonymization of social graphs: seed finding, mapping
propagation, synthetic perturbation with ground truth, and evaluation."""

from .graph import (DirectedGraph, UndirectedGraph, common_neighbors, induced_subgraph,
                    load_edge_list, to_symmetric_undirected, write_edge_list)
from .propagation import Mapping, PropagationConfig, eccentricity, match_scores, propagate, propagation_step
from .sanitizer import (ExperimentInstance, OverlapParams, beta_from_alpha_e, edge_overlap,
                        make_instance, procedure_b, sample_node_overlap)

__version__ = "0.1.0"
