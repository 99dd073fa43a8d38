"""Probabilistic threshold contagion on clustered and rewired regular networks."""

from .contagion import (UNBOUNDED, LogisticRule, Seeding, SimConfig, StepRule, TrialRecord,
                        adoption_probability, initial_adopters, run_trial, select_seeds)
from .netgen import (Kind, Network, NetworkError, RewireExhausted, Topology, build_hex_lattice,
                     build_lattice, build_moore_lattice, build_ring_lattice, rewire,
                     rewire_fraction)
from .stats import (RegionLabel, bootstrap_min_ratio, classify_region_margin, ks_two_sample,
                    time_to_saturation)
from .sweep import SweepResult, SweepSpec, run_sweep
from .theory import (clustered_boundary_p2, cumulative_adoption_F,
                     expected_initial_adopters_clustered, expected_initial_adopters_random,
                     p1_star)

__version__ = "0.1.0"
