from .gap import (ContinuumParams, condensate, condensate_quadrature, gap_function,
                  solve_gap_equation, vacuum_energy)
from .lattice import (LatticeModel, LatticeParams, SelfConsistentResult, bonds,
                      build_hamiltonian, evolve_exact, finite_difference_t00,
                      format_model, ground_energy, ground_state, hopping_bond,
                      jordan_wigner_annihilator, jordan_wigner_creator,
                      local_energy_operator, parse_model, self_consistent_condensate,
                      site_bilinear, site_densities)

__all__ = [
    "ContinuumParams", "condensate", "condensate_quadrature", "gap_function",
    "solve_gap_equation", "vacuum_energy",
    "LatticeModel", "LatticeParams", "SelfConsistentResult", "bonds",
    "build_hamiltonian", "evolve_exact", "finite_difference_t00", "format_model",
    "ground_energy", "ground_state", "hopping_bond", "jordan_wigner_annihilator",
    "jordan_wigner_creator", "local_energy_operator", "parse_model",
    "self_consistent_condensate", "site_bilinear", "site_densities",
]
