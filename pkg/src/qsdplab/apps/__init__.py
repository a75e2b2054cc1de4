from .design import DesignTask, build_e_optimal, solve_e_optimal
from .discrimination import (
    DiscriminationTask,
    build_state_discrimination,
    solve_state_discrimination,
)
from .lowerbound import build_lower_bound_lp
from .povm import measurement_unitary, povm_to_block_encoding
from .shadow import ShadowTask, shadow_tomography

__all__ = [
    "DesignTask",
    "DiscriminationTask",
    "ShadowTask",
    "build_e_optimal",
    "build_lower_bound_lp",
    "build_state_discrimination",
    "measurement_unitary",
    "povm_to_block_encoding",
    "shadow_tomography",
    "solve_e_optimal",
    "solve_state_discrimination",
]
