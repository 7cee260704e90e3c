"""Exact tools for bi-Lipschitz bijections of Z and Z^2."""

from .zline import (
    Collision,
    DegenerateWindow,
    EventuallyAffineMap,
    Gap,
    InvalidMap,
    LipschitzProfile,
    WindowSample,
    compose,
    evaluate,
    from_permutation,
    identity,
    invert,
    lipschitz_profile,
    reflection,
    shift,
    transposition,
    validate_bijection,
    window_lipschitz,
)
from .rigidity import (
    FolnerReport,
    HypothesisNotMet,
    RayCase,
    RayProfile,
    RigidityDecomposition,
    decompose,
    decompose_window,
    displacement_check,
    folner_curve,
    folner_ratio,
    ray_dichotomy_consistency,
    ray_profile,
)

__version__ = "0.1.0"
