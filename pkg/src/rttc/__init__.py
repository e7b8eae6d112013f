"""Riemannian tensor-train completion with subspace side information."""

from .harness import (
    InstanceSpec,
    SweepConfig,
    SweepRecord,
    generate_instance,
    load_sweep_config,
    run_single,
    run_sweep,
    summarize,
)
from .manifold import (
    ManifoldPoint,
    TangentVector,
    make_point,
    project_tangent,
    project_tt,
    retract,
    sample_tangent,
    tangent_inner,
    tangent_norm,
    tangent_to_tt,
    transport,
    zero_tangent,
)
from .rng import DeterministicRng, derive_seed
from .samples import SparseSamples, sample_indices
from .serialization import (
    load_samples,
    load_side_info,
    load_tt,
    save_samples,
    save_side_info,
    save_tt,
)
from .sideinfo import (
    SideInfo,
    apply_Q,
    apply_QT,
    conformance_residual,
    orthonormal_basis,
    project_side,
    project_tangent_si,
)
from .solver import (
    CompletionProblem,
    NumericalAbort,
    SolveReport,
    SolverConfig,
    objective,
    solve,
)
from .tt import (
    DenseTensor,
    TTTensor,
    dense,
    entries,
    entry,
    inner,
    norm,
    orthogonalize,
    scale,
    tt_add,
    tt_random,
    tt_round,
    tt_svd,
)

__all__ = [
    "CompletionProblem",
    "DenseTensor",
    "DeterministicRng",
    "InstanceSpec",
    "ManifoldPoint",
    "NumericalAbort",
    "SideInfo",
    "SolveReport",
    "SolverConfig",
    "SparseSamples",
    "SweepConfig",
    "SweepRecord",
    "TTTensor",
    "TangentVector",
    "apply_Q",
    "apply_QT",
    "conformance_residual",
    "dense",
    "derive_seed",
    "entries",
    "entry",
    "generate_instance",
    "inner",
    "load_samples",
    "load_side_info",
    "load_sweep_config",
    "load_tt",
    "make_point",
    "norm",
    "objective",
    "orthogonalize",
    "orthonormal_basis",
    "project_side",
    "project_tangent",
    "project_tangent_si",
    "project_tt",
    "retract",
    "run_single",
    "run_sweep",
    "sample_indices",
    "sample_tangent",
    "save_samples",
    "save_side_info",
    "save_tt",
    "scale",
    "solve",
    "summarize",
    "tangent_inner",
    "tangent_norm",
    "tangent_to_tt",
    "transport",
    "tt_add",
    "tt_random",
    "tt_round",
    "tt_svd",
    "zero_tangent",
]
