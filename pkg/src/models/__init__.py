# Models Package
from .problem import (
    NonzeroDistribution,
    SensingKind,
    SparseSignal,
    SensingMatrix,
    ReconstructionProblem,
)
from .noise import AlphaStableNoise, GaussianNoise, GMMNoise, NoiseModel, VarianceKind
from .solver import (
    KernelSchedule,
    RunTrace,
    SolverConfig,
    SolverState,
    SolverVariant,
    Termination,
)
from .experiment import (
    ExperimentConfig,
    ExperimentSpec,
    ImageSettings,
    ProblemSettings,
    SweepAxis,
    SweepParameter,
    SweepReport,
    SweepResult,
    TrialReport,
)
from .stability import (
    DivergenceProbeResult,
    ProbePoint,
    StabilityInputs,
    StabilityRegime,
    StepSizeAdvice,
    StepSizeReport,
)
from .image import BlockProblem, ImageReconstruction, ImageReport

__all__ = [
    "NonzeroDistribution",
    "SensingKind",
    "SparseSignal",
    "SensingMatrix",
    "ReconstructionProblem",
    "AlphaStableNoise",
    "GaussianNoise",
    "GMMNoise",
    "NoiseModel",
    "VarianceKind",
    "KernelSchedule",
    "RunTrace",
    "SolverConfig",
    "SolverState",
    "SolverVariant",
    "Termination",
    "ExperimentConfig",
    "ExperimentSpec",
    "ImageSettings",
    "ProblemSettings",
    "SweepAxis",
    "SweepParameter",
    "SweepReport",
    "SweepResult",
    "TrialReport",
    "DivergenceProbeResult",
    "ProbePoint",
    "StabilityInputs",
    "StabilityRegime",
    "StepSizeAdvice",
    "StepSizeReport",
    "BlockProblem",
    "ImageReconstruction",
    "ImageReport",
]
