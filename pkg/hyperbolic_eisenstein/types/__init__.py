"""
Type definitions for groups, series values, kernels and reports.
"""

from hyperbolic_eisenstein.types.models import (
    SCHEMA_VERSION,
    CheckResult,
    CheckStatus,
    ComplexNumber,
    ComplexParam,
    CountingReport,
    CuspExpansionReport,
    Cycle,
    CycleKind,
    DegenerateConfig,
    DegenerationSweep,
    DegenerationTable,
    DiscretenessCertificate,
    FermiCoords,
    FormValue,
    FuchsianGroup,
    GeneratorInfo,
    GridEvaluation,
    GridField,
    GridRecord,
    GridSpec,
    GroupConfig,
    GroupElement,
    GroupReport,
    JobConfig,
    KernelCandidate,
    KernelConventionReport,
    KernelValue,
    L2Report,
    LimitIdentityReport,
    MaassDirection,
    Matrix2,
    OutputConfig,
    PingPongDomain,
    PointH,
    PresetName,
    PresetSpec,
    ResidualReport,
    SeriesConfig,
    SeriesEvaluation,
    SeriesFamily,
    SLike,
    TraceType,
    TruncationPolicy,
    VerifyConfig,
    VerifyReport,
    as_complex,
)

__all__ = [
    "SCHEMA_VERSION",
    "CheckResult",
    "CheckStatus",
    "ComplexNumber",
    "ComplexParam",
    "CountingReport",
    "CuspExpansionReport",
    "Cycle",
    "CycleKind",
    "DegenerateConfig",
    "DegenerationSweep",
    "DegenerationTable",
    "DiscretenessCertificate",
    "FermiCoords",
    "FormValue",
    "FuchsianGroup",
    "GeneratorInfo",
    "GridEvaluation",
    "GridField",
    "GridRecord",
    "GridSpec",
    "GroupConfig",
    "GroupElement",
    "GroupReport",
    "JobConfig",
    "KernelCandidate",
    "KernelConventionReport",
    "KernelValue",
    "L2Report",
    "LimitIdentityReport",
    "MaassDirection",
    "Matrix2",
    "OutputConfig",
    "PingPongDomain",
    "PointH",
    "PresetName",
    "PresetSpec",
    "ResidualReport",
    "SeriesConfig",
    "SeriesEvaluation",
    "SeriesFamily",
    "SLike",
    "TraceType",
    "TruncationPolicy",
    "VerifyConfig",
    "VerifyReport",
    "as_complex",
]
