"""photonlink: link budgets, capacity checks and design tradeoffs for WDM
photonic signal distribution in phased-array radar systems."""

__version__ = "0.1.0"

from .components import (
    ComponentSpec,
    DetectorKind,
    EdfaSpec,
    FiberSpec,
    GratingTech,
    LaserSpec,
    Modulation,
    ModulatorBias,
    ModulatorSpec,
    MuxDemuxSpec,
    PhotodetectorSpec,
    SplitterSpec,
    ValidationReport,
    Violation,
    load_component_library,
    save_component_library,
    validate_component,
)
from .digitalpath import (
    AdcStreamSpec,
    DigitalLinkSpec,
    GroupCapacity,
    LineEncoding,
    check_group_capacity,
    payload_throughput_bytes_per_s,
    required_line_rate_bps,
)
from .errors import (
    AnalysisError,
    BuildError,
    LibraryError,
    PhotonlinkError,
    ScenarioError,
    TopologyError,
)
from .linkbudget import (
    AnalysisConfig,
    AutogainResult,
    LedgerEntry,
    LinkMetrics,
    NoiseBreakdown,
    OpticalLedger,
    analyze_path,
    apply_edfa_gains,
    autogained,
    cascade_noise_figure,
    crosstalk_db,
    edfa_autogain,
    noise_figure_db,
    optical_ledger,
    phase_noise_degradation_db,
    propagation_delay_s,
    pulse_skew_s,
    rf_gain_db,
    rise_fall_time_s,
    sfdr_db,
    snr_out_db,
    timing_jitter_s,
    worst_case,
)
from .scenario import Scenario, parse_scenario
from .topology import (
    ChannelPlan,
    Direction,
    ElementKind,
    FiberEdge,
    ForwardBindings,
    Node,
    NodeKind,
    OpticalTopology,
    PathElement,
    ReturnBindings,
    SignalPath,
    build_forward_network,
    build_return_network,
    co_propagating,
    enumerate_paths,
    return_groups,
    validate_topology,
)
from .tradeoff import (
    ComplianceReport,
    DesignVariant,
    Integration,
    OrdinalScore,
    Recommendation,
    RequirementCheck,
    RequirementSet,
    VariantOutcome,
    check_requirements,
    enumerate_variants,
    is_feasible,
    recommend,
    score_variant,
)
