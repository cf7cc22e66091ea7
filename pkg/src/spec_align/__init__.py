"""Chart-specification reward toolkit.

Parse and validate canonical chart specs, score candidate charts against
references with a staircase of format, execution, semantic, and code-level
rewards, normalize rollout groups into advantages, and curate structure-
balanced corpora.
"""

from .chartspec import (
    Auxiliary,
    ChartSpec,
    CodeSpec,
    CoordKind,
    DataKind,
    DataRepr,
    Domain,
    DomainKind,
    InvariantError,
    PanelSpec,
    Relational,
    SchemaError,
    SemanticSpec,
    Topology,
    VectorField,
    Violation,
    canonical_dumps,
    parse_spec,
    serialize_spec,
    to_dict,
    validate,
)
from .curation import (
    CompositionKind,
    CorpusEntry,
    CorpusManifest,
    EmptyPool,
    StructuralSignature,
    TierConfig,
    curate,
    signature_of,
    tier_of,
)
from .execution import ExecStatus, ExecutionReport, parse_report, report_to_dict
from .families import CanonicalFamily, UnknownLabel, canonical_family
from .grpo import RewardGroup, group_advantages
from .kernels import (
    EmptyReference,
    auxiliary_scores,
    level_set_similarity,
    levenshtein,
    norm_edit_similarity,
    numeric_alignment,
    range_iou,
    relational_f1,
    set_jaccard,
    stat_l2_score,
    vector_cosine_score,
)
from .reward import (
    CodeBreakdown,
    FamilyToggles,
    InvalidSpec,
    RewardBreakdown,
    RewardConfig,
    ScoreResult,
    SemanticBreakdown,
    code_reward,
    evaluate_candidate,
    execution_reward,
    extract_code_block,
    format_reward,
    max_total_reward,
    semantic_reward,
    topology_gate,
    total_reward,
)
from .sandboxclient import SandboxClient, SandboxUnreachable

__version__ = "0.1.0"
