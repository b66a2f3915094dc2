"""Knowledge-graph question answering for structured customer-service KBs.

The knowledge model extends plain triples with property hierarchies,
key-value documents, and compound value type (CVT) tables; the QA pipeline
maps a question to candidate query graphs, binds CVT constraints, ranks the
candidates, and executes the winner with type-generalization reasoning.
"""

from .config import DEFAULT_CONFIG, EngineConfig
from .errors import (
    AmbiguousAncestor,
    DanglingGraph,
    EmptyInput,
    EmptyTrainingSet,
    InternalError,
    KgqaError,
    NoCandidates,
    NoGraphs,
    NoReifyingAncestor,
    NotALeaf,
    ParseError,
    SpanMismatch,
    UnknownLocale,
    UnknownProperty,
    ValidationError,
    Violation,
)
from .execution import (
    Answer,
    ExplanationStep,
    KeyValueTabs,
    NoAnswerBody,
    SimpleText,
    StepKind,
    TableAnswer,
    execute,
    render_explanation,
)
from .graphs import (
    BasicShape,
    Constraint,
    CvtShape,
    Provenance,
    QueryGraph,
    bind_constraints,
    edit_distance,
    generate,
    string_similarity,
    validate_graph,
)
from .model import (
    Builtin,
    ClassDef,
    ColumnRole,
    CvtColumn,
    CvtRow,
    CvtSchema,
    CvtTable,
    Entity,
    KeyValueDoc,
    PropertyChain,
    PropertyDef,
    ReifiedValue,
    SimpleValue,
    ValueDomain,
    ValueKind,
    ValueTypeSpec,
    chain_key,
    leaves_under,
    property_chain_of,
)
from .ranking import (
    FEATURE_NAMES,
    FeatureVector,
    RankWeights,
    RankedGraph,
    extract_features,
    pairwise_accuracy,
    pairwise_gradient,
    pairwise_loss,
    rank,
    score,
    train_pairwise,
)
from .reasoning import generalize, generalize_to_cells
from .service import (
    AskRequest,
    AskResponse,
    DialogService,
    Recommendation,
    SessionContext,
    SessionStore,
    Status,
    answer,
    recommend,
)
from .store import (
    KbStats,
    KnowledgeBase,
    SessionRecord,
    SnapshotHolder,
    build_mention_index,
    collect_violations,
    compute_stats,
    load_kb,
    regulation_compression,
    resolution_rate,
    round_half_up,
    save_kb,
)
from .trie import MentionKind, MentionTrie, fold
from .understanding import (
    Classifier,
    MaskedQuestion,
    Mention,
    PropertyScore,
    candidate_chains,
    classify,
    get_classifier,
    lexical_classifier,
    mask,
    ngram_profile,
    recognize,
    register_classifier,
    unmask,
)

__version__ = "0.1.0"
