"""Hide sensitive decision-tree rules by ratio-preserving dataset augmentation."""

from .dataset import (
    AttributeSchema,
    Dataset,
    DatasetError,
    Instance,
    Label,
    Provenance,
    add_partial_instances,
    class_counts,
    load_csv,
    swap_class,
    write_csv,
)
from .diophantine import (
    DiophantineEq,
    GeneralSolution,
    NodeConstraint,
    Ratio,
    RelaxMode,
    SystemSolution,
    UnsolvableError,
    extended_gcd,
    minimal_natural,
    ratio_equation,
    relax_ratio,
    solve_general,
    solve_system,
)
from .evaluation import (
    EvaluationReport,
    build_report,
    ratio_report,
    semantic_agreement,
    syntactic_similarity,
    verify_hidden,
)
from .hiding import (
    AffectedSkeleton,
    CompletionStrategy,
    HidingError,
    HidingPlan,
    HidingRequest,
    SanitizationResult,
    allocate_and_set,
    build_skeleton,
    hide,
    serial_hide,
    swap_and_add,
)
from .tree import (
    DecisionTree,
    NodeStats,
    RulePath,
    RuleNotFoundError,
    TreeError,
    TreeNode,
    entropy,
    induce,
    information_gain,
)

__version__ = "0.1.0"
