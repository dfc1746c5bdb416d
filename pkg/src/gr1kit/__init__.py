"""GR(1) toolkit: realizability, counter-strategies, assumption mining."""

from .errors import (
    DuplicateVarError,
    MissingNextValuation,
    NotEnvironmentWinning,
    ScopeError,
    SpecError,
    SpecSyntaxError,
    StateSpaceLimitExceeded,
)
from .specml import (
    Gr1Part,
    Gr1Spec,
    PartKind,
    Player,
    expand_responses,
    format_expr,
    format_part,
    format_spec,
    parse_assumption,
    parse_spec,
)
from .arena import Arena, build_arena
from .solver import (
    MealyStrategy,
    MooreCounterStrategy,
    RealizabilityResult,
    extract_counterstrategy,
    extract_strategy,
    solve_realizability,
    solve_spec,
    verify_counterstrategy,
    verify_system_strategy,
)
from .abstraction import EdgeLabel, Fts, LabeledFts, StatePredicate, abstract_fts, label_edges
from .patterns import (
    LabeledPattern,
    Pattern,
    PatternSet,
    generate_patterns,
    holds_on_all_runs,
    labeled_patterns,
)
from .candidates import Candidate, candidates_for, generate_candidates, simplify_cnf
from .refine import (
    RefinementSearchResult,
    SearchReport,
    check_consistency,
    refine_search,
)

__version__ = "0.1.0"
