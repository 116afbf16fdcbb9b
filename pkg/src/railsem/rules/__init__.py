from .builtins import Behavior, Builtin, BuiltinRegistry
from .engine import (
    EvaluationError,
    FixpointNotReached,
    RunStats,
    evaluate_body,
    run_to_fixpoint,
)
from .syntax import (
    BuiltinAtom,
    ClassAtom,
    PropertyAtom,
    Rule,
    RuleSyntaxError,
    format_rule,
    format_rules,
    parse_rules,
)
