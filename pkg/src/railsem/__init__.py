"""Rule-driven semantic annotation of railway point clouds with VRML export."""

from .kb import Assertion, KnowledgeBase, Literal, Name, Var, seed_schema

__version__ = "0.1.0"
