"""Knowledge-graph question answering for power equipment data.

The pipeline: tag a question against the lexicon and graph names, build
(or ingest) a dependency tree, extract the target and constraint set,
search the ontology for shortest constraint-to-target routes, compile
them into a traversal plan, and execute it over the in-memory store.
"""

from .engine import Answered, Engine
from .errors import GridQAError
from .nlq import Constraint, ParsedQuestion, Target, parse_fragment, parse_question
from .query import AnswerGraph, TraversalPlan, compile_plan, execute
from .reasoner import ReasoningPlan, plan
from .schema import OntologySchema, load_schema
from .session import Session, SessionRegistry
from .store import GraphStore, load_graph

__version__ = "0.1.0"

__all__ = [
    "Answered",
    "AnswerGraph",
    "Constraint",
    "Engine",
    "GraphStore",
    "GridQAError",
    "OntologySchema",
    "ParsedQuestion",
    "ReasoningPlan",
    "Session",
    "SessionRegistry",
    "Target",
    "TraversalPlan",
    "compile_plan",
    "execute",
    "load_graph",
    "load_schema",
    "parse_fragment",
    "parse_question",
    "plan",
    "__version__",
]
