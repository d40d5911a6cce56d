"""Asynchronous announcement logic: syntax, semantics, bounded validity and proofs."""

from pathlib import Path as _Path

__version__ = "0.1.0"

from .axioms import AXIOM_IDS, identify_axiom, instantiate_axiom, match_axiom
from .errors import (AAError, EmptyUpdate, IncompleteBindings, ModelError, NotAHistory,
                     ParseError, ProofFormatError, SideConditionViolated, TooManyLetters,
                     UnknownAgent, UnknownAtom, UnknownState)
from .models import (EpistemicModel, dump_model, load_model, load_model_file, make_model,
                     random_model, update_model, validate_model)
from .parsing import parse_formula, parse_word
from .proof import Proof, ProofReport, check_proof, check_tautology, load_proof, parse_proof
from .semantics import (EvalContext, evaluate, evaluate_minus, executable,
                        executable_minus, fold_word)
from .syntax import (BOT, TOP, Atom, Formula, HatK, Not, Or, Recv, Send, Top, deg,
                     empty_formula, normalize, pretty_formula, print_formula, size)
from .validity import (ModelFamily, ValidityQuery, ValidityReport, check_epsilon,
                       check_star)
from .words import format_word, is_history, ll_less, views

FIXTURES = _Path(__file__).parent / "fixtures"
