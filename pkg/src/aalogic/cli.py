"""Command-line front end.

Exit codes: 0 when the property holds (or the proof is accepted), 1 when it
is refuted (or the proof rejected), 2 for usage and input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .axioms import AXIOM_IDS, METAVARS, identify_axiom, instantiate_axiom
from .errors import AAError, ParseError, ProofFormatError
from .models import dump_model, load_model_file, model_to_dict, random_model
from .parsing import RESERVED, parse_formula, parse_word, tokenize
from .proof import (ACCEPTED, ACCEPTED_BOUNDED, ACCEPTED_HYPOTHESES, check_proof,
                    load_proof)
from .semantics import EvalContext
from .syntax import pretty_formula, print_formula
from .validity import (COUNTEREXAMPLE, ModelFamily, ValidityQuery, check_epsilon,
                       check_star)
from .words import format_word, is_history, views

FORMAT_VERSION = 1

OK, REFUTED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _names(text: str | None) -> tuple:
    if not text:
        return ()
    return tuple(x.strip() for x in text.split(",") if x.strip())


def infer_atoms(texts, agents) -> tuple:
    """Identifiers in ``texts`` that are neither agents nor keywords."""
    found = set()
    for t in texts:
        if t:
            found |= {v for kind, v, _ in tokenize(t)
                      if kind == "name" and v not in RESERVED and v not in agents}
    return tuple(sorted(found))


def _emit(args, data: dict, human: str) -> None:
    if args.format == "json":
        print(json.dumps({"format_version": FORMAT_VERSION, **data}, sort_keys=True))
    else:
        print(human)


# -- model sources ------------------------------------------------------------------

def _model(args, texts=()):
    if args.model and args.random_model:
        raise UsageError("give either --model or --random-model, not both")
    if args.model:
        return load_model_file(args.model)
    if args.random_model:
        try:
            n, seed = (int(x) for x in args.random_model.split(":"))
        except ValueError:
            raise UsageError("--random-model takes N:SEED") from None
        agents = _names(args.agents)
        if not agents:
            raise UsageError("--random-model needs --agents")
        atoms = _names(args.atoms) if args.atoms is not None else infer_atoms(texts, agents)
        return random_model(n, agents, atoms, seed)
    raise UsageError("a model is required: --model PATH or --random-model N:SEED")


def _vocab_of(args, texts):
    agents = _names(args.agents)
    if not agents:
        raise UsageError("--agents is required")
    atoms = _names(args.atoms) if args.atoms is not None else infer_atoms(texts, agents)
    return agents, atoms


# -- subcommands --------------------------------------------------------------------

def cmd_eval(args) -> int:
    m = _model(args, [args.formula, args.word])
    f = parse_formula(args.formula, m.agents, m.atoms)
    w = parse_word(args.word, m.agents, m.atoms)
    m.check_state(args.state)
    ctx = EvalContext(m)
    hist = is_history(w)
    ex = hist and ctx.executable(args.state, w)
    val = ex and ctx.evaluate(args.state, w, f)
    if not hist:
        status = "not executable (not a history)"
    else:
        status = "executable" if ex else "not executable"
    _emit(args, {"command": "eval", "state": args.state, "word": format_word(w),
                 "formula": print_formula(f), "history": hist, "executable": ex, "holds": val},
          f"{args.state}, {format_word(w)}: {status}\n"
          f"{args.state}, {format_word(w)} |= {pretty_formula(f, m.agents)}: {str(val).lower()}")
    return OK if val else REFUTED


def cmd_exec(args) -> int:
    m = _model(args, [args.word])
    w = parse_word(args.word, m.agents, m.atoms)
    ctx = EvalContext(m)
    if args.state is not None:
        m.check_state(args.state)
        states = [args.state]
    else:
        states = list(m.states)
    hist = is_history(w)
    table = {s: hist and ctx.executable(s, w) for s in states}
    human = "\n".join(f"{s}: {'executable' if v else 'not executable'}" for s, v in table.items())
    if not hist:
        human = f"{format_word(w)} is not a history\n" + human
    _emit(args, {"command": "exec", "word": format_word(w), "history": hist, "executable": table}, human)
    if args.state is not None:
        return OK if table[args.state] else REFUTED
    return OK


def cmd_views(args) -> int:
    agents, atoms = _vocab_of(args, [args.word])
    if args.agent not in agents:
        raise UsageError(f"agent {args.agent!r} is not in --agents")
    w = parse_word(args.word, agents, atoms)
    vs = views(w, args.agent, agents)
    texts = [format_word(v) for v in vs]
    _emit(args, {"command": "views", "word": format_word(w), "agent": args.agent, "views": texts},
          "\n".join(texts))
    return OK


def cmd_history(args) -> int:
    agents, atoms = _vocab_of(args, [args.word])
    w = parse_word(args.word, agents, atoms)
    h = is_history(w)
    _emit(args, {"command": "history", "word": format_word(w), "history": h},
          f"{format_word(w)}: {'history' if h else 'not a history'}")
    return OK if h else REFUTED


def cmd_validity(args) -> int:
    texts = [args.formula, args.vocab]
    if args.model:
        models = [load_model_file(args.model)]
        agents, atoms = models[0].agents, models[0].atoms
    else:
        agents, atoms = _vocab_of(args, texts)
        models = ModelFamily(args.models, args.max_states, args.seed, agents, atoms)
    f = parse_formula(args.formula, agents, atoms)
    vocab = None
    if args.vocab is not None:
        vocab = tuple(parse_formula(v, agents, atoms) for v in _names(args.vocab))
    q = ValidityQuery(f, models, vocab, args.bound, args.mode)
    report = check_epsilon(q) if args.mode == "epsilon" else check_star(q)
    data = {"command": "validity", **report.to_dict(args.model)}
    if report.verdict == COUNTEREXAMPLE:
        w = report.witness
        human = (f"Counterexample ({args.mode}): model {w.model_index} ({w.model.name or args.model}), "
                 f"state {w.state}, word {format_word(w.word)}")
        replay = report.replay_command(args.model)
        if replay:
            human += f"\nreplay: {replay}"
    else:
        human = (f"ValidUpToBound ({args.mode}): {report.checked_models} models, "
                 f"{report.checked_histories} (state, word) pairs, bound {report.bound_used}")
    _emit(args, data, human)
    return OK if report.valid else REFUTED


def _binding(name: str, value: str, agents, atoms):
    if name in ("phi", "psi"):
        return parse_formula(value, agents, atoms)
    if name == "alpha":
        return parse_word(value, agents, atoms)
    return value


def cmd_axiom(args) -> int:
    if args.identify is not None:
        agents, atoms = _vocab_of(args, [args.identify])
        f = parse_formula(args.identify, agents, atoms)
        hit = identify_axiom(f, agents)
        if hit is None:
            _emit(args, {"command": "axiom", "schema": None}, "not an axiom instance")
            return REFUTED
        schema, b = hit
        shown = {k: (format_word(v) if k == "alpha" else
                     pretty_formula(v, agents) if k in ("phi", "psi") else v) for k, v in b.items()}
        _emit(args, {"command": "axiom", "schema": schema, "bindings": shown},
              f"{schema} " + " ".join(f"{k}={v}" for k, v in shown.items()))
        return OK
    if args.schema is None:
        raise UsageError("give a schema name or --identify FORMULA")
    raw = {}
    for item in args.bind:
        if "=" not in item:
            raise UsageError(f"--bind takes NAME=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        raw[k.strip()] = v.strip()
    agents, atoms = _vocab_of(args, raw.values())
    b = {k: _binding(k, v, agents, atoms) for k, v in raw.items()}
    f = instantiate_axiom(args.schema, b, agents)
    _emit(args, {"command": "axiom", "schema": args.schema, "instance": print_formula(f)},
          pretty_formula(f, agents))
    return OK


def cmd_check_proof(args) -> int:
    p = load_proof(args.proof)
    report = check_proof(p)
    lines = []
    for r in report.results:
        mark = "ok " if r.ok else "BAD"
        lines.append(f"{mark} {r.index:>3}. {r.rule}" + (f": {r.message}" if r.message else ""))
    verdict = report.verdict
    lines.append(f"verdict: {verdict}")
    if verdict == ACCEPTED_BOUNDED:
        lines.append("R* was only checked up to the stated bound; "
                     + ("accepted because of --allow-bounded" if args.allow_bounded
                        else "pass --allow-bounded to accept bounded evidence"))
    elif verdict == ACCEPTED_HYPOTHESES:
        lines.append("the proof rests on unproved hypotheses, so it is not a theorem")
    _emit(args, {"command": "check-proof", **report.to_dict(p.agents)}, "\n".join(lines))
    if verdict == ACCEPTED or (verdict == ACCEPTED_BOUNDED and args.allow_bounded):
        return OK
    return REFUTED


def cmd_gen_model(args) -> int:
    agents = _names(args.agents)
    if not agents:
        raise UsageError("--agents is required")
    m = random_model(args.states, agents, _names(args.atoms), args.seed)
    text = dump_model(m)
    if args.out:
        Path(args.out).write_text(text + "\n")
    if args.format == "json":
        print(json.dumps({"format_version": FORMAT_VERSION, "command": "gen-model",
                          "model": model_to_dict(m)}, sort_keys=True))
    elif not args.out:
        print(text)
    else:
        print(f"wrote {args.out}")
    return OK


# -- argument parsing ---------------------------------------------------------------

def _model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", help="model file (JSON)")
    p.add_argument("--random-model", metavar="N:SEED", help="random model with N states")
    p.add_argument("--agents", help="comma-separated agents (for --random-model)")
    p.add_argument("--atoms", help="comma-separated atoms (default: those in the input)")


def _vocab_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--agents", required=True, help="comma-separated agents")
    p.add_argument("--atoms", help="comma-separated atoms (default: those in the input)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "json"), default="human")
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness")

    ap = argparse.ArgumentParser(prog="aalogic", parents=[common],
                                 description="Asynchronous announcement logic toolkit")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a formula at (state, word)")
    _model_flags(p)
    p.add_argument("--state", required=True)
    p.add_argument("--word", default="eps")
    p.add_argument("formula")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("exec", parents=[common], help="executability of a word")
    _model_flags(p)
    p.add_argument("--state")
    p.add_argument("word")
    p.set_defaults(func=cmd_exec)

    p = sub.add_parser("views", parents=[common], help="histories an agent considers possible")
    _vocab_flags(p)
    p.add_argument("word")
    p.add_argument("agent")
    p.set_defaults(func=cmd_views)

    p = sub.add_parser("history", parents=[common], help="is a word a history?")
    _vocab_flags(p)
    p.add_argument("word")
    p.set_defaults(func=cmd_history)

    p = sub.add_parser("validity", parents=[common], help="bounded validity search")
    p.add_argument("--model", help="check one model file instead of a random family")
    p.add_argument("--agents")
    p.add_argument("--atoms")
    p.add_argument("--mode", choices=("epsilon", "star"), default="star")
    p.add_argument("--models", type=int, default=20, help="size of the random family")
    p.add_argument("--max-states", type=int, default=4)
    p.add_argument("--bound", type=int, default=3, help="maximum word length")
    p.add_argument("--vocab", help="comma-separated announcement vocabulary")
    p.add_argument("formula")
    p.set_defaults(func=cmd_validity)

    p = sub.add_parser("axiom", parents=[common], help="instantiate or recognise axiom schemas")
    p.add_argument("schema", nargs="?", choices=AXIOM_IDS)
    p.add_argument("--bind", action="append", default=[], metavar="NAME=VALUE",
                   help="; ".join(f"{k}: {','.join(v)}" for k, v in METAVARS.items()))
    p.add_argument("--identify", metavar="FORMULA")
    _vocab_flags(p)
    p.set_defaults(func=cmd_axiom)

    p = sub.add_parser("check-proof", parents=[common], help="check a proof file")
    p.add_argument("proof")
    p.add_argument("--allow-bounded", action="store_true",
                   help="let bounded R* evidence count as acceptance")
    p.set_defaults(func=cmd_check_proof)

    p = sub.add_parser("gen-model", parents=[common], help="write a random model")
    p.add_argument("--states", type=int, required=True)
    p.add_argument("--agents", required=True)
    p.add_argument("--atoms", default="")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_model)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"aalogic: {e}", file=sys.stderr)
    except ParseError as e:
        print(f"aalogic: parse error: {e}", file=sys.stderr)
    except ProofFormatError as e:
        print(f"aalogic: proof format: {e}", file=sys.stderr)
    except (AAError, ValueError, KeyError, OSError) as e:
        print(f"aalogic: {e}", file=sys.stderr)
    return USAGE


if __name__ == "__main__":
    sys.exit(main())
