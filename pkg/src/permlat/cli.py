"""Command-line front end.

Exit codes reflect operational success only: 0 means a verdict was
computed (either verdict), 2 means the input was unusable. Verdicts live
in the report.
"""

import argparse
import json
import sys

from .errors import (
    ParameterError,
    ParseError,
    PermlatError,
    SubgroupResolutionError,
    ValidationError,
)
from .gmodule import coinvariants, fixed_points
from .krs import decompose_indecomposables, recognize_permutation
from .pgroup import make_handle, subgroup_closure
from .serialize import module_to_json, read_module, write_module
from .theorem import check_main_theorem, recursive_is_permutation
from .cohomo import is_coflasque


def _resolve_word(G, word):
    word = word.strip()
    if not word or word == "e":
        return 0
    tokens = word.split("*") if "*" in word else None
    if tokens is None:
        # greedy longest-match tokenization over generator names
        tokens = []
        rest = word
        names = sorted(G.generator_names, key=len, reverse=True)
        while rest:
            for name in names:
                if rest.startswith(name):
                    tokens.append(name)
                    rest = rest[len(name):]
                    break
            else:
                raise SubgroupResolutionError(f"cannot tokenize {word!r}")
    idx = 0
    name_to_gen = dict(zip(G.generator_names, G.generators))
    for t in tokens:
        if t not in name_to_gen:
            raise SubgroupResolutionError(f"unknown generator {t!r} in {word!r}")
        idx = G.mul(idx, name_to_gen[t])
    return idx


def resolve_subgroup(G, spec):
    """Comma-separated generator words, e.g. "n,c" or "g*g"."""
    elems = [_resolve_word(G, w) for w in spec.split(",") if w.strip()]
    try:
        return make_handle(G, subgroup_closure(G, elems))
    except PermlatError as e:
        raise SubgroupResolutionError(str(e)) from None


def _emit(data, as_json, out=None):
    if as_json:
        text = json.dumps(data, indent=1, sort_keys=True)
    else:
        text = _render_text(data)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _render_text(data, indent=0):
    pad = "  " * indent
    if isinstance(data, dict):
        lines = []
        for k, v in data.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
        return "\n".join(lines)
    if isinstance(data, list):
        return "\n".join(
            _render_text(v, indent) if isinstance(v, (dict, list)) else f"{pad}- {v}"
            for v in data
        )
    return f"{pad}{data}"


def cmd_analyze(args):
    U = read_module(args.file)
    G = U.group
    if args.subgroup:
        N = resolve_subgroup(G, args.subgroup)
        if not N.is_normal:
            raise SubgroupResolutionError(f"subgroup {args.subgroup!r} is not normal")
        rep = check_main_theorem(U, N, module_id=args.file, seed=args.seed,
                                 precision=args.precision)
        _emit(rep.to_json_dict(), args.json, args.output)
    else:
        ok, trace = recursive_is_permutation(U, seed=args.seed)
        from .theorem import _jsonable

        _emit({"module_id": args.file,
               "conclusion": "Permutation" if ok else "NotPermutation",
               "trace": _jsonable(trace)}, args.json, args.output)
    return 0


def cmd_decompose(args):
    U = read_module(args.file)
    rec = recognize_permutation(U, seed=args.seed, precision=args.precision)
    D = rec.decomposition
    out = {
        "module_id": args.file,
        "working_precision": D.precision,
        "seed": D.seed,
        "summands": [
            {
                "rank": s.module.rank,
                "certificate": s.certificate,
                "label": list(s.label_words) if s.label is not None else None,
            }
            for s in D.summands
        ],
        "is_permutation": rec.is_permutation,
    }
    if rec.is_permutation:
        out["multiset"] = [
            {"stabilizer_class": [U.group.word_str(x) for x in H.elements],
             "multiplicity": m}
            for H, m in rec.multiset
        ]
    if D.change_of_basis is not None:
        out["change_of_basis"] = [[str(int(x)) for x in row] for row in D.change_of_basis]
    _emit(out, args.json, args.output)
    return 0


def cmd_coflasque(args):
    U = read_module(args.file)
    res = is_coflasque(U)
    out = {"module_id": args.file, "coflasque": res.ok}
    if not res.ok:
        out["witness_subgroup"] = [U.group.word_str(x) for x in res.witness.elements]
        out["witness_h1"] = {
            "free_rank": res.witness_profile.free_rank,
            "divisors": [list(d) for d in res.witness_profile.divisors],
        }
    _emit(out, args.json, args.output)
    return 0


def cmd_gen(args):
    from . import corpus

    if args.kind == "paper-example":
        fx = corpus.paper_example_4_2()
        U = fx.module
        truth = {"kind": "paper-example", "expected": fx.expected_verdicts}
    elif args.kind == "disguised":
        if not args.group:
            raise ParameterError("--group required for disguised")
        G = _group_from_spec(args.group)
        from .krs import subgroup_classes

        classes = [c.rep for c in subgroup_classes(G)]
        rng_classes = _pick_classes(classes, args.seed)
        U, truth_ms = corpus.disguised_permutation(G, rng_classes, args.seed)
        truth = {"kind": "disguised", "seed": args.seed,
                 "classes": [list(e) for e in truth_ms]}
    elif args.kind == "augmentation-ideal":
        if not args.group:
            raise ParameterError("--group required for augmentation-ideal")
        G = _group_from_spec(args.group)
        U = corpus.syzygy_nonpermutation(G, "augmentation_ideal", args.seed)
        truth = {"kind": "augmentation-ideal", "is_permutation": False}
    elif args.kind == "coflasque-cover":
        if not args.group:
            raise ParameterError("--group required for coflasque-cover")
        G = _group_from_spec(args.group)
        U = corpus.syzygy_nonpermutation(G, "coflasque_cover", args.seed)
        truth = {"kind": "coflasque-cover", "coflasque": True}
    else:
        raise ParameterError(f"unknown kind {args.kind!r}")
    write_module(U, args.output)
    with open(args.output + ".truth.json", "w") as fh:
        json.dump(truth, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(f"wrote {args.output} (+ .truth.json)")
    return 0


def _group_from_spec(spec):
    from .corpus import named_group

    try:
        return named_group(spec)
    except ValueError as e:
        raise ParameterError(str(e)) from None


def _pick_classes(classes, seed):
    import numpy as np

    rng = np.random.default_rng(seed)
    count = int(rng.integers(1, 4))
    picks = []
    for _ in range(count):
        picks.append(classes[int(rng.integers(0, len(classes)))])
    return picks


def cmd_corpus(args):
    from . import corpus

    if args.action != "export":
        raise ParameterError(f"unknown corpus action {args.action!r}")
    if args.fixture in ("paper-example", "paper_example_4_2"):
        fx = corpus.paper_example_4_2()
    else:
        raise ParameterError(f"unknown fixture {args.fixture!r}")
    write_module(fx.module, args.output)
    print(f"wrote {args.output}")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="permlat",
                                 description="permutation-module analysis for "
                                             "p-adic lattices with p-group action")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, needs_file=True):
        if needs_file:
            sp.add_argument("file", help="module JSON file")
        sp.add_argument("--json", action="store_true", help="JSON output")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--precision", type=int, default=None,
                        help="working precision override (lattices)")
        sp.add_argument("-o", "--output", default=None, help="write report to file")

    sp = sub.add_parser("analyze", help="run the characterization checks")
    common(sp)
    sp.add_argument("--subgroup", default=None,
                    help='normal subgroup as generator words, e.g. "n,c"')
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("verify-theorem", help="alias of analyze requiring --subgroup")
    common(sp)
    sp.add_argument("--subgroup", required=True)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("decompose", help="indecomposable decomposition + recognition")
    common(sp)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("coflasque", help="coflasqueness check with witness")
    common(sp)
    sp.set_defaults(func=cmd_coflasque)

    sp = sub.add_parser("gen", help="generate corpus fixtures")
    sp.add_argument("--kind", required=True,
                    choices=["paper-example", "disguised", "augmentation-ideal",
                             "coflasque-cover"])
    sp.add_argument("--group", default=None, help="group spec, e.g. c4, q8, c2xc2xc2")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("corpus", help="corpus utilities")
    sp.add_argument("action", choices=["export"])
    sp.add_argument("fixture")
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_corpus)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError, SubgroupResolutionError, ParameterError,
            FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
