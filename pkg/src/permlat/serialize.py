"""Module-file JSON serialization.

Matrices are arrays of arrays of decimal integer strings so that values
beyond 2^63 survive a round trip exactly. Groups serialize through their
regular permutation representation keyed by generator name, which the
BFS canonicalization reproduces bit-for-bit on load.
"""

import json

import numpy as np

from . import zlinalg as zl
from .errors import ParseError, ValidationError
from .gmodule import finite_ring, lattice_ring, make_module
from .pgroup import build_group


def matrix_to_json(A):
    A = np.asarray(A)
    return [[str(int(x)) for x in row] for row in A]


def matrix_from_json(data, what="matrix"):
    try:
        rows = [[int(x) for x in row] for row in data]
    except (TypeError, ValueError) as e:
        raise ParseError(f"bad {what}: {e}") from None
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ParseError(f"bad {what}: ragged rows")
    return rows


def group_to_json(G):
    gens = {}
    for name, g in zip(G.generator_names, G.generators):
        gens[name] = [int(G.mul_table[g, x]) for x in range(G.order)]
    return {"p": G.p, "generators": gens}


def group_from_json(data):
    if "p" not in data:
        raise ParseError("group needs a prime p")
    p = int(data["p"])
    if "mul_table" in data:
        try:
            return build_group(p, mul_table=data["mul_table"])
        except Exception as e:
            raise ParseError(f"bad mul_table: {e}") from None
    if "generators" not in data:
        raise ParseError("group needs generators or mul_table")
    names = list(data["generators"].keys())
    perms = [data["generators"][n] for n in names]
    try:
        return build_group(p, generators=perms, generator_names=names)
    except Exception as e:
        raise ParseError(f"bad generators: {e}") from None


def ring_to_json(ring):
    if ring.is_lattice:
        return {"type": "lattice", "p": ring.p}
    return {"type": "finite", "p": ring.p, "k": ring.k}


def ring_from_json(data):
    try:
        kind = data["type"]
        p = int(data["p"])
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"bad ring: {e}") from None
    if kind == "lattice":
        return lattice_ring(p)
    if kind == "finite":
        if "k" not in data:
            raise ParseError("finite ring needs k")
        return finite_ring(p, int(data["k"]))
    raise ParseError(f"unknown ring type {kind!r}")


def module_to_json(U):
    G = U.group
    out = {
        "group": group_to_json(G),
        "ring": ring_to_json(U.ring),
        "action": {
            name: matrix_to_json(U.gen_action[i])
            for i, name in enumerate(G.generator_names)
        },
    }
    if U.relations.shape[0]:
        out["relations"] = matrix_to_json(U.relations)
    return out


def module_from_json(data, validate=True):
    if not isinstance(data, dict):
        raise ParseError("module file must be a JSON object")
    for key in ("group", "ring", "action"):
        if key not in data:
            raise ParseError(f"module file missing {key!r}")
    G = group_from_json(data["group"])
    ring = ring_from_json(data["ring"])
    action = data["action"]
    acts = []
    rank = None
    for name in G.generator_names:
        if name not in action:
            raise ParseError(f"missing action matrix for generator {name!r}")
        A = matrix_from_json(action[name], what=f"action[{name}]")
        if rank is None:
            rank = len(A)
        if len(A) != rank or (A and len(A[0]) != rank):
            raise ParseError("action matrices must be square of equal size")
        acts.append(A)
    if rank is None:
        rank = 0
        acts = []
    rel = None
    if "relations" in data:
        rel = matrix_from_json(data["relations"], what="relations")
    try:
        U = make_module(G, ring, rank, acts, relations=rel, check=True)
    except ValidationError:
        raise
    except Exception as e:
        raise ValidationError(str(e)) from None
    if validate:
        U.check_action_law()
    return U


def write_module(U, path):
    with open(path, "w") as fh:
        json.dump(module_to_json(U), fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_module(path, validate=True):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from None
    return module_from_json(data, validate=validate)
