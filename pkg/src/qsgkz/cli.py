"""Command-line entry point.

    qsgkz --command verify --input gauss [--alpha=-0.3,-0.4,-0.2] [--output report.json]

The command may also be given positionally.  ``--input`` is a bundled
instance name or a path to an instance JSON file.  Exit codes: 0 success,
1 invalid instance, 2 computation error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import InvalidInstance, QsgkzError

COMMANDS = ("validate", "arrangement", "monodromy", "ktheory", "numeric", "verify")
EXIT_OK, EXIT_INVALID, EXIT_COMPUTE, EXIT_VERIFY = 0, 1, 2, 3

log = logging.getLogger("qsgkz")


# --------------------------------------------------------------------------
# instance parsing


def parse_alpha(spec):
    """Accepts "a,b,c" (complex literals allowed), a JSON list, or {"re": [...], "im": [...]}."""
    if spec is None:
        return None
    if isinstance(spec, dict):
        re = spec.get("re")
        im = spec.get("im") or [0.0] * len(re)
        if re is None or len(re) != len(im):
            raise InvalidInstance("alpha needs matching 're' and 'im' lists")
        return tuple(complex(a, b) if b else float(a) for a, b in zip(re, im))
    if isinstance(spec, (list, tuple)):
        return tuple(_parse_number(x) for x in spec)
    text = str(spec).strip()
    if text.startswith("{") or text.startswith("["):
        return parse_alpha(json.loads(text))
    return tuple(_parse_number(x) for x in text.split(","))


def _parse_number(x):
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(float(x[0]), float(x[1])) if x[1] else float(x[0])
    if isinstance(x, (int, float)):
        return float(x)
    s = str(x).strip().replace(" ", "")
    try:
        if "/" in s:
            return Fraction(s)
        c = complex(s)
    except ValueError as e:
        raise InvalidInstance(f"cannot parse alpha entry {x!r}") from e
    return c.real if c.imag == 0 else c


def load(args):
    from .instances import config_from_instance, load_instance

    try:
        inst = load_instance(args.input)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInstance(f"cannot read instance {args.input!r}: {e}") from e
    if "B" not in inst:
        raise InvalidInstance("instance has no 'B'")
    cfg = config_from_instance(inst)
    alpha = parse_alpha(args.alpha) if args.alpha is not None else parse_alpha(inst.get("alpha"))
    if alpha is not None and len(alpha) != cfg.m:
        raise InvalidInstance(f"alpha has length {len(alpha)}, expected d - n = {cfg.m}")
    N = args.truncation if args.truncation is not None else int(inst.get("truncation", 8))
    return inst, cfg, alpha, N


# --------------------------------------------------------------------------
# JSON helpers


def to_plain(x):
    """Recursively convert to JSON-native values (Fractions become strings)."""
    if isinstance(x, dict):
        return {str(k): to_plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_plain(v) for v in x]
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.ndarray):
        return to_plain(x.tolist())
    return x


def _face(f):
    return {"dim": f.dim, "code": list(f.code), "point": [str(v) for v in f.rep], "shift": list(f.shift)}


def metadata(cfg, command, alpha, N, seed):
    from .schober_k0 import conventions

    return {
        "version": __version__,
        "command": command,
        "instance": cfg.name,
        "alpha": None if alpha is None else [[complex(a).real, complex(a).imag] for a in alpha],
        "truncation": N,
        "seed": seed,
        "conventions": conventions(cfg),
    }


# --------------------------------------------------------------------------
# commands


def cmd_validate(cfg, alpha, N, args, inst):
    from .resonance import dual_cone_rays, normalized_volume

    out = {"config": cfg.to_dict(), "normalized_volume": normalized_volume(cfg), "nonresonance_rays": dual_cone_rays(cfg)}
    if alpha is not None:
        from .resonance import is_nonresonant, is_totally_nonresonant, re_in_negative_cone

        out["alpha_status"] = {
            "nonresonant": is_nonresonant(cfg, alpha),
            "totally_nonresonant": is_totally_nonresonant(cfg, alpha),
            "re_in_negative_cone": re_in_negative_cone(cfg, alpha),
        }
    return out, EXIT_OK


def cmd_arrangement(cfg, alpha, N, args, inst):
    from .arrangement import collinear_triples, compute_zeta, face_complex, union_check, wall_set_J

    cx = face_complex(cfg, inst.get("fatten"))
    classes = []
    for f in cx.classes:
        entry = _face(f)
        entry["vertices"] = [[str(v) for v in p] for p in f.vertices]
        entry["L"] = [list(p) for p in cx.lattice_points(f)]
        if f.dim < cx.n:
            entry["union_check"] = union_check(cx, f)
        classes.append(entry)
    walls = [
        {"source": _face(c1), "target": _face(c2), "facet": _face(f), "J": list(wall_set_J(cx, f, c2))}
        for c1, c2, f in cx.wall_generators()
    ]
    z = compute_zeta(cfg)
    return {
        "families": [{"normal": list(lam), "offset": str(c)} for lam, c in cx.families],
        "face_classes": classes,
        "walls": walls,
        "zeta": {"multiset": [[g, list(b)] for g, b in z["multiset"]], "exp_2pi_i_zeta": z["exp_2pi_i_zeta"]},
        "collinear_triples": len(collinear_triples(cx)),
        "index_base": 0,
    }, EXIT_OK


def cmd_monodromy(cfg, alpha, N, args, inst):
    from .arrangement import face_complex
    from .schober_k0 import build_monodromy_rep

    cx = face_complex(cfg, inst.get("fatten"))
    out = {}
    for side in ("theorem", "ktheory"):
        rep = build_monodromy_rep(cx, side)
        out[side] = {"symbolic": rep.to_json()}
        if alpha is not None:
            out[side]["specialized"] = rep.specialize(alpha).to_json()
    return out, EXIT_OK


def cmd_ktheory(cfg, alpha, N, args, inst):
    from .arrangement import face_complex
    from .ktheory import dual_basis_check, face_labels, pairing_gram, phi_matrix, psi_matrix
    from .resonance import F_element

    cx = face_complex(cfg, inst.get("fatten"))
    faces = []
    verdict = True
    for f in cx.classes:
        L = face_labels(cx, f)
        psi = psi_matrix(cfg, L, N)
        phi = phi_matrix(cfg, L, N)
        ok = dual_basis_check(cfg, L, N)
        verdict &= ok
        faces.append(
            {
                "face": _face(f),
                "labels": [list(x) for x in L],
                "psi": psi.to_labeled().to_json(),
                "phi": phi.to_labeled().to_json(),
                "gram": pairing_gram(cfg, L, N).to_labeled().to_json(),
                "psi_phi_identity": (psi @ phi).is_identity(),
                "dual_basis": ok,
            }
        )
    out = {"truncation": N, "F": F_element(cfg).to_json(), "faces": faces, "dual_basis": verdict}
    return out, EXIT_OK if verdict else EXIT_VERIFY


def cmd_numeric(cfg, alpha, N, args, inst):
    from . import analytic as an
    from .arrangement import face_complex
    from .schober_k0 import wall_crossing_matrix

    if alpha is None:
        raise InvalidInstance("the numeric command needs alpha")
    if cfg.n != 1:
        raise QsgkzError("numerics are implemented for n = 1 only")
    q = inst.get("quadrature", {})
    params = an.mb_params(cfg, alpha, half_width=float(q.get("half_width", 40.0)), nodes=int(q.get("nodes", 2000)))
    cx = face_complex(cfg, inst.get("fatten"))
    rng = np.random.default_rng(args.seed)
    c = an._families(cfg)[0][1]
    values, residuals = [], []
    for _ in range(5):
        x = complex(rng.uniform(-0.8, 0.8) * c, rng.uniform(-0.5, 0.5))
        v, err = an.evaluate_mb(cfg, params, [x])
        r = an.gkz_residual(cfg, params, [x])
        values.append({"x": x, "value": v, "error": err})
        residuals.append({"x": x, "box": r.max_box, "euler": r.max_euler})
    walls = []
    for c1, c2, _ in cx.wall_generators():
        W = an.numeric_wall_matrix(cx, c1, c2, alpha, params)
        E = wall_crossing_matrix(cx, c1, c2, "theorem", alpha)
        walls.append(
            {
                "source": _face(c1),
                "target": _face(c2),
                "numeric": W.to_json(),
                "exact": E.to_json(),
                "max_relative_error": an.max_relative_error(W, E),
            }
        )
    out = {
        "gamma": params.gamma,
        "sigma": params.sigma,
        "quadrature": {"half_width": params.half_width, "nodes": params.nodes},
        "mb_values": values,
        "residuals": residuals,
        "walls": walls,
    }
    return out, EXIT_OK


def cmd_verify(cfg, alpha, N, args, inst):
    from .verify import VerifyOptions, run_suite

    rep = run_suite(cfg, alpha, VerifyOptions(truncation=N, seed=args.seed))
    return rep.to_dict(), EXIT_OK if rep.ok else EXIT_VERIFY


HANDLERS = {
    "validate": cmd_validate,
    "arrangement": cmd_arrangement,
    "monodromy": cmd_monodromy,
    "ktheory": cmd_ktheory,
    "numeric": cmd_numeric,
    "verify": cmd_verify,
}


def build_parser():
    p = argparse.ArgumentParser(prog="qsgkz", description="GKZ monodromy and decategorified schober checks.")
    p.add_argument("command_pos", nargs="?", choices=COMMANDS, metavar="COMMAND", help="one of " + ", ".join(COMMANDS))
    p.add_argument("--command", choices=COMMANDS)
    p.add_argument("--input", required=True, help="bundled instance name or path to an instance JSON")
    p.add_argument("--output", help="output path (default: stdout)")
    p.add_argument("--alpha", help="inline alpha; use the = form for negatives, e.g. --alpha=-0.3,-0.4,-0.2")
    p.add_argument("--truncation", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json"], default="json")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def run(command, args) -> int:
    try:
        inst, cfg, alpha, N = load(args)
        body, code = HANDLERS[command](cfg, alpha, N, args, inst)
        doc = {"metadata": metadata(cfg, command, alpha, N, args.seed), "result": body}
    except InvalidInstance as e:
        doc, code = {"error": type(e).__name__, "message": str(e)}, EXIT_INVALID
    except (QsgkzError, NotImplementedError, ValueError, ArithmeticError) as e:
        doc, code = {"error": type(e).__name__, "message": str(e)}, EXIT_COMPUTE
    if "error" in doc:
        print(f"qsgkz: {doc['error']}: {doc['message']}", file=sys.stderr)
    text = json.dumps(to_plain(doc), indent=2, sort_keys=True)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    command = args.command or args.command_pos
    if command is None:
        print("qsgkz: no command given", file=sys.stderr)
        return EXIT_INVALID
    return run(command, args)


if __name__ == "__main__":
    sys.exit(main())
