"""Command-line front end.

``zerolab <command> <model-file> [flags]`` reads a JSON model whose numeric
entries are exact-rational strings, prints a machine-readable JSON report to
stdout and a short human summary to stderr.

Exit codes: 0 success, 2 input error, 3 cross-method disagreement,
4 degenerate system, 5 solvability not established.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import qmat
from .canon import to_asseo, to_companion, to_yokoyama
from .design import (
    AssignmentProblem,
    InfeasibleError,
    assign_analytical,
    assign_gradient,
    assign_squaring_down,
    pi_observer_solvable,
    pi_solvable,
    servo_solvable,
    synthesize_pi_regulator,
    synthesize_servo_regulator,
)
from .polymat import PolyMatrix, RatMatrix, smith_form, smith_mcmillan
from .ratpoly import DomainError, Poly, RatFn, cluster_match, format_poly, roots
from .sim import simulate_tracking
from .statespace import StateSpace, StructuralError
from .zeros import (
    DegenerateSystemError,
    zero_report,
    zero_poly_matrix_polynomial,
    zeros_highgain,
    zeros_interpolation,
    zeros_pencil,
    system_zeros,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DISAGREE = 3
EXIT_DEGENERATE = 4
EXIT_NOT_ESTABLISHED = 5


class InputError(Exception):
    pass


def _load_model(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read model file {path}: {exc}") from exc
    return data


def _matrix(data, key, required=True):
    if key not in data:
        if required:
            raise InputError(f"model is missing matrix {key!r}")
        return None
    try:
        return qmat.qmat(data[key])
    except (DomainError, TypeError, ValueError) as exc:
        raise InputError(f"matrix {key!r} malformed: {exc}") from exc


def _system(data) -> StateSpace:
    A = _matrix(data, "A")
    B = _matrix(data, "B")
    C = _matrix(data, "C")
    D = _matrix(data, "D", required=False)
    try:
        return StateSpace(A, B, C, D, name=data.get("name", ""))
    except DomainError as exc:
        raise InputError(str(exc)) from exc


def _poly_json(p: Poly) -> dict:
    return {
        "coeffs": [str(c) for c in p.coeffs],
        "text": format_poly(p),
    }


def _roots_json(values) -> list:
    out = []
    for z in values:
        z = complex(z)
        out.append({"re": repr(z.real), "im": repr(z.imag)})
    return out


def _report(command: str, model: str, seed: int | None = None) -> dict:
    rep = {"command": command, "model": model, "results": {}, "checks": {},
           "warnings": []}
    if seed is not None:
        rep["seed"] = seed
    return rep


def _emit(report: dict, args) -> None:
    text = json.dumps(report, indent=2)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _summary(line: str) -> None:
    print(line, file=sys.stderr)


# ---------------------------------------------------------------------------


def cmd_zeros(args) -> int:
    data = _load_model(args.model)
    sys_ = _system(data)
    report = _report("zeros", args.model, seed=args.seed)
    methods = args.methods.split(",") if args.methods != "all" else [
        "taxonomy",
        "pencil",
        "matrixpoly",
        "interp",
        "highgain",
    ]
    try:
        tax = zero_report(sys_)
    except DegenerateSystemError as exc:
        report["results"]["degenerate"] = str(exc)
        _emit(report, args)
        _summary("degenerate system: zeros fill the complex plane")
        return EXIT_DEGENERATE
    report["results"]["zero_poly"] = _poly_json(tax.zero_poly)
    report["results"]["invariant_poly"] = _poly_json(tax.invariant_poly)
    report["results"]["sets"] = {
        "system": _roots_json(tax.system_zeros),
        "invariant": _roots_json(tax.invariant_zeros),
        "transmission": _roots_json(tax.transmission_zeros),
        "input_decoupling": _roots_json(tax.input_decoupling),
        "output_decoupling": _roots_json(tax.output_decoupling),
        "io_decoupling": _roots_json(tax.io_decoupling),
    }
    report["results"]["method_tags"] = tax.method_tags
    report["checks"]["inclusions"] = tax.inclusions_hold()
    report["checks"]["multiset_identity"] = tax.identity_holds()

    per_method: dict[str, list[complex]] = {}
    warn = report["warnings"]
    if "pencil" in methods:
        try:
            psi, rs = zeros_pencil(sys_, seed=args.seed)
            per_method["pencil"] = rs
            report["results"]["pencil"] = {
                "roots": _roots_json(rs),
                **({"poly": _poly_json(psi)} if psi is not None else {}),
            }
        except (StructuralError, DegenerateSystemError) as exc:
            warn.append(f"pencil: {exc}")
    if "matrixpoly" in methods:
        try:
            psi = zero_poly_matrix_polynomial(sys_)
            rs = roots(psi).expanded() if psi.degree >= 1 else []
            per_method["matrixpoly"] = rs
            report["results"]["matrixpoly"] = {
                "poly": _poly_json(psi),
                "roots": _roots_json(rs),
            }
        except (StructuralError, DegenerateSystemError) as exc:
            warn.append(f"matrixpoly: {exc}")
    if "interp" in methods:
        try:
            psi = zeros_interpolation(sys_)
            rs = roots(psi).expanded() if psi.degree >= 1 else []
            per_method["interp"] = rs
            report["results"]["interp"] = {
                "poly": _poly_json(psi),
                "roots": _roots_json(rs),
            }
        except (StructuralError, DegenerateSystemError) as exc:
            warn.append(f"interp: {exc}")
    if "highgain" in methods:
        try:
            allz, dec, trans = zeros_highgain(sys_, seed=args.seed)
            per_method["highgain"] = allz
            report["results"]["highgain"] = {
                "roots": _roots_json(allz),
                "decoupling": _roots_json(dec),
                "transmission": _roots_json(trans),
            }
        except (StructuralError, DegenerateSystemError) as exc:
            warn.append(f"highgain: {exc}")

    reference = list(tax.system_zeros)
    agree = True
    for name, vals in per_method.items():
        tol = 1e-4 if name == "highgain" else 1e-6
        ok = cluster_match(reference, vals, tol)
        report["checks"][f"agree_{name}"] = ok
        agree = agree and ok
    report["checks"]["cross_method_agreement"] = agree
    _emit(report, args)
    _summary(
        f"system zeros: {format_poly(tax.zero_poly)}; "
        f"agreement: {'yes' if agree else 'NO'}"
    )
    return EXIT_OK if agree else EXIT_DISAGREE


def cmd_canon(args) -> int:
    data = _load_model(args.model)
    sys_ = _system(data)
    report = _report("canon", args.model)
    fn = {"companion": to_companion, "asseo": to_asseo, "yokoyama": to_yokoyama}[
        args.form
    ]
    dec = fn(sys_)
    report["results"] = {
        "kind": dec.kind,
        "nu": dec.nu,
        "l_list": list(dec.l_list),
        "N": _qm_json(dec.N),
        "M": _qm_json(dec.M),
        "F": _qm_json(dec.F),
        "G": _qm_json(dec.G),
        "C_blocks": [_qm_json(b) for b in dec.output_blocks(sys_.C)],
    }
    _emit(report, args)
    _summary(f"{dec.kind} form: nu={dec.nu}, stair sizes {list(dec.l_list)}")
    return EXIT_OK


def _qm_json(m) -> list:
    return [[str(x) for x in row] for row in m]


def _parse_poly_entry(entry) -> Poly:
    if isinstance(entry, list):
        return Poly(entry)
    return Poly([entry])


def cmd_smith(args) -> int:
    data = _load_model(args.model)
    report = _report("smith", args.model)
    if args.mcmillan:
        if "ratmatrix" in data:
            entries = [
                [
                    RatFn(
                        Poly(cell["num"]),
                        Poly(cell.get("den", ["1"])),
                    )
                    for cell in row
                ]
                for row in data["ratmatrix"]
            ]
            W = RatMatrix(entries)
        else:
            sys_ = _system(data)
            from .tfm import transfer_matrix

            W = transfer_matrix(sys_)
        dec = smith_mcmillan(W)
        report["results"] = {
            "eps": [_poly_json(e) for e in dec.eps],
            "psi": [_poly_json(p) for p in dec.psi],
            "lcd": _poly_json(dec.phi),
        }
        _emit(report, args)
        _summary(
            "Smith-McMillan diagonal: "
            + ", ".join(
                f"({format_poly(e)})/({format_poly(p)})"
                for e, p in zip(dec.eps, dec.psi)
            )
        )
        return EXIT_OK
    if "polymatrix" in data:
        P = PolyMatrix([[_parse_poly_entry(e) for e in row] for row in data["polymatrix"]])
    else:
        sys_ = _system(data)
        from .zeros import system_matrix

        P = system_matrix(sys_).P
    dec = smith_form(P)
    report["results"] = {
        "invariant_polys": [_poly_json(p) for p in dec.invariant_polys],
        "S": [[_poly_json(dec.S[i, j]) for j in range(dec.S.cols)] for i in range(dec.S.rows)],
        "U_L": [[_poly_json(dec.U_L[i, j]) for j in range(dec.U_L.cols)] for i in range(dec.U_L.rows)],
        "U_R": [[_poly_json(dec.U_R[i, j]) for j in range(dec.U_R.cols)] for i in range(dec.U_R.rows)],
    }
    _emit(report, args)
    _summary(
        "invariant polynomials: "
        + ", ".join(format_poly(p) for p in dec.invariant_polys)
    )
    return EXIT_OK


def cmd_assign(args) -> int:
    data = _load_model(args.model)
    sys_ = _system(data)
    report = _report("assign", args.model, seed=args.seed)
    targets = args.targets if args.targets is not None else data.get("targets", [])
    if args.method == "analytic":
        C = assign_analytical(sys_, targets)
        newsys = StateSpace(sys_.A, sys_.B, C)
        psi, rs = system_zeros(newsys)
        report["results"] = {
            "C": _qm_json(C),
            "zero_poly": _poly_json(psi),
            "zeros": _roots_json(rs.expanded()),
        }
        achieved = rs.expanded()
    elif args.method == "gradient":
        prob = AssignmentProblem(
            sys=sys_,
            targets=targets,
            measured=args.measured,
            q=args.weight,
            eps=args.stop_eps,
            seed=args.seed,
        )
        res = assign_gradient(prob)
        report["results"] = {
            "C": [[repr(float(x)) for x in row] for row in res.C],
            "iterations": res.iterations,
            "cost": repr(res.cost),
            "achieved": _roots_json(res.achieved),
        }
        achieved = res.achieved
    else:  # squaredown
        res = assign_squaring_down(
            sys_, targets, q=args.weight, eps=args.stop_eps, seed=args.seed
        )
        report["results"] = {
            "D": [[repr(float(x)) for x in row] for row in res.C],
            "iterations": res.iterations,
            "cost": repr(res.cost),
            "achieved": _roots_json(res.achieved),
        }
        achieved = res.achieved
    if args.emit_matrix:
        with open(args.emit_matrix, "w") as fh:
            json.dump(report["results"].get("C", report["results"].get("D")), fh)
    _emit(report, args)
    _summary(f"assigned zeros -> {sorted(z.real for z in map(complex, achieved))}")
    return EXIT_OK


def cmd_servo(args) -> int:
    data = _load_model(args.model)
    report = _report("servo", args.model)
    A = _matrix(data, "A")
    B = _matrix(data, "B")
    D = _matrix(data, "D") if "D" in data else _matrix(data, "C")
    ref_coeffs = (
        args.refpoly.split() if args.refpoly else data.get("refpoly", ["0", "1"])
    )
    ref_poly = Poly(ref_coeffs)
    E = _matrix(data, "E", required=False)
    H = _matrix(data, "H", required=False)
    Fm = _matrix(data, "F", required=False)
    step_tracking = ref_poly == Poly([0, 1])
    if step_tracking:
        rep = pi_solvable(A, B, D)
    else:
        rep = servo_solvable(A, B, D, ref_poly)
    report["results"]["conditions"] = {
        "stabilizable": rep.stabilizable,
        "io_count_ok": rep.io_count_ok,
        "zero_condition_ok": rep.zero_condition_ok,
        "verdict": rep.verdict,
    }
    if H is not None and E is not None:
        orep = pi_observer_solvable(A, E, H, Fm if Fm is not None else qmat.zeros(len(H), qmat.shape(E)[1]))
        report["results"]["observer_conditions"] = {
            "stabilizable": orep.stabilizable,
            "io_count_ok": orep.io_count_ok,
            "zero_condition_ok": orep.zero_condition_ok,
            "verdict": orep.verdict,
        }
    if not rep.solvable:
        _emit(report, args)
        _summary(f"servo verdict: {rep.verdict}")
        return EXIT_NOT_ESTABLISHED
    if args.synth:
        if not args.poles:
            raise InputError("--synth needs --poles")
        poles = [_parse_pole(p) for p in args.poles]
        if step_tracking:
            reg = synthesize_pi_regulator(A, B, D, poles)
        else:
            reg = synthesize_servo_regulator(A, B, D, ref_poly, poles)
        report["results"]["K1"] = _qm_json(reg.K1)
        report["results"]["K2"] = _qm_json(reg.K2)
        eig = np.linalg.eigvals(qmat.to_float(reg.closed_loop))
        report["results"]["closed_loop_eigs"] = _roots_json(sorted(eig, key=lambda z: (z.real, z.imag)))
        if args.csv:
            if step_tracking:
                z_ref = lambda t: np.ones(len(D))
            else:
                rsig = _reference_signal(ref_poly, len(D))
                z_ref = rsig
            traj, steady = simulate_tracking(
                reg, z_ref, horizon=args.horizon, step=1e-3
            )
            traj.to_csv(args.csv)
            report["results"]["steady_error"] = repr(steady)
    _emit(report, args)
    _summary(f"servo verdict: {rep.verdict}")
    return EXIT_OK


def _parse_pole(token: str):
    if "+" in token[1:] or ("-" in token[1:] and "j" in token):
        z = complex(token.replace(" ", ""))
        return (repr(z.real), repr(z.imag))
    return token


def _reference_signal(ref_poly: Poly, d: int):
    """Signal generated by the scalar ODE with characteristic ``ref_poly``,
    unit initial conditions, replicated across the d channels."""
    beta = ref_poly.degree
    comp = np.zeros((beta, beta))
    comp[:-1, 1:] = np.eye(beta - 1) if beta > 1 else comp[:-1, 1:]
    mono = ref_poly.monic()
    comp[-1, :] = [-float(c) for c in mono.coeffs[:-1]]

    # matrix exponential by plain series; fine at desk scale
    def z_ref(t):
        x = np.ones(beta)
        # expm(comp * t) @ x via scaling and squaring on the small matrix
        M = comp * t
        E = np.eye(beta)
        term = np.eye(beta)
        for k in range(1, 40):
            term = term @ M / k
            E = E + term
        val = (E @ x)[0]
        return np.full(d, val)

    return z_ref


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="zerolab",
        description="zero analysis, assignment and servo design for "
        "linear multivariable systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pz = sub.add_parser("zeros", help="compute and classify all zero sets")
    pz.add_argument("model")
    pz.add_argument(
        "--methods",
        default="all",
        help="comma list of pencil,matrixpoly,interp,highgain or 'all'",
    )
    pz.add_argument("--seed", type=int, default=1)
    pz.add_argument("--out")
    pz.set_defaults(fn=cmd_zeros)

    pc = sub.add_parser("canon", help="canonical transformation")
    pc.add_argument("model")
    pc.add_argument(
        "--form", choices=["companion", "asseo", "yokoyama"], default="yokoyama"
    )
    pc.add_argument("--out")
    pc.set_defaults(fn=cmd_canon)

    ps = sub.add_parser("smith", help="Smith / Smith-McMillan form")
    ps.add_argument("model")
    ps.add_argument("--mcmillan", action="store_true")
    ps.add_argument("--out")
    ps.set_defaults(fn=cmd_smith)

    pa = sub.add_parser("assign", help="zero assignment")
    pa.add_argument("model")
    pa.add_argument("--targets", nargs="*", default=None)
    pa.add_argument(
        "--method", choices=["analytic", "gradient", "squaredown"], default="analytic"
    )
    pa.add_argument("--measured", type=int, default=None)
    pa.add_argument("--weight", type=float, default=0.25)
    pa.add_argument("--stop-eps", type=float, default=0.02)
    pa.add_argument("--seed", type=int, default=1)
    pa.add_argument("--emit-matrix")
    pa.add_argument("--out")
    pa.set_defaults(fn=cmd_assign)

    pv = sub.add_parser("servo", help="tracking solvability and synthesis")
    pv.add_argument("model")
    pv.add_argument("--check", action="store_true")
    pv.add_argument("--synth", action="store_true")
    pv.add_argument("--poles", nargs="*")
    pv.add_argument(
        "--refpoly",
        help="reference characteristic coefficients, low degree first",
    )
    pv.add_argument("--csv")
    pv.add_argument("--horizon", type=float, default=80.0)
    pv.add_argument("--out")
    pv.set_defaults(fn=cmd_servo)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegenerateSystemError as exc:
        print(f"degenerate system: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except InfeasibleError as exc:
        print(f"not solvable: {exc}", file=sys.stderr)
        return EXIT_NOT_ESTABLISHED
    except (DomainError, StructuralError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
