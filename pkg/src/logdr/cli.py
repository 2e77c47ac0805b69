"""Command line front end.

Exit codes:
  0  success
  2  usage error
  3  validation failure
  4  certificate failure
  5  enumeration cap exceeded
  6  figure mismatch
  7  computation error
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .graphs import (CapExceeded, GraphError, StableGraph, automorphism_order, canonical,
                     enumerate_stable_graphs)
from .rational import fmt
from .stability import StabilityCondition, StabilityError, default_theta, nondegeneracy_certificate, is_small

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_CERT, EXIT_CAP, EXIT_FIGURE, EXIT_COMPUTE = 0, 2, 3, 4, 5, 6, 7

# values read off the genus-one, two-pointed figure with A = (3, -3)
FIGURE_LOGDR133 = {
    "taut": {"psi1^1": Fraction(9, 2), "psi2^1": Fraction(9, 2)},
    "banana_middle": (Fraction(-13, 12), Fraction(-13, 12)),
    "banana_outer": {(Fraction(-1, 12), Fraction(-37, 12)), (Fraction(-37, 12), Fraction(-1, 12))},
    "loop": Fraction(-1, 12),
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    g: int | None = None
    n: int | None = None
    A: tuple = ()
    k: int = 0
    theta_seed: int = 1
    theta_seed2: int | None = None
    theta_b: tuple | None = None
    theta_a: Fraction = Fraction(0)
    trunc: int | None = None
    h: int | None = None
    graph: str | None = None
    out: str | None = None
    jobs: int = 1
    cap: int | None = None
    check_figure: str | None = None
    what: str | None = None
    a: int | None = None
    b: int | None = None
    validation: str = "full"
    extra: dict = field(default_factory=dict)

    def require(self, *names):
        for name in names:
            if getattr(self, name) in (None, ()):
                raise UsageError(f"--{name.replace('_', '-')} is required for {self.command}")

    def check_type(self):
        self.require("g", "n")
        if self.g < 0 or self.n < 0 or 2 * self.g - 2 + self.n <= 0:
            raise UsageError(f"(g,n) = ({self.g},{self.n}) is not a stable type")
        if self.A:
            if len(self.A) != self.n:
                raise UsageError(f"-A has {len(self.A)} entries, expected {self.n}")
            if sum(self.A) != self.k * (2 * self.g - 2 + self.n):
                raise UsageError(f"-A must sum to k(2g-2+n) = {self.k * (2 * self.g - 2 + self.n)}")


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def _frac_list(text: str) -> tuple:
    try:
        return tuple(Fraction(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated rationals, got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="logdr", description="Log double ramification cycles via piecewise polynomials.",
                epilog=__doc__.split("\n", 1)[1], formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, need_A=True):
        sp.add_argument("-g", type=int)
        sp.add_argument("-n", type=int)
        if need_A:
            sp.add_argument("-A", type=_int_list, default=())
            sp.add_argument("-k", type=int, default=0)
        sp.add_argument("--theta-seed", type=int, default=1)
        sp.add_argument("--theta-a", type=Fraction, default=Fraction(0))
        sp.add_argument("--theta-b", type=_frac_list, default=None, help="explicit marking weights")
        sp.add_argument("--out", help="write JSON here instead of stdout")
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--cap", type=int, help="graph enumeration cap (also LOGDR_CAP)")

    common(sub.add_parser("graphs", help="enumerate stable graphs"), need_A=False)
    common(sub.add_parser("stability", help="default stability condition and certificates"), need_A=False)
    sd = sub.add_parser("subdivide", help="theta subdivision and its validation")
    common(sd)
    sd.add_argument("--graph", help="restrict to one graph: dollar, banana, or an index")
    va = sub.add_parser("validate", help="validate the subdivision and the functions on it")
    common(va)
    va.add_argument("--trunc", type=int, default=2)
    co = sub.add_parser("compute", help="compute a class")
    co.add_argument("what", choices=["logdr", "dr", "relations", "genus1", "ddr1"])
    common(co)
    co.add_argument("--trunc", type=int)
    co.add_argument("--h", type=int)
    co.add_argument("--theta-seed2", type=int)
    co.add_argument("--check-figure", choices=["logDR133"])
    co.add_argument("--a", type=int)
    co.add_argument("--b", type=int)
    return p


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    if ns.command is None:
        raise UsageError("a subcommand is required")
    cfg = RunConfig(ns.command)
    for key, val in vars(ns).items():
        if key != "command" and hasattr(cfg, key):
            setattr(cfg, key, val)
    if cfg.cap is not None:
        os.environ["LOGDR_CAP"] = str(cfg.cap)
    return cfg


# ---------------------------------------------------------------- helpers

def _theta(cfg: RunConfig, seed=None) -> StabilityCondition:
    if cfg.theta_b is not None and seed is None:
        if len(cfg.theta_b) != cfg.n:
            raise UsageError(f"--theta-b needs {cfg.n} entries")
        try:
            return StabilityCondition.affine(cfg.g, cfg.n, cfg.theta_a, cfg.theta_b)
        except StabilityError as e:
            raise UsageError(str(e)) from None
    try:
        return default_theta(cfg.g, cfg.n, cfg.theta_seed if seed is None else seed)
    except StabilityError as e:
        raise CertificateFailure(str(e)) from None


def _certified(theta):
    cert = nondegeneracy_certificate(theta)
    if not cert.ok:
        qs, D, subset = cert.witness
        raise CertificateFailure(f"theta is degenerate: multidegree {list(D)} on {qs.key()} fails on subset {list(subset)}")
    if not is_small(theta):
        raise CertificateFailure("theta is not small: multidegree 0 is unstable somewhere")
    return theta


class CertificateFailure(Exception):
    pass


class FigureMismatch(Exception):
    pass


class ValidationFailure(Exception):
    def __init__(self, payload):
        super().__init__("validation failed")
        self.payload = payload


def named_graph(name: str, g: int, n: int) -> StableGraph:
    graphs = enumerate_stable_graphs(g, n)
    if name.isdigit():
        i = int(name)
        if not 0 <= i < len(graphs):
            raise UsageError(f"graph index {i} out of range 0..{len(graphs) - 1}")
        return graphs[i]
    if n < 2:
        raise UsageError(f"named graph {name} needs two markings")
    rest = tuple(range(3, n + 1))
    if name == "dollar" and g == 2:
        G = StableGraph((0, 0), ((1,) + rest, (2,)), ((0, 1),) * 3, n)
    elif name == "banana" and g == 1:
        G = StableGraph((0, 0), ((1,) + rest, (2,)), ((0, 1),) * 2, n)
    else:
        raise UsageError(f"unknown graph {name} for genus {g}")
    return canonical(G)


def _emit(cfg: RunConfig, payload) -> None:
    text = json.dumps(payload, indent=1, sort_keys=False, ensure_ascii=False) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands

def cmd_graphs(cfg):
    cfg.check_type()
    graphs = enumerate_stable_graphs(cfg.g, cfg.n)
    return {"g": cfg.g, "n": cfg.n, "count": len(graphs),
            "graphs": [dict(G.to_json(), aut=automorphism_order(G)) for G in graphs]}


def cmd_stability(cfg):
    cfg.check_type()
    theta = _theta(cfg)
    cert = nondegeneracy_certificate(theta)
    return {"theta": theta.to_json(), "nondegenerate": cert.ok, "small": is_small(theta),
            "witness": None if cert.ok else {"graph": cert.witness[0].key().__repr__(),
                                             "D": list(cert.witness[1]), "subset": list(cert.witness[2] or ())}}


def cmd_subdivide(cfg):
    from .subdivision import theta_subdivision, validate_subdivision
    cfg.check_type()
    cfg.require("A")
    theta = _certified(_theta(cfg))
    graphs = [named_graph(cfg.graph, cfg.g, cfg.n)] if cfg.graph else None
    s = theta_subdivision(cfg.g, cfg.n, cfg.A, cfg.k, theta, graphs=graphs, jobs=cfg.jobs)
    rep = validate_subdivision(s, check_faces=graphs is None)
    payload = s.to_json()
    payload["counts"] = [{"graph": G.to_json(), "cones_by_dim": {str(d): c for d, c in sorted(s.counts(G).items())},
                          "new_rays": [list(d.cone.rays[0]) for d in s.rays(G)]} for G in s.graphs()]
    payload["validation"] = {"ok": rep.ok, "failures": [repr(f) for f in rep.failures[:20]]}
    if not rep.ok:
        raise ValidationFailure(payload)
    return payload


def cmd_validate(cfg):
    from .pixton import frak_L, frak_P
    from .ppoly import stacky_check
    from .subdivision import theta_subdivision, validate_subdivision
    cfg.check_type()
    cfg.require("A")
    theta = _certified(_theta(cfg))
    s = theta_subdivision(cfg.g, cfg.n, cfg.A, cfg.k, theta, jobs=cfg.jobs)
    rep = validate_subdivision(s)
    out = {"subdivision": {"ok": rep.ok, "failures": [repr(f) for f in rep.failures[:20]]}}
    if rep.ok:
        for name, f in (("P", frak_P(s, cfg.trunc or 2)), ("L", frak_L(s))):
            r = stacky_check(f)
            out[name] = {"ok": r.ok, "failures": [repr(x) for x in r.failures[:20]]}
    ok = all(v["ok"] for v in out.values())
    out["ok"] = ok
    if not ok:
        raise ValidationFailure(out)
    return out


def check_logdr133(cls) -> list[str]:
    """Mismatches between a degree-one class and the figure values."""
    from .pixton import taut_name
    problems = []
    taut = {taut_name(m): c for m, c in cls.taut_part().items()}
    if taut != FIGURE_LOGDR133["taut"]:
        problems.append(f"taut part {taut}")
    pp = cls.terms.get((0, 0, 0))
    if pp is None:
        return problems + ["no piecewise part"]
    for G, f in pp.per_graph.items():
        if G.num_edges == 2 and G.num_vertices == 2 and not any(u == v for u, v in G.edges):
            # subdivisions may refine the chambers y > 2x, x > 2y and the middle one
            outer = sorted(FIGURE_LOGDR133["banana_outer"], key=lambda s: s[0])
            for C, p in zip(f.cones, f.pieces):
                x, y = (sum(r[i] for r in C.rays) for i in (0, 1))
                want = outer[0] if y > 2 * x else outer[1] if x > 2 * y else FIGURE_LOGDR133["banana_middle"]
                got = (p.coefficient((1, 0)), p.coefficient((0, 1)))
                if got != want:
                    problems.append(f"banana slopes {got} on {C.rays}, expected {want}")
        if G.num_edges == 1 and G.h1 == 1:
            vals = {p.coefficient((1,)) for p in f.pieces}
            if vals != {FIGURE_LOGDR133["loop"]}:
                problems.append(f"loop coefficient {vals}")
    return problems


def cmd_compute(cfg):
    from . import genus1, pixton
    what = cfg.what
    if what == "ddr1":
        cfg.require("a", "b")
        strata = genus1.ddr_m12(cfg.a, cfg.b)
        coef = sum((s.coef for s in strata), Fraction(0))
        return {"a": cfg.a, "b": cfg.b, "strata": [s.to_json() for s in strata],
                "closed_form": fmt(genus1.ddr_closed_form(cfg.a, cfg.b)), "double_edge_coefficient": fmt(coef)}
    if what == "genus1":
        if cfg.g is None:
            cfg.g = 1
        if cfg.g != 1:
            raise UsageError("compute genus1 needs -g 1")
        cfg.check_type()
        cfg.require("A")
        return {"class": genus1.logdr_g1(cfg.n, cfg.A, cfg.k).to_json()}
    cfg.check_type()
    cfg.require("A")
    if what == "dr":
        return {"class": pixton.classical_dr_pp(cfg.g, cfg.n, cfg.A, cfg.k, cfg.trunc or cfg.g).degree_part(cfg.g).to_json()}
    theta = _certified(_theta(cfg))
    if what == "logdr":
        cls = pixton.p_theta_class(cfg.g, cfg.n, cfg.A, cfg.k, theta, trunc=cfg.trunc or cfg.g)
        deg = cls.degree_part(cfg.g)
        out = {"theta": theta.to_json(), "class": deg.to_json()}
        if cfg.check_figure == "logDR133":
            if (cfg.g, cfg.n, tuple(cfg.A), cfg.k) != (1, 2, (3, -3), 0):
                raise UsageError("--check-figure logDR133 needs -g 1 -n 2 -A 3,-3 -k 0")
            problems = check_logdr133(deg)
            out["figure"] = {"name": "logDR133", "ok": not problems, "problems": problems}
            if problems:
                raise FigureMismatch(json.dumps(out["figure"]))
        return out
    if what == "relations":
        theta2 = _certified(_theta(cfg, cfg.theta_seed2)) if cfg.theta_seed2 is not None else None
        if theta2 is None and cfg.h is None:
            raise UsageError("compute relations needs --h or --theta-seed2")
        rels = pixton.relation_classes(cfg.g, cfg.n, cfg.A, cfg.k, theta, theta2, cfg.h)
        return {"relations": [r.to_json() for r in rels]}
    raise UsageError(f"unknown computation {what}")


COMMANDS = {"graphs": cmd_graphs, "stability": cmd_stability, "subdivide": cmd_subdivide,
            "validate": cmd_validate, "compute": cmd_compute}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        _emit(cfg, COMMANDS[cfg.command](cfg))
        return EXIT_OK
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationFailure as e:
        _emit(cfg, e.payload)
        print("validation failed", file=sys.stderr)
        return EXIT_VALIDATION
    except CertificateFailure as e:
        print(f"certificate failure: {e}", file=sys.stderr)
        return EXIT_CERT
    except CapExceeded as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    except FigureMismatch as e:
        print(f"figure mismatch: {e}", file=sys.stderr)
        return EXIT_FIGURE
    except (StabilityError, GraphError, ArithmeticError, ValueError) as e:
        print(f"computation error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
