"""Command-line interface: ``symdisc <subcommand> ...``.

Exit codes: 0 success, 1 solver failure (or a failed verification), 2 bad
configuration.  ``SYMDISC_LOG`` sets the log level (e.g. ``DEBUG``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import baselines, cgu, coherent, gu, ykl
from .errors import (
    BudgetExceeded,
    NonInvariantGroup,
    SymdiscError,
    UnsupportedRepresentation,
)
from .symmetry import (
    PermutationGroup,
    characters_from_rep,
    double_coset_char_sum,
    double_cosets,
    gram_automorphism_group,
    group_from_spec,
    is_gram_invariant,
    orbits,
)

log = logging.getLogger("symdisc")

EXIT_OK, EXIT_SOLVER, EXIT_CONFIG = 0, 1, 2
CONSTELLATIONS = ("ppm", "ppm2", "pcppm", "ternary", "bpsk")
SWEEP_RECEIVERS = {
    "ppm": ("mpe", "pnr"),
    "ppm2": ("mpe", "pnr"),
    "pcppm": ("mpe", "hom", "structured"),
}


class ConfigError(ValueError):
    pass


# -- classification ---------------------------------------------------------------------


@dataclass
class Classification:
    kind: str  # "GU", "CGU" or "asymmetric"
    n_orbits: int
    orbit_sizes: list
    group_order: int
    group: PermutationGroup

    def __str__(self):
        return f"CGU({self.n_orbits} orbits)" if self.kind == "CGU" else self.kind

    def to_json(self) -> dict:
        return {
            "class": self.kind,
            "label": str(self),
            "orbits": self.n_orbits,
            "orbit_sizes": self.orbit_sizes,
            "group_order": self.group_order,
            "group_kind": self.group.kind,
        }


def resolve_group(g, spec: str = "auto") -> PermutationGroup:
    """Group named by ``spec``, checked against the Gram matrix ``g``; ``auto`` computes its automorphisms."""
    n = g.shape[0]
    if spec == "auto":
        return gram_automorphism_group(g)
    G = group_from_spec(spec, n)
    for s in G.generators:
        if not is_gram_invariant(g, s, 1e-10):
            raise NonInvariantGroup(f"{spec} does not preserve the Gram matrix")
    return G


def classify(cb, group: str = "auto") -> Classification:
    """GU when the group is transitive, CGU when it has several orbits of equal size, asymmetric otherwise."""
    g = coherent.gram(cb) if isinstance(cb, coherent.Codebook) else np.asarray(cb)
    G = resolve_group(g, group)
    orbs = orbits(G)
    sizes = sorted((len(o) for o in orbs), reverse=True)
    if len(orbs) == 1:
        kind = "GU"
    elif len(set(sizes)) == 1:
        kind = "CGU"
    else:
        kind = "asymmetric"
    return Classification(kind, len(orbs), sizes, G.order, G)


# -- codebooks ----------------------------------------------------------------------------


def parse_grid(text: str) -> np.ndarray:
    try:
        a, b, steps = text.split(":")
        a, b, steps = float(a), float(b), int(steps)
    except ValueError:
        raise ConfigError(f"bad grid {text!r}; expected start:stop:steps") from None
    if a > b or steps < 1 or a < 0:
        raise ConfigError(f"bad grid {text!r}; need 0 <= start <= stop and steps >= 1")
    return np.linspace(a, b, steps) if steps > 1 else np.array([a])


def codebook_from_args(args) -> coherent.Codebook:
    if (args.codebook is None) == (args.constellation is None):
        raise ConfigError("give exactly one of --codebook FILE or --constellation NAME")
    if args.codebook is not None:
        try:
            return coherent.load_codebook(args.codebook)
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise ConfigError(f"cannot read codebook {args.codebook}: {exc}") from None
    if args.nbar < 0:
        raise ConfigError("--nbar must be non-negative")
    alpha = math.sqrt(args.nbar)
    name = args.constellation
    if name == "ppm":
        return coherent.ppm_codebook(args.N, alpha)
    if name == "ppm2":
        return coherent.two_pulse_ppm_codebook(args.N, alpha)
    if name == "pcppm":
        beta = -alpha if args.beta is None else complex(args.beta)
        return coherent.pcppm_codebook(args.N, alpha, beta)
    if name == "ternary":
        return coherent.ternary_codebook(alpha)
    if name == "bpsk":
        if (args.code is None) == (args.rm is None):
            raise ConfigError("bpsk needs exactly one of --code FILE or --rm r,m")
        if args.code is not None:
            code = coherent.BinaryLinearCode.from_file(args.code)
        else:
            try:
                r, m = (int(x) for x in args.rm.split(","))
            except ValueError:
                raise ConfigError(f"bad --rm {args.rm!r}; expected r,m") from None
            code = coherent.rm_code(r, m)
        return coherent.bpsk_codebook(code, alpha)
    raise ConfigError(f"unknown constellation {name!r}")


# -- solving ----------------------------------------------------------------------------


def solve(cb: coherent.Codebook, method: str = "auto", group: str = "auto") -> ykl.MeasurementSolution:
    if method == "pgm":
        return gu.pgm(cb)
    g = coherent.gram(cb)
    if method == "auto":
        cls = classify(g, group)
        log.info("classified as %s (group order %d)", cls, cls.group_order)
        if cls.kind == "GU":
            try:
                return gu.gu_measurement(cb, cls.group)
            except UnsupportedRepresentation:
                log.info("no representation data for this group; using the PGM, optimal for GU sets")
                return gu.pgm(cb)
        if cls.kind == "CGU":
            try:
                return cgu.solve_blocks_ykl(cgu.block_reduce(coherent.weighted_gram(cb), cls.group), cb.priors)
            except UnsupportedRepresentation:
                log.info("block reduction unavailable; solving with the pair-orbit pattern")
        return cgu.symmetry_reduced_solve(g, cgu.SymmetryPattern.from_group(cls.group), cb.priors)
    G = resolve_group(g, group)
    if method == "gu":
        return gu.gu_measurement(cb, G)
    if method == "cgu":
        return cgu.solve_blocks_ykl(cgu.block_reduce(coherent.weighted_gram(cb), G), cb.priors)
    if method == "reduced":
        return cgu.symmetry_reduced_solve(g, cgu.SymmetryPattern.from_group(G), cb.priors)
    raise ConfigError(f"unknown method {method!r}")


# -- sweeps ---------------------------------------------------------------------------------


def _pcppm_mpe_pe(N, nbar):
    if nbar == 0:
        return (2 * N - 1) / (2 * N)
    a = math.sqrt(nbar)
    return 1 - cgu.pcppm_mpe_ps(N, a, -a)


def sweep_point(constellation: str, N: int, receivers: tuple, nbar: float) -> list[float]:
    """Error probabilities of ``receivers`` for one constellation at one ``nbar``."""
    table = {
        ("ppm", "mpe"): lambda: gu.ppm_mpe_pe(N, nbar),
        ("ppm", "pnr"): lambda: baselines.ppm_pnr_pe(N, nbar),
        ("ppm2", "mpe"): lambda: 1 - gu.two_pulse_ppm_mpe_ps(N, nbar),
        ("ppm2", "pnr"): lambda: 1 - baselines.two_pulse_pnr_ps(N, nbar),
        ("pcppm", "mpe"): lambda: _pcppm_mpe_pe(N, nbar),
        ("pcppm", "hom"): lambda: 1 - baselines.pcppm_homodyne_ps(N, nbar),
        ("pcppm", "structured"): lambda: baselines.pcppm_structured_pe(N, nbar),
    }
    return [table[(constellation, r)]() for r in receivers]


def sweep_csv(constellation: str, N: int, receivers, grid, jobs: int | None = None) -> str:
    receivers = tuple(receivers)
    allowed = SWEEP_RECEIVERS.get(constellation)
    if allowed is None:
        raise ConfigError(f"sweeps support {sorted(SWEEP_RECEIVERS)}, not {constellation!r}")
    bad = [r for r in receivers if r not in allowed]
    if bad or not receivers:
        raise ConfigError(f"receivers for {constellation} must be among {','.join(allowed)}; got {bad or 'none'}")
    args = [(constellation, N, receivers, float(x)) for x in grid]
    if jobs == 1 or len(args) == 1:
        rows = [sweep_point(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(sweep_point, *zip(*args)))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["nbar", *receivers])
    for (_, _, _, x), row in zip(args, rows):
        writer.writerow(["%.12g" % x] + ["%.12g" % v for v in row])
    return buf.getvalue()


def write_atomic(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, output) -> None:
    if output:
        write_atomic(output, text)
    else:
        sys.stdout.write(text)


# -- subcommands -----------------------------------------------------------------------------


def _complex_rows(a):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(a, complex)]


def cmd_gram(args):
    cb = codebook_from_args(args)
    g = coherent.weighted_gram(cb) if args.weighted else coherent.gram(cb)
    _emit(json.dumps({"n": len(cb), "weighted": args.weighted, "gram": _complex_rows(g)}) + "\n", args.output)
    return EXIT_OK


def cmd_classify(args):
    cls = classify(codebook_from_args(args), args.group)
    _emit(json.dumps(cls.to_json()) + "\n", args.output)
    return EXIT_OK


def cmd_solve(args):
    sol = solve(codebook_from_args(args), args.method, args.group)
    if args.format == "csv":
        text = "state,P_correct\n" + "".join(f"{i},{sol.conditionals[i, i]:.12g}\n" for i in range(len(sol.priors)))
        text += f"P_e,{sol.P_e:.12g}\nP_s,{sol.P_s:.12g}\n"
    else:
        text = json.dumps(sol.to_json(), default=_json_default) + "\n"
    _emit(text, args.output)
    return EXIT_OK


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)


def cmd_verify(args):
    cb = codebook_from_args(args)
    try:
        sol = ykl.load_solution(args.solution)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ConfigError(f"cannot read solution {args.solution}: {exc}") from None
    if sol.X.shape != (len(cb), len(cb)):
        raise ConfigError(f"solution is {sol.X.shape[0]}-dimensional but the codebook has {len(cb)} states")
    report = ykl.verify(cb, sol, args.tol)
    _emit(json.dumps(report.to_json()) + "\n", args.output)
    return EXIT_OK if report.passed else EXIT_SOLVER


def _fmt_complex(z, digits=12):
    z = complex(z)
    re = 0.0 if abs(z.real) < 1e-13 else z.real
    im = 0.0 if abs(z.imag) < 1e-13 else z.imag
    return f"{re:.{digits}g}", f"{im:.{digits}g}"


def cmd_characters(args):
    G = group_from_spec(args.group)
    rep = characters_from_rep(G)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["section", "irrep", "dim", "multiplicity", "key", "re", "im"])
    G0 = G.stabilizer(args.base)
    for c in double_cosets(G, G0):
        key = " ".join(map(str, c.representative))
        for lab in rep.labels:
            w.writerow(["double_coset", lab, rep.dims[lab], rep.multiplicities[lab], key,
                        *_fmt_complex(double_coset_char_sum(rep, lab, c, G0))])
    if args.elements:
        for k, g in enumerate(G.elements):
            key = " ".join(map(str, g))
            for lab in rep.labels:
                w.writerow(["character", lab, rep.dims[lab], rep.multiplicities[lab], key,
                            *_fmt_complex(rep.characters[lab][k])])
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


def cmd_sweep(args):
    grid = parse_grid(args.nbar_grid)
    receivers = [r.strip() for r in args.receivers.split(",") if r.strip()]
    _emit(sweep_csv(args.constellation, args.N, receivers, grid, args.jobs), args.output)
    return EXIT_OK


def cmd_fig1(args):
    an = cgu.find_fig1_subcode(args.nbar)
    code = an.code
    out = {
        "nbar": an.nbar,
        "generators": ["".join(map(str, row)) for row in code.generators],
        "codewords": ["".join(map(str, w)) for w in code.codewords],
        "distance_row": an.distance_matrix[0].tolist(),
        "amplitude_row": np.real_if_close(an.solution.amplitudes[0]).real.tolist(),
        "row_values": an.row_values.tolist(),
        "matched": an.matched,
        "automorphism_order": an.automorphism_order,
        "pattern_classes": an.pattern.n_classes,
        "distinct_values_per_row": an.distinct_values_per_row,
        "distinct_distances_per_row": an.distinct_distances_per_row,
        "split_distances": an.split_distances,
        "coarse_pattern": an.coarse_pattern_error,
        "P_e": an.solution.P_e,
    }
    _emit(json.dumps(out, indent=1, default=_json_default) + "\n", args.output)
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------------------


def _add_codebook_args(p):
    p.add_argument("--codebook", help="codebook JSON file")
    p.add_argument("--constellation", choices=CONSTELLATIONS, help="builtin constellation")
    p.add_argument("--N", type=int, default=8, help="slots (ppm, ppm2, pcppm)")
    p.add_argument("--nbar", type=float, default=1.0, help="mean photon number per pulse (|alpha|^2)")
    p.add_argument("--beta", help="second pcppm amplitude as a Python complex literal (default -alpha)")
    p.add_argument("--code", help="bpsk: file with one generator row per line")
    p.add_argument("--rm", help="bpsk: Reed-Muller code r,m")


def _add_output(p):
    p.add_argument("--output", "-o", help="write here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symdisc", description="Optimal measurements for symmetric coherent-state codebooks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gram", help="print the Gram matrix as JSON")
    _add_codebook_args(p)
    p.add_argument("--weighted", action="store_true", help="include prior weights")
    _add_output(p)
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("classify", help="GU / CGU / asymmetric")
    _add_codebook_args(p)
    p.add_argument("--group", default="auto")
    _add_output(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("solve", help="compute the optimal measurement")
    _add_codebook_args(p)
    p.add_argument("--method", choices=("auto", "pgm", "gu", "cgu", "reduced"), default="auto")
    p.add_argument("--group", default="auto", help="cyclic:N, two-orbit-cyclic:N, sn-pairs:N or auto")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    _add_output(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a solution against the optimality conditions")
    _add_codebook_args(p)
    p.add_argument("--solution", required=True)
    p.add_argument("--tol", type=float, default=ykl.DEFAULT_TOL)
    _add_output(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("characters", help="character and double-coset sums as CSV")
    p.add_argument("--group", required=True)
    p.add_argument("--base", type=int, default=0, help="point whose stabilizer defines the double cosets")
    p.add_argument("--elements", action="store_true", help="also list characters on every group element")
    _add_output(p)
    p.set_defaults(func=cmd_characters)

    p = sub.add_parser("sweep", help="error probability versus nbar as CSV")
    p.add_argument("--constellation", choices=sorted(SWEEP_RECEIVERS), required=True)
    p.add_argument("--N", type=int, default=8)
    p.add_argument("--receivers", default="mpe")
    p.add_argument("--nbar-grid", default="0:10:101")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    _add_output(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fig1", help="find and solve the [8,3,2] BPSK subcode example")
    p.add_argument("--nbar", type=float, default=cgu.FIG1_NBAR)
    _add_output(p)
    p.set_defaults(func=cmd_fig1)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("SYMDISC_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, NonInvariantGroup, UnsupportedRepresentation, BudgetExceeded, FileNotFoundError) as exc:
        print(f"symdisc: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SymdiscError as exc:
        print(f"symdisc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"symdisc: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
