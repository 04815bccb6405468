"""``owlab`` command-line interface.

Exit status: 0 on success, 1 for a malformed configuration, 2 for domain
errors raised by the library, 3 when a work budget is exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from .boundary import Ratio, alpha, boundary, interior
from .dynamics import (MarkovSpec, SftSpec, bernoulli_entropy_h, builtin_sft, markov_entropy_h,
                       pattern_count, sft_entropy_h)
from .errors import DomainError, ResourceError
from .filling import compute_n0, filling_theorem_run, greedy_filling
from .folner import builtin_folner, folner_report
from .semigroup import FinSubset, Semigroup, parse_semigroup
from .subadditive import (SetFunction, cardinality_h, command_h, inverse_max_h, ow_certificate,
                          ow_estimate)

log = logging.getLogger("owlab")

COMMANDS = ("boundary", "alpha", "folner-report", "fill", "tile", "ow", "entropy", "certify")


class ConfigError(Exception):
    pass


# ---- grammars ------------------------------------------------------------------

def _vector(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad integer vector {text!r}") from exc


def parse_set(text: str, sg: Optional[Semigroup] = None) -> FinSubset:
    """``box:<lo>:<hi>`` (half-open) or ``list:<path.json>`` / ``list:[...]``.

    With ``sg`` given, every element is validated against it.
    """
    A = _read_set(text)
    return sg.check_set(A) if sg is not None else A


def _read_set(text: str) -> FinSubset:
    kind, _, rest = text.partition(":")
    if kind == "box":
        lo, sep, hi = rest.partition(":")
        if not sep:
            raise ConfigError(f"box needs two corners: {text!r}")
        lo, hi = _vector(lo), _vector(hi)
        if len(lo) != len(hi):
            raise ConfigError(f"box corners differ in dimension: {text!r}")
        return FinSubset.box(lo, hi)
    if kind == "list":
        try:
            raw = json.loads(rest) if rest.lstrip().startswith("[") else json.loads(Path(rest).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read element list {rest!r}: {exc}") from exc
        return FinSubset(raw)
    raise ConfigError(f"unknown set {text!r}; expected box:<lo>:<hi> or list:<path.json>")


def parse_h(text: str, sg: Semigroup, M: Optional[float] = None) -> SetFunction:
    kind, _, arg = text.partition(":")
    if kind == "card":
        return cardinality_h(Fraction(arg or 1), sg)
    if kind == "invmax":
        return inverse_max_h(sg)
    if kind == "sft":
        sft = builtin_sft(arg, sg.dim) if arg in ("full2", "golden", "hardsq") else SftSpec.from_json(arg)
        return sft_entropy_h(sft, sg)
    if kind == "bernoulli":
        return bernoulli_entropy_h([Fraction(p) for p in arg.split(",")], sg)
    if kind == "markov":
        return markov_entropy_h(MarkovSpec.from_json(arg), sg)
    if kind == "cmd":
        if M is None:
            raise ConfigError("--M (singleton bound) is required with cmd:<program>")
        return command_h(arg, M, sg)
    raise ConfigError(f"unknown set function {text!r}")


def render(x) -> str:
    """Rationals as num/den, reals with 12 significant digits."""
    if isinstance(x, Ratio):
        return str(x)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return f"{float(x):.12g}"


def _jsonable(x):
    if isinstance(x, (Fraction, Ratio)):
        return render(x)
    if isinstance(x, float):
        return float(render(x))
    return x


# ---- configuration -------------------------------------------------------------

@dataclass
class JobConfig:
    command: str
    semigroup: str = "zd:1"
    params: dict = field(default_factory=dict)
    output: Optional[str] = None
    format: str = "json"

    def to_dict(self) -> dict:
        return {"command": self.command, "semigroup": self.semigroup, "params": dict(self.params),
                "output": self.output, "format": self.format}

    @classmethod
    def from_dict(cls, data: dict) -> "JobConfig":
        if data.get("command") not in COMMANDS:
            raise ConfigError(f"command: expected one of {', '.join(COMMANDS)}, got {data.get('command')!r}")
        return cls(data["command"], data.get("semigroup", "zd:1"), dict(data.get("params", {})),
                   data.get("output"), data.get("format", "json"))

    def to_argv(self) -> List[str]:
        argv = [self.command, "--semigroup", self.semigroup, "--format", self.format]
        if self.output:
            argv += ["--out", self.output]
        for key in sorted(self.params):
            value = self.params[key]
            flag = "--" + key.replace("_", "-")
            if isinstance(value, list):
                for v in value:
                    argv += [flag, str(v)]
            elif value is not None:
                argv += [flag, str(value)]
        return argv

    @classmethod
    def from_argv(cls, argv: List[str]) -> "JobConfig":
        ns = build_parser().parse_args(argv)
        return cls.from_namespace(ns)

    @classmethod
    def from_namespace(cls, ns) -> "JobConfig":
        skip = {"command", "semigroup", "out", "format", "config", "verbose"}
        params = {k: v for k, v in vars(ns).items() if k not in skip and v is not None}
        fmt = ns.format or ("csv" if ns.command in ("folner-report", "ow", "entropy") else "json")
        return cls(ns.command, ns.semigroup, params, ns.out, fmt)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="owlab", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON job file {command, semigroup, params, output, format}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command")

    def add(name, help_text, csv_doc=None):
        sp = sub.add_parser(name, help=help_text, description=help_text + (f" CSV columns: {csv_doc}." if csv_doc else ""))
        sp.add_argument("--semigroup", default="zd:1", help="zd:<d>, nat:<d>, heis or table:<path.json>")
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default=None)
        sp.add_argument("--jobs", type=int, help="worker threads for independent rows")
        return sp

    for name in ("boundary", "alpha"):
        sp = add(name, f"right K-{'interior and boundary' if name == 'boundary' else 'amenability constant'} of a finite set")
        sp.add_argument("--set", required=True)
        sp.add_argument("--K", required=True)

    sp = add("folner-report", "alpha(F_n, K) and the worst left defect along a builtin Følner sequence",
             "n,card,alpha_num,alpha_den,max_defect_num,max_defect_den")
    sp.add_argument("--kind", default="boxes")
    sp.add_argument("--K", required=True)
    sp.add_argument("--indices", required=True, help="comma-separated indices")

    sp = add("fill", "greedy (eps, K)-filling pattern of Omega")
    sp.add_argument("--omega", required=True)
    sp.add_argument("--K", required=True)
    sp.add_argument("--eps", required=True)

    sp = add("tile", "run the n-step filling process on D")
    sp.add_argument("--D", required=True)
    sp.add_argument("--K", action="append", help="tile K_j, repeated in order j = 1..n")
    sp.add_argument("--n", type=int, help="number of tiles; without --K, nested boxes F_{2^j}")
    sp.add_argument("--eps", required=True)
    sp.add_argument("--mode", choices=("strict", "best-effort", "best_effort"), default="best-effort")

    for name, doc in (("ow", "n,card,h,ratio"), ("entropy", "n,card,count,h,ratio")):
        sp = add(name, "ratios h(F_n)/|F_n| along a Følner sequence", doc)
        sp.add_argument("--folner", default="boxes")
        sp.add_argument("--max", type=int, required=True)
        sp.add_argument("--window", type=int, default=5)
        sp.add_argument("--start", type=int, default=1)
        sp.add_argument("--summary", help="write the JSON summary here instead of stderr")
        if name == "ow":
            sp.add_argument("--h", required=True,
                            help="card:<c>, invmax, sft:<name|path>, bernoulli:<p,...>, markov:<path>, cmd:<program>")
            sp.add_argument("--M", type=float, help="singleton bound for cmd: functions")
        else:
            sp.add_argument("--sft", required=True, help="full2, golden, hardsq or a JSON path")

    sp = add("certify", "evaluate the inequality chain bounding h(D)/|D| on a tiling")
    sp.add_argument("--h", required=True)
    sp.add_argument("--M", type=float)
    sp.add_argument("--D", required=True)
    sp.add_argument("--K", action="append", required=True)
    sp.add_argument("--eps", required=True)
    sp.add_argument("--mode", choices=("strict", "best-effort", "best_effort"), default="best-effort")
    sp.add_argument("--lambda", "--lambda-hat", dest="lambda_hat", type=float, help="limit estimate; else estimated")
    sp.add_argument("--folner", default="boxes")
    sp.add_argument("--max", type=int, default=30)
    sp.add_argument("--window", type=int, default=5)
    return p


# ---- commands ------------------------------------------------------------------

def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _rows(cfg: JobConfig, header, rows) -> str:
    if cfg.format == "json":
        return _json([dict(zip(header, r)) for r in rows])
    return _csv(header, rows)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, default=_jsonable) + "\n"


def _eps(p: dict) -> Fraction:
    try:
        return Fraction(p["eps"])
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"--eps: expected a rational such as 1/2, got {p['eps']!r}") from exc


def _tiles(cfg: JobConfig, sg: Semigroup) -> List[FinSubset]:
    p = cfg.params
    if p.get("K"):
        Ks = [parse_set(k, sg) for k in p["K"]]
        if p.get("n") is not None and p["n"] != len(Ks):
            raise ConfigError(f"--n {p['n']} does not match the {len(Ks)} --K tiles")
        return Ks
    if p.get("n") is None:
        raise ConfigError("tile needs --K tiles or --n")
    seq = builtin_folner(sg, "boxes")
    return [seq(2 ** j) for j in range(1, p["n"] + 1)]


def execute(cfg: JobConfig) -> tuple:
    """Run a job; returns (main text, optional summary text)."""
    sg = parse_semigroup(cfg.semigroup)
    p = cfg.params
    c = cfg.command
    if cfg.format == "csv" and c not in ("folner-report", "ow", "entropy"):
        raise ConfigError(f"{c} emits JSON only")
    if c in ("boundary", "alpha"):
        A, K = parse_set(p["set"], sg), parse_set(p["K"], sg)
        a = alpha(sg, A, K)
        if c == "alpha":
            return _json({"alpha": a.to_json()}), None
        return _json({"interior": interior(sg, A, K).to_json(), "boundary": boundary(sg, A, K).to_json(),
                      "alpha": a.to_json()}), None
    if c == "folner-report":
        seq = builtin_folner(sg, p.get("kind", "boxes"))
        idx = [int(i) for i in str(p["indices"]).split(",")]
        rows = folner_report(seq, parse_set(p["K"], sg), idx)
        data = [(r.n, r.card, r.alpha.num, r.alpha.den, r.max_defect.num, r.max_defect.den) for r in rows]
        return _rows(cfg, ["n", "card", "alpha_num", "alpha_den", "max_defect_num", "max_defect_den"], data), None
    if c == "fill":
        pat = greedy_filling(sg, parse_set(p["omega"], sg), parse_set(p["K"], sg), _eps(p))
        out = pat.to_json()
        out["guarantee"] = render(pat.guarantee(sg))
        return _json(out), None
    if c == "tile":
        eps = _eps(p)
        mode = p.get("mode", "best-effort").replace("-", "_")
        if mode == "strict" and p.get("n") is not None and not p.get("K"):
            n0 = compute_n0(eps)
            if p["n"] < n0:
                raise DomainError(f"strict mode needs n >= n0({eps}) = {n0}, got n = {p['n']}")
        res = filling_theorem_run(sg, parse_set(p["D"], sg), _tiles(cfg, sg), eps, mode)
        return _json(res.to_json()), None
    if c in ("ow", "entropy"):
        if c == "ow":
            h = parse_h(p["h"], sg, p.get("M"))
        else:
            sg, sft = _entropy_setup(cfg, sg)
            h = sft_entropy_h(sft, sg)
        seq = builtin_folner(sg, p.get("folner", "boxes"))
        est = ow_estimate(h, seq, p["max"], p.get("window", 5), p.get("start", 1), p.get("jobs") or 1)
        if c == "ow":
            text = _rows(cfg, ["n", "card", "h", "ratio"],
                        [(r.n, r.card, render(r.h), render(r.ratio)) for r in est.rows])
        else:
            text = _rows(cfg, ["n", "card", "count", "h", "ratio"],
                        [(r.n, r.card, pattern_count(sft, seq(r.n)), render(r.h), render(r.ratio))
                         for r in est.rows])
        summary = _json({"lambda_hat": render(est.lambda_hat), "cauchy_gap": render(est.cauchy_gap),
                         "window": est.window, "warnings": est.warnings})
        return text, summary
    if c == "certify":
        h = parse_h(p["h"], sg, p.get("M"))
        eps = _eps(p)
        lam = p.get("lambda_hat")
        if lam is None:
            seq = builtin_folner(sg, p.get("folner", "boxes"))
            lam = ow_estimate(h, seq, p.get("max", 30), p.get("window", 5)).lambda_hat
        res = filling_theorem_run(sg, parse_set(p["D"], sg), [parse_set(k, sg) for k in p["K"]], eps,
                                  p.get("mode", "best-effort"))
        cert = ow_certificate(h, res, lam, eps)
        return _json(cert.to_json()), None
    raise ConfigError(f"unknown command {c!r}")


def _entropy_setup(cfg: JobConfig, sg: Semigroup):
    """The SFT and the lattice it is counted on; the default zd:1 follows the SFT's dimension."""
    name = cfg.params["sft"]
    if name in ("full2", "golden", "hardsq"):
        sft = builtin_sft(name, None if name != "full2" else sg.dim)
    else:
        sft = SftSpec.from_json(name)
    if sft.dim != sg.dim:
        if cfg.semigroup != "zd:1":
            raise DomainError(f"{sft.name} lives on Z^{sft.dim}, not on {cfg.semigroup}")
        sg = parse_semigroup(f"zd:{sft.dim}")
    return sg, sft


def run(cfg: JobConfig) -> int:
    text, summary = execute(cfg)
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    if summary is not None:
        target = cfg.params.get("summary") or (cfg.output + ".summary.json" if cfg.output else None)
        if target:
            Path(target).write_text(summary)
        else:
            sys.stderr.write(summary)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        ns = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING)
        if ns.config:
            # route the file through the parser so it is validated exactly like argv
            cfg = JobConfig.from_dict(json.loads(Path(ns.config).read_text()))
            cfg = JobConfig.from_argv(cfg.to_argv())
        elif ns.command is None:
            raise ConfigError("no command given; see owlab --help")
        else:
            cfg = JobConfig.from_namespace(ns)
        return run(cfg)
    except ConfigError as exc:
        sys.stderr.write(f"owlab: configuration error: {exc}\n")
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"owlab: configuration error: {exc}\n")
        return 1
    except ResourceError as exc:
        sys.stderr.write(f"owlab: resource error: {exc}\n")
        return 3
    except DomainError as exc:
        sys.stderr.write(f"owlab: {exc}\n")
        return 2
    except (ValueError, KeyError) as exc:
        sys.stderr.write(f"owlab: configuration error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
