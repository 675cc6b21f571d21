"""Command-line entry point: ``gaussent {verify,sweep,probe,optimize,oracle-check}``.

Exit codes: 0 ok, 1 failed check, 2 usage or invalid input, 3 the probe found
an output ratio above the input ratio, 4 the channel leaves no entanglement.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import asdict, dataclass, field, fields

from .channels import beamsplitter_channel
from .core import squeeze_u
from .entanglement import EPS_Q
from .errors import ConvergenceError, DegenerateChannelError, DomainError
from .protocol import optimize_preprocessing, probe_channel, sweep_entanglement, u_grid
from .verification import ORACLE_SUITES, SUITES, run_suites

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_VIOLATION, EXIT_DEGENERATE = 0, 1, 2, 3, 4


@dataclass
class ChannelConfig:
    theta: float = math.pi / 6
    u3: float = 3.0
    b3: float = 1.0


@dataclass
class InputConfig:
    q_prime: list = field(default_factory=lambda: [2 / 3])
    q: float = 0.02
    qb: float = 0.5
    u2: float = 1.0


@dataclass
class GridConfig:
    u_min: float = 1.0
    u_max: float = 9.0
    step: float = 0.05


@dataclass
class RunConfig:
    """Parameters of one run; the defaults are the reference setting theta=pi/6, u3=3, b3=1, q'=2/3."""

    channel: ChannelConfig = field(default_factory=ChannelConfig)
    input: InputConfig = field(default_factory=InputConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    measure: str = "both"
    tol: float = 1e-4
    seed: int = 0
    cutoff: int = 40
    starts: int = 4

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        cfg = cls()
        sections = {"channel": ChannelConfig, "input": InputConfig, "grid": GridConfig}
        scalars = {f.name for f in fields(cls)} - set(sections)
        for key, value in d.items():
            if key in sections:
                if not isinstance(value, dict):
                    raise DomainError(f"config section {key!r} must be an object")
                allowed = {f.name for f in fields(sections[key])}
                for k, v in value.items():
                    if k not in allowed:
                        raise DomainError(f"unknown config key {key}.{k}")
                    setattr(getattr(cfg, key), k, v)
            elif key in scalars:
                setattr(cfg, key, value)
            else:
                raise DomainError(f"unknown config key {key!r}")
        qp = cfg.input.q_prime
        cfg.input.q_prime = [float(x) for x in (qp if isinstance(qp, list) else [qp])]
        cfg.validate()
        return cfg

    def validate(self) -> None:
        c, i, g = self.channel, self.input, self.grid
        if c.u3 <= 0 or c.b3 < 0.5:
            raise DomainError("channel needs u3 > 0 and b3 >= 1/2")
        if any(not 0 < q < 1 - EPS_Q for q in i.q_prime):
            raise DomainError(f"q_prime must lie in (0, 1 - {EPS_Q})")
        if not 0 < i.q < i.qb <= 1 - EPS_Q:
            raise DomainError("need 0 < q < qb <= 1 - eps")
        if i.u2 <= 0:
            raise DomainError("u2 must be positive")
        u_grid(g.u_min, g.u_max, g.step)
        if self.measure not in ("logneg", "geof", "both"):
            raise DomainError(f"unknown measure {self.measure!r}")
        if self.tol <= 0 or self.cutoff < 1 or self.starts < 2:
            raise DomainError("tol must be positive, cutoff >= 1 and starts >= 2")

    def geof_opts(self) -> dict:
        return {"starts": self.starts, "seed": self.seed}


_FLAG_TARGETS = {
    "theta": ("channel", "theta"), "u3": ("channel", "u3"), "b3": ("channel", "b3"),
    "qprime": ("input", "q_prime"), "q": ("input", "q"), "qb": ("input", "qb"), "u2": ("input", "u2"),
    "u_min": ("grid", "u_min"), "u_max": ("grid", "u_max"), "u_step": ("grid", "step"),
    "measure": (None, "measure"), "tol": (None, "tol"), "seed": (None, "seed"),
    "cutoff": (None, "cutoff"), "starts": (None, "starts"),
}


def load_config(args) -> RunConfig:
    """Config file first, then any flag given on the command line."""
    raw = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise DomainError("config document must be a JSON object")
    for flag, (section, key) in _FLAG_TARGETS.items():
        value = getattr(args, flag, None)
        if value is None:
            continue
        if section is None:
            raw[key] = value
        else:
            raw.setdefault(section, {})[key] = value
    return RunConfig.from_dict(raw)


def _fmt(x) -> str:
    return "" if x is None else f"{x:.9g}"


def _u_decimals(step: float) -> int:
    return max(2, -int(math.floor(math.log10(step) + 1e-12)))


def cmd_sweep(cfg: RunConfig, out) -> int:
    ch = beamsplitter_channel(cfg.channel.theta, cfg.channel.u3, cfg.channel.b3)
    measures = ("logneg", "geof") if cfg.measure == "both" else (cfg.measure,)
    q_prime = cfg.input.q_prime[0]
    res = sweep_entanglement(ch, q_prime, u_grid(cfg.grid.u_min, cfg.grid.u_max, cfg.grid.step),
                             measures, **cfg.geof_opts())
    for u, msg in res.failures:
        print(f"warning: geof did not converge at u2={u}: {msg}", file=sys.stderr)
    dec = _u_decimals(cfg.grid.step)
    out.write("u2,log_neg,geof\n")
    for u, ln, g in res.rows:
        out.write(f"{u:.{dec}f},{_fmt(ln)},{_fmt(g)}\n")
    names = {"logneg": "log_neg", "geof": "geof"}
    parts = [f"{names[m]}={'none' if res.argmax_u2[m] is None else format(res.argmax_u2[m], f'.{dec}f')}"
             for m in measures]
    out.write("# argmax u2: " + " ".join(parts) + "\n")
    if "geof" in measures and len(res.failures) == len(res.rows):
        return EXIT_FAIL
    return EXIT_OK


def cmd_probe(cfg: RunConfig, out) -> int:
    ch = beamsplitter_channel(cfg.channel.theta, cfg.channel.u3, cfg.channel.b3)
    measure = "geof" if cfg.measure == "both" else cfg.measure
    rep = probe_channel(ch, squeeze_u(cfg.input.u2), cfg.input.q, cfg.input.qb, cfg.tol, measure,
                        **(cfg.geof_opts() if measure == "geof" else {}))
    d = rep.to_dict()
    d["u2"] = cfg.input.u2
    d["channel"] = asdict(cfg.channel)
    out.write(json.dumps(d, sort_keys=True, indent=2) + "\n")
    return EXIT_VIOLATION if rep.verdict == "violation" else EXIT_OK


def cmd_optimize(cfg: RunConfig, out) -> int:
    ch = beamsplitter_channel(cfg.channel.theta, cfg.channel.u3, cfg.channel.b3)
    measures = ("logneg", "geof") if cfg.measure == "both" else (cfg.measure,)
    results = []
    for m in measures:
        opts = cfg.geof_opts() if m == "geof" else {}
        for qp in cfg.input.q_prime:
            V, E, trace = optimize_preprocessing(ch, qp, cfg.grid.u_min, cfg.grid.u_max, cfg.grid.step, m, **opts)
            k = 1 if m == "logneg" else 2
            results.append({
                "measure": m,
                "q_prime": qp,
                "u_star": V.params["u"],
                "E_star": E,
                "trace": [[r[0], r[k]] for r in trace.rows],
            })
    doc = {
        "channel": asdict(cfg.channel),
        "grid": asdict(cfg.grid),
        "results": results,
        "u_star_identical": len({r["u_star"] for r in results}) == 1,
    }
    out.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def _parse_suites(text: str):
    names = [s.strip() for s in text.split(",") if s.strip()]
    if names == ["all"]:
        return list(SUITES)
    bad = [n for n in names if n not in SUITES]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"unknown suite(s) {bad}; choose from all, {', '.join(SUITES)}")
    return names


def cmd_verify(suites, seed: int, cutoff: int, out) -> int:
    checks = run_suites(suites, seed=seed, cutoff=cutoff, stream=out)
    failed = [c for c in checks if not c.passed]
    out.write(f"{len(checks) - len(failed)}/{len(checks)} checks passed\n")
    return EXIT_FAIL if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gaussent", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", type=_parse_suites, default=list(SUITES),
                   help="comma-separated suites or 'all' (%s)" % ", ".join(SUITES))
    o = sub.add_parser("oracle-check", help="run the Fock-space oracle suites")
    for sp in (v, o):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--cutoff", type=int, default=40)
        sp.add_argument("--out")

    for name, hlp in (("sweep", "entanglement against u2 as CSV"),
                      ("probe", "two-state channel test as JSON"),
                      ("optimize", "best pre-squeezing u2 as JSON")):
        sp = sub.add_parser(name, help=hlp)
        sp.add_argument("--config", help="JSON run configuration; flags override it")
        sp.add_argument("--theta", type=float)
        sp.add_argument("--u3", type=float)
        sp.add_argument("--b3", type=float)
        sp.add_argument("--qprime", type=float, nargs="+" if name == "optimize" else None)
        sp.add_argument("--q", type=float)
        sp.add_argument("--qb", type=float)
        sp.add_argument("--u2", type=float, help="pre-squeezing used by probe")
        sp.add_argument("--u-min", dest="u_min", type=float)
        sp.add_argument("--u-max", dest="u_max", type=float)
        sp.add_argument("--u-step", dest="u_step", type=float)
        sp.add_argument("--measure", choices=("logneg", "geof", "both"))
        sp.add_argument("--tol", type=float)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--cutoff", type=int)
        sp.add_argument("--starts", type=int)
        sp.add_argument("--out")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = open(args.out, "w", newline="") if getattr(args, "out", None) else sys.stdout
    try:
        if args.command == "verify":
            return cmd_verify(args.suite, args.seed, args.cutoff, out)
        if args.command == "oracle-check":
            return cmd_verify(list(ORACLE_SUITES), args.seed, args.cutoff, out)
        cfg = load_config(args)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return {"sweep": cmd_sweep, "probe": cmd_probe, "optimize": cmd_optimize}[args.command](cfg, out)
    except DegenerateChannelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (DomainError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
