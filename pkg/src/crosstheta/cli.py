"""Command-line client for the crosstheta service.

Every subcommand serializes its inputs into the service's request schema
and POSTs it; by default the service app runs in-process (no network), and
--server points the same client at a remote instance.  `crosstheta serve`
starts the HTTP service itself.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction

import httpx

from . import __version__
from .errors import CrossthetaError
from .lattices import load_lattice
from .service.schemas import LatticeModel

EXIT_USAGE = 2


def _post_request(server: str | None, endpoint: str, payload: dict) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            return client.post(endpoint, json=payload)
    # in-process: drive the ASGI app directly, no network involved
    import asyncio

    from .service.app import app

    async def go() -> httpx.Response:
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, timeout=None,
                                     base_url="http://crosstheta.local") as client:
            return await client.post(endpoint, json=payload)

    return asyncio.run(go())


def _lattice_payload(path: str) -> dict:
    try:
        lat = load_lattice(path)
    except FileNotFoundError:
        raise SystemExit(_usage_error(f"lattice file not found: {path}"))
    except CrossthetaError as exc:
        raise SystemExit(_usage_error(f"bad lattice file {path}: {exc}"))
    return LatticeModel.from_lattice(lat).model_dump()


def _usage_error(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return EXIT_USAGE


def _post(args, endpoint: str, payload: dict) -> dict:
    resp = _post_request(args.server, endpoint, payload)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        raise SystemExit(_usage_error(f"{endpoint} failed: {detail}"))
    return resp.json()


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return h.hexdigest()


def _write_output(args, text: str, input_paths: list[str]) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        manifest = {
            "subcommand": args.command,
            "version": __version__,
            "seed": getattr(args, "seed", None),
            "flags": {k: v for k, v in vars(args).items()
                      if k not in ("command", "func") and v is not None},
            "inputs": {p: _sha256(p) for p in input_paths},
        }
        with open(args.out + ".manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _parse_range(spec: str) -> list[float]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise SystemExit(_usage_error(f"bad range '{spec}', expected lo:hi:step"))
    lo, hi, step = (float(p) for p in parts)
    if step <= 0:
        raise SystemExit(_usage_error("range step must be positive"))
    out = []
    x = lo
    while x <= hi + 1e-12:
        out.append(round(x, 12))
        x += step
    return out


# -- subcommand handlers


def cmd_theta(args) -> int:
    payload = {"lattice": _lattice_payload(args.lattice), "order": args.order,
               "rational": args.rational}
    data = _post(args, "/theta", payload)
    if args.format == "json":
        text = json.dumps(data, indent=2) + "\n"
    else:
        lines = []
        if data.get("rational_form"):
            lines.append(f"# theta = {data['rational_form']}")
        lines.append("exponent,coefficient")
        for term in data["terms"]:
            lines.append(f"{_fmt(Fraction(term['exponent']))},{term['coefficient']}")
        text = "\n".join(lines) + "\n"
    _write_output(args, text, [args.lattice])
    return 0


def cmd_svp(args) -> int:
    payload = {"lattice": _lattice_payload(args.lattice), "norm": args.norm,
               "report": args.report}
    data = _post(args, "/svp", payload)
    _write_output(args, json.dumps(data, indent=2) + "\n", [args.lattice])
    return 0


def cmd_bounds(args) -> int:
    payload = {
        "lattice_b": _lattice_payload(args.lattice_b),
        "lattice_e": _lattice_payload(args.lattice_e),
        "gamma_db": _parse_range(args.gamma_db_range),
        "check_identities": args.check,
    }
    data = _post(args, "/bounds", payload)
    if args.format == "json":
        text = json.dumps(data, indent=2) + "\n"
    else:
        lines = ["gamma_db,F_exact,G_upper,Pce_bound,Peb_bound"]
        for row in data["rows"]:
            lines.append(",".join(_fmt(row[k]) for k in
                                  ("gamma_db", "F_exact", "G_upper",
                                   "Pce_bound", "Peb_bound")))
        text = "\n".join(lines) + "\n"
    _write_output(args, text, [args.lattice_b, args.lattice_e])
    return 0


def cmd_pack(args) -> int:
    payload = {
        "dim": args.dim, "coeff_cap": args.coeff_cap, "half_box": args.half_box,
        "multistarts": args.multistarts, "count_target": args.count_target,
        "seed": args.seed, "keep": args.keep, "threads": args.threads,
    }
    data = _post(args, "/pack", payload)
    _write_output(args, json.dumps(data, indent=2) + "\n", [])
    return 0


def cmd_simulate(args) -> int:
    latb, late = args.code
    payload = {
        "lattice_b": _lattice_payload(latb),
        "lattice_e": _lattice_payload(late),
        "pam": args.pam,
        "snr_db": _parse_range(args.snr_db),
        "rounds": args.rounds,
        "seed": args.seed,
        "who": args.who,
        "snr_definition": args.snr_definition,
        "threads": args.threads,
    }
    data = _post(args, "/simulate", payload)
    if args.format == "json":
        text = json.dumps(data, indent=2) + "\n"
    else:
        lines = ["snr_db,estimate,ci_halfwidth"]
        for db, est, ci in zip(data["snr_db"], data["estimates"],
                               data["ci_halfwidths"]):
            lines.append(f"{_fmt(db)},{_fmt(est)},{_fmt(ci)}")
        text = "\n".join(lines) + "\n"
    _write_output(args, text, [latb, late])
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crosstheta",
        description="L1 theta series, cross-polytope packings, wiretap bounds")
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--server", help="URL of a running service (default: in-process)")
    common.add_argument("--out", help="output file (manifest written alongside)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theta", parents=[common],
                       help="closed-form L1 theta series of a lattice")
    p.add_argument("--lattice", required=True, help="lattice file (JSON or text)")
    p.add_argument("--order", type=int, default=8, help="truncation order in q")
    p.add_argument("--rational", action="store_true",
                   help="include the exact rational-function form")
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("svp", parents=[common],
                       help="L1 shortest vector and packing report")
    p.add_argument("--lattice", required=True)
    p.add_argument("--norm", choices=("l1",), default="l1")
    p.add_argument("--report", action="store_true", default=True)
    p.set_defaults(func=cmd_svp)

    p = sub.add_parser("bounds", parents=[common],
                       help="decoding-probability bound curves")
    p.add_argument("--lattice-b", required=True, dest="lattice_b")
    p.add_argument("--lattice-e", required=True, dest="lattice_e")
    p.add_argument("--gamma-db-range", required=True, dest="gamma_db_range",
                   help="lo:hi:step in dB")
    p.add_argument("--check", action="store_true",
                   help="assert dual-route identities at every point")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("pack", parents=[common],
                       help="search locally critical cross-polytope packings")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--coeff-cap", type=int, default=2, dest="coeff_cap")
    p.add_argument("--half-box", action="store_true", dest="half_box",
                   help="restrict basis entries to |B_ij| <= 1/2")
    p.add_argument("--multistarts", type=int, default=3)
    p.add_argument("--count-target", type=int, default=40, dest="count_target")
    p.add_argument("--keep", type=int, default=10)
    p.set_defaults(func=cmd_pack)  # output is always JSON

    p = sub.add_parser("simulate", parents=[common],
                       help="Monte Carlo wiretap simulation")
    p.add_argument("--code", nargs=2, required=True,
                   metavar=("LATTICE_B", "LATTICE_E"),
                   help="coarse and fine lattice files")
    p.add_argument("--pam", type=int, required=True)
    p.add_argument("--snr-db", required=True, dest="snr_db", help="lo:hi:step")
    p.add_argument("--rounds", type=int, default=100000)
    p.add_argument("--who", choices=("eve", "bob"), default="eve")
    p.add_argument("--snr-definition", choices=("gamma", "es_n0"),
                   default="gamma", dest="snr_definition",
                   help="dB axis: channel gamma or received per-dimension SNR")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
