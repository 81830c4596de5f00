"""Command-line front end: analyze, construct, dixon, oracle, render."""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import constructions
from .errors import InputError, QuadnetsError, SearchExhausted
from .forms import Net, fraction_to_json
from .index import (
    check_e2_patterns,
    chi_Lplus,
    e2_table,
    filtration,
    index_map,
    index_orientation,
    predict_b0,
    verify_axioms,
)
from .polys import TernaryForm
from .spectral import NONSINGULAR, certify_nonsingular, spectral_form
from .topology.curve import curve_topology, lift_to_sphere, nest_queries

VERDICTS = ("consistent", "inconsistent", "not-checked")


def load_schema(name: str) -> dict:
    from importlib.resources import files

    return json.loads(files("quadnets").joinpath("schemas", f"{name}.schema.json").read_text())


def _verdict(ok) -> str:
    if ok is None:
        return "not-checked"
    return "consistent" if ok else "inconsistent"


def _tolerances(pairs):
    from .oracle.components import Tolerances

    tol = Tolerances()
    for item in pairs or ():
        key, _, value = item.partition("=")
        if not hasattr(tol, key):
            raise InputError(f"unknown tolerance {key!r}")
        try:
            setattr(tol, key, float(value))
        except ValueError as exc:
            raise InputError(f"tolerance {key} needs a number, got {value!r}") from exc
    return tol


def bound_table(N: int) -> dict:
    """Known bounds on the number of components of a regular intersection of three quadrics in RP^N."""
    d = N + 1
    out = {"N": N, "spectral_degree": d}
    if d >= 4:
        lower = constructions.hilbert_target(d) if d <= constructions.HILBERT_CAP else None
        upper = constructions.petrovsky_bound(d)
        out["o_max_lower_from_hilbert"] = lower
        out["o_max_upper_petrovsky"] = fraction_to_json(upper)
        out["MAX_lower"] = lower
        out["MAX_upper"] = fraction_to_json(upper + 1)
    out["asymptotic_lower"] = fraction_to_json(Fraction((N - 1) * (N + 5), 4) - 2)
    return out


@dataclass
class AnalysisReport:
    net: dict
    spectral: dict
    topology: dict | None = None
    index: dict | None = None
    filtration: list | None = None
    e2: list | None = None
    prediction: dict | None = None
    orientation: dict | None = None
    oracle: dict | None = None
    verdicts: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "kind": "analysis",
            "net": self.net,
            "spectral": self.spectral,
            "topology": self.topology,
            "index": self.index,
            "filtration": self.filtration,
            "e2": self.e2,
            "prediction": self.prediction,
            "orientation": self.orientation,
            "oracle": self.oracle,
            "verdicts": self.verdicts,
            "bounds": self.bounds,
        }


def run_oracle_for_net(net: Net, seed: int = 0, tolerances=None) -> dict | None:
    """Ground truth for V = {q_0 = q_1 = q_2 = 0} of a net, where one is available."""
    from .oracle import count_components, euler_complement
    from .oracle.kronecker import kronecker_parity
    from .oracle.zerodim import solve_zero_dim

    N = net.N
    if N == 2:
        res = kronecker_parity(net)
        return {"kind": "kronecker", "parity": res.parity, "detail": res.to_json()}
    if N == 3:
        sol = solve_zero_dim(net.matrices_float(), seed=seed)
        return {"kind": "points", "count": sol.count, "chi_complement": euler_complement(3, 3, sol.count),
                "detail": sol.to_json(dump_points=False)}
    if N == 4:
        res = count_components(list(net.members), seed=seed, tolerances=tolerances)
        return {"kind": "curve", "count": res.count, "chi_complement": euler_complement(4, 3, 0),
                "detail": res.to_json()}
    return None


def analyze_net(net: Net, seed: int = 0, oracle: bool = True, tolerances=None) -> AnalysisReport:
    if net.r != 2:
        raise InputError(f"analysis expects a net (three members), got r = {net.r}")
    U = spectral_form(net, seed)
    cert = certify_nonsingular(U)
    rep = AnalysisReport(net.to_json(), {"form": U.to_json(), "certificate": cert}, bounds=bound_table(net.N))
    if cert != NONSINGULAR:
        from .errors import SingularInput

        raise SingularInput(f"spectral curve is not certified nonsingular ({cert})", stage="spectral")
    topo = curve_topology(U)
    arr = lift_to_sphere(topo, U)
    imap = index_map(net, arr)
    axioms = verify_axioms(imap, arr, net, strict=False)
    filt = filtration(imap, arr)
    e2 = e2_table(filt, imap.i_max)
    pred = predict_b0(imap, arr, topo, filt, e2)
    orient = index_orientation(imap, arr)
    rep.topology = dict(topo.to_json(), nest_queries=nest_queries(topo))
    rep.index = dict(imap.to_json(), attained=imap.attained(), axioms=axioms.to_json())
    rep.filtration = filt.to_json()
    rep.e2 = e2.to_json()
    rep.prediction = pred.to_json()
    rep.orientation = orient.to_json()
    v = {"axioms": _verdict(axioms.ok), "e2_patterns": _verdict(check_e2_patterns(e2)),
         "orientation": _verdict(orient.consistent), "prediction_vs_oracle": _verdict(None),
         "euler": _verdict(None), "kronecker": _verdict(None), "empty_oval_law": _verdict(None)}
    if oracle:
        res = run_oracle_for_net(net, seed, tolerances)
        rep.oracle = res
        if res is not None and "count" in res:
            v["prediction_vs_oracle"] = _verdict(pred.contains(res["count"]))
            v["euler"] = _verdict(chi_Lplus(e2) == res["chi_complement"])
        if res is not None and res["kind"] == "kronecker":
            # odd parity forces every member to be indefinite
            v["kronecker"] = _verdict(res["parity"] == 0 or set(imap.attained()) <= {1, 2})
        if net.N == 3:
            from .oracle.laws import empty_oval_law_check

            law = empty_oval_law_check(net, seed)
            rep.oracle["empty_oval_law"] = law.to_json()
            v["empty_oval_law"] = _verdict(law.holds)
    rep.verdicts = v
    return rep


# --- rendering ---------------------------------------------------------------

def _hemisphere_grid(n: int = 241):
    u = np.linspace(-1, 1, n)
    U, V = np.meshgrid(u, u)
    R = U ** 2 + V ** 2
    inside = R <= 1
    W = np.sqrt(np.clip(1 - R, 0, None))
    return U, V, W, inside


def _index_field(mats, X):
    Q = np.einsum("hwi,ijk->hwjk", X, mats)
    ev = np.linalg.eigvalsh(Q)
    scale = np.abs(ev).max(axis=-1, keepdims=True)
    ind = (ev < 0).sum(axis=-1)
    det = np.prod(ev / scale, axis=-1)
    return ind, det


def render_svg(obj, path) -> None:
    """Two orthographic hemisphere panels; the lower panel shows -x at the position of x."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.patches import Patch

    matplotlib.rcParams["svg.hashsalt"] = "quadnets"
    U, V, W, inside = _hemisphere_grid()
    fig, axes = plt.subplots(1, 2, figsize=(9, 4.6))
    if isinstance(obj, Net):
        mats = obj.matrices_float()
        labels = list(range(obj.N + 2))
        title = f"index of q_x, N = {obj.N}"
    else:
        mats = None
        labels = [-1, 1]
        title = f"sign of U, degree {obj.d}"
    cmap = plt.get_cmap("viridis", len(labels))
    for ax, s, name in zip(axes, (1, -1), ("x2 > 0", "antipodes, x2 < 0")):
        X = s * np.stack([U, V, W], axis=-1)
        if mats is not None:
            val, det = _index_field(mats, X)
        else:
            from .polys import eval_float

            det = np.vectorize(lambda a, b, c: eval_float(obj, (a, b, c)))(X[..., 0], X[..., 1], X[..., 2])
            val = np.where(det > 0, 1, -1)
        img = np.where(inside, np.searchsorted(labels, val), np.nan)
        ax.imshow(img, origin="lower", extent=(-1, 1, -1, 1), cmap=cmap, vmin=-0.5, vmax=len(labels) - 0.5,
                  interpolation="nearest")
        ax.contour(U, V, np.where(inside, det, np.nan), levels=[0.0], colors="black", linewidths=1.2)
        ax.add_patch(plt.Circle((0, 0), 1, fill=False, color="gray", lw=0.8))
        ax.set_title(name)
        ax.set_aspect("equal")
        ax.axis("off")
    handles = [Patch(color=cmap(i), label=(f"ind = {v}" if mats is not None else ("U > 0" if v > 0 else "U < 0")))
               for i, v in enumerate(labels)]
    fig.legend(handles=handles, loc="lower center", ncol=len(labels), frameon=False)
    fig.suptitle(f"{title}; equal positions in the two panels are antipodal points")
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


# --- commands ----------------------------------------------------------------

def _load_object(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    if "matrices" in data:
        return Net.from_json(data)
    if "coeffs" in data:
        return TernaryForm.from_json(data)
    if data.get("kind") == "harnack":
        return Net.from_json({"N": data["N"], "r": len(data["members"]) - 1, "matrices": data["members"]})
    if data.get("kind") == "hilbert":
        return TernaryForm.from_json(data["form"])
    raise InputError(f"{path}: neither a net nor a form description")


def _load_net(path) -> Net:
    obj = _load_object(path)
    if not isinstance(obj, Net):
        raise InputError(f"{path}: expected a net of quadrics")
    return obj


def _emit(payload: dict, path) -> None:
    text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> dict:
    net = _load_net(args.path)
    rep = analyze_net(net, args.seed, args.oracle == "on", _tolerances(args.tolerance)).to_json()
    if args.svg_out:
        render_svg(net, args.svg_out)
    return rep


def cmd_construct(args) -> dict:
    floor = Fraction(args.epsilon_floor) if args.epsilon_floor else None
    if args.kind == "hilbert":
        if args.degree is None:
            raise InputError("hilbert needs --degree")
        kw = {"floor": floor} if floor else {}
        out = constructions.hilbert_curve(args.degree, **kw).to_json()
    else:
        if args.dimension is None:
            raise InputError("harnack needs --dimension")
        kw = {"floor": floor} if floor else {}
        rec = constructions.harnack_intersection(args.dimension, seed=args.seed, **kw)
        out = rec.to_json()
    if args.artifact_out:
        obj = out["form"] if args.kind == "hilbert" else {
            "N": out["N"], "r": len(out["members"]) - 1, "matrices": out["members"]}
        _emit(obj, args.artifact_out)
    return out


def cmd_dixon(args) -> dict:
    from .dixon import verify_roundtrip

    return verify_roundtrip(_load_net(args.path), args.seed).to_json()


def cmd_oracle(args) -> dict:
    from .oracle import count_components
    from .oracle.zerodim import solve_zero_dim

    net = _load_net(args.path)
    N, k = net.N, net.r + 1
    tol = _tolerances(args.tolerance)
    if N == 2 and k == 3:
        return run_oracle_for_net(net, args.seed, tol)
    if k == N - 1:
        res = count_components(list(net.members), seed=args.seed, method=args.method, tolerances=tol)
        return res.to_json()
    if k == N:
        return solve_zero_dim(net.matrices_float(), seed=args.seed).to_json()
    raise InputError(f"{k} quadrics in P^{N}: the oracle handles curves (N-1 quadrics) and points (N)")


def cmd_render(args) -> dict:
    obj = _load_object(args.path)
    out = args.svg_out or "render.svg"
    render_svg(obj, out)
    return {"kind": "render", "svg": out}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quadnets", description="Topology of nets of real quadrics")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, tol=False):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--json-out")
        if tol:
            sp.add_argument("--tolerance", action="append", metavar="KEY=VALUE",
                            help="oracle tolerance override, e.g. residual=1e-9")

    a = sub.add_parser("analyze", help="full pipeline on a net file")
    a.add_argument("path")
    common(a, tol=True)
    a.add_argument("--svg-out")
    a.add_argument("--oracle", choices=("on", "off"), default="on")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("construct", help="Hilbert curves and Harnack-type intersections")
    c.add_argument("kind", choices=("hilbert", "harnack"))
    c.add_argument("--degree", type=int)
    c.add_argument("--dimension", type=int)
    c.add_argument("--epsilon-floor", help="rational floor for the halving search, e.g. 1/2^64 given as 2**-64")
    c.add_argument("--artifact-out", help="write the constructed form or system here")
    common(c)
    c.set_defaults(func=cmd_construct)

    d = sub.add_parser("dixon", help="determinantal roundtrip on a net file")
    d.add_argument("path")
    common(d)
    d.set_defaults(func=cmd_dixon)

    o = sub.add_parser("oracle", help="count real components of an intersection of quadrics")
    o.add_argument("path")
    o.add_argument("--method", choices=("auto", "tower", "tracking"), default="auto")
    common(o, tol=True)
    o.set_defaults(func=cmd_oracle)

    r = sub.add_parser("render", help="SVG of the index map or of a curve")
    r.add_argument("path")
    r.add_argument("--svg-out")
    common(r)
    r.set_defaults(func=cmd_render)
    return p


def _parse_floor(text: str) -> str:
    text = text.strip()
    if text.startswith("2**"):
        return str(Fraction(2) ** int(text[3:]))
    return text


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "epsilon_floor", None):
        try:
            args.epsilon_floor = _parse_floor(args.epsilon_floor)
            Fraction(args.epsilon_floor)
        except (ValueError, ZeroDivisionError):
            print(f"quadnets: error: bad --epsilon-floor {args.epsilon_floor!r}", file=sys.stderr)
            return 2
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            payload = args.func(args)
        if caught:
            payload = dict(payload, warnings=sorted({str(w.message) for w in caught}))
        _emit(payload, args.json_out)
    except SearchExhausted as exc:
        print(f"quadnets: search exhausted: {exc}", file=sys.stderr)
        return exc.exit_code
    except QuadnetsError as exc:
        print(f"quadnets: {exc.stage}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
