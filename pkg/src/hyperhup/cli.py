"""Command-line front end: builds crosses and fixtures, runs the operator
property suite, certificates and constructions, and emits JSON reports plus
CSV/PNG plot data.

Exit codes: 0 pass, 1 property/construction failure, 2 input error,
3 inconclusive, 4 infeasible regime.
"""

from __future__ import annotations

import argparse
import json
import os
import sys


def _cap_threads():
    cap = os.environ.get("HYPERHUP_THREADS")
    if cap:
        for var in (
            "OMP_NUM_THREADS",
            "OPENBLAS_NUM_THREADS",
            "MKL_NUM_THREADS",
            "NUMEXPR_NUM_THREADS",
        ):
            os.environ.setdefault(var, cap)


def _load_config(path):
    if not path:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise ValueError("config must be a JSON object")
        return cfg
    except (OSError, ValueError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        raise SystemExit(2)


def _setting(args, cfg, name, default):
    val = getattr(args, name, None)
    if val is not None:
        return val
    return cfg.get(name, default)


def _write_json(path, payload):
    if path:
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, default=_json_default)
        print(f"wrote {path}")
    else:
        json.dump(payload, sys.stdout, indent=2, default=_json_default)
        print()


def _json_default(obj):
    import numpy as np

    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    raise TypeError(f"not serializable: {type(obj)}")


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in row) + "\n")
    print(f"wrote {path}")


def _figures_enabled(args, cfg):
    return bool(_setting(args, cfg, "figures", True)) and not getattr(
        args, "no_figures", False
    )


def _save_figure(fig, out_base, name):
    path = f"{out_base}.{name}.png"
    fig.savefig(path, dpi=130, bbox_inches="tight")
    print(f"wrote {path}")


def _parse_cross(spec_str, cfg, window):
    from .lattice import CrossSpec, RealSequence, make_cross

    src = spec_str or cfg.get("cross")
    if src is None:
        raise SystemExit(2)
    if isinstance(src, dict):
        return CrossSpec.from_json_dict(src)
    if os.path.exists(src):
        with open(src) as fh:
            return CrossSpec.from_json_dict(json.load(fh))
    try:
        parts = [float(p) for p in src.split(":")]
        alpha, beta = parts[0], parts[1]
        theta = parts[2] if len(parts) > 2 else 0.0
    except (ValueError, IndexError):
        print(f"error: cannot parse cross spec {src!r}", file=sys.stderr)
        raise SystemExit(2)
    return make_cross(alpha, beta, theta, window=window)


def _load_psi(source, grid):
    import numpy as np

    from .grid import GridFunction, hermite_fixture
    from .counterexample import poisson_counterexample

    if source is None or source == "gaussian":
        return GridFunction.from_callable(grid, lambda t: np.exp(-np.pi * t * t / 2))
    if source == "zero":
        return GridFunction(grid, np.zeros(grid.point_count, dtype=complex))
    if source.startswith("hermite:"):
        return hermite_fixture(int(source.split(":")[1]), grid)
    if source.startswith("poisson:"):
        _, a, b = source.split(":")
        psi, _ = poisson_counterexample(float(a), float(b), grid=grid)
        return psi
    if os.path.exists(source):
        with open(source) as fh:
            return GridFunction.from_json_dict(json.load(fh))
    print(f"error: cannot parse density source {source!r}", file=sys.stderr)
    raise SystemExit(2)


def _make_grid(args, cfg, default_L=32.0, default_n=2**12):
    from .grid import Grid

    L = float(_setting(args, cfg, "grid_L", default_L))
    n = int(_setting(args, cfg, "grid_n", default_n))
    try:
        return Grid(L, n)
    except ValueError as exc:
        print(f"error: bad grid: {exc}", file=sys.stderr)
        raise SystemExit(2)


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify_t(args):
    import numpy as np

    from .grid import (
        GridFunction,
        bump_fixture,
        gauss_bump_fixture,
        hermite_fixture,
        weighted_norms,
    )
    from .transforms import op_T

    cfg = _load_config(args.config)
    grid = _make_grid(args, cfg)
    tols = {
        "involution": 1e-5,
        "isometry_inv_weight": 1e-4,
        "isometry_l2": 1e-4,
        "support_flip": 1e-6,
        "agreement": 1e-5,
    }
    tols.update(cfg.get("tolerances", {}))
    t = grid.points
    y = np.sqrt(0.44) / 1.2
    hatp = lambda z, x: (np.pi / np.sqrt(2)) * np.exp(
        -1j * np.pi * z.real * x - np.pi * z.imag * np.abs(x)
    )
    z1, z2 = 1 / 1.2 + 1j * y, -1 / 1.2 + 1j * y
    fixtures = {
        "hermite1": hermite_fixture(1, grid),
        "hermite2": hermite_fixture(2, grid),
        "hermite3": hermite_fixture(3, grid),
        "gbump+": gauss_bump_fixture(grid, 2.0, 1.0),
        "gbump-": gauss_bump_fixture(grid, -2.5, 1.2),
        "poisson": GridFunction(grid, hatp(z1, t) - hatp(z2, t)),
    }
    report = {"grid": {"L": grid.half_length, "n": grid.point_count}, "fixtures": {}}
    all_pass = True
    m16 = np.abs(t) <= min(16.0, grid.half_length / 2)
    for name, theta in fixtures.items():
        entry = {}
        Th = op_T(theta, "hankel")
        Tc = op_T(theta, "compose")
        Tr = op_T(theta, "radial4")
        sup = max(Th.max_abs(), 1e-300)
        agree = max(
            float(np.max(np.abs(Tc.values - Th.values)[m16])),
            float(np.max(np.abs(Tr.values - Th.values)[m16])),
            float(np.max(np.abs(Tc.values - Tr.values)[m16])),
        ) / sup
        TT = op_T(Th, "hankel", tol_zero=1e-4)
        invol = float(np.max(np.abs(TT.values - theta.values))) / max(
            theta.max_abs(), 1e-300
        )
        n_t = weighted_norms(theta)
        n_T = weighted_norms(Th)
        iso1 = abs(n_T.l2_inv_weight - n_t.l2_inv_weight) / max(
            n_t.l2_inv_weight, 1e-300
        )
        iso2 = abs(n_T.l2 - n_t.h1_semi / np.pi) / max(n_T.l2, 1e-300)
        entry.update(
            {
                "agreement": agree,
                "involution": invol,
                "isometry_inv_weight": iso1,
                "isometry_l2": iso2,
            }
        )
        entry["pass"] = bool(
            agree <= tols["agreement"]
            and invol <= tols["involution"]
            and iso1 <= tols["isometry_inv_weight"]
            and iso2 <= tols["isometry_l2"]
        )
        all_pass &= entry["pass"]
        report["fixtures"][name] = entry
    bump = bump_fixture(grid, 2.0, 1.0)
    flips = {}
    for meth in ("hankel", "compose", "radial4"):
        Tb = op_T(bump, meth)
        leak = float(np.max(np.abs(Tb.values[t > 0]))) / max(Tb.max_abs(), 1e-300)
        flips[meth] = leak
        lim = 0.0 if meth in ("hankel", "radial4") else tols["support_flip"]
        all_pass &= leak <= max(lim, tols["support_flip"])
    report["support_flip_leak"] = flips
    report["l2_isometry_constant"] = "1/pi"
    report["pass"] = bool(all_pass)
    _write_json(args.output, report)
    if _figures_enabled(args, cfg) and args.output:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(7, 4))
        names = list(report["fixtures"])
        for key in ("agreement", "involution", "isometry_inv_weight", "isometry_l2"):
            ax.semilogy(
                names, [report["fixtures"][n][key] for n in names], "o-", label=key
            )
        ax.axhline(1e-5, color="k", ls="--", lw=0.8)
        ax.set_ylabel("relative error")
        ax.legend(fontsize=8)
        ax.set_title("restriction-operator property suite")
        fig.autofmt_xdate()
        _save_figure(fig, os.path.splitext(args.output)[0], "properties")
    return 0 if all_pass else 1


def cmd_certify(args):
    import numpy as np

    from .certify import critical_structure, subcritical_chain
    from .lattice import gap_stats
    from .transforms import fourier_pi

    cfg = _load_config(args.config)
    grid = _make_grid(args, cfg, default_n=2**13)
    cross = _parse_cross(args.cross, cfg, int(_setting(args, cfg, "window", 24)))
    psi = _load_psi(args.psi, grid)
    report = {"cross": cross.to_json_dict()}
    cert = subcritical_chain(psi, cross)
    report["certificate"] = cert.to_json_dict()
    sup_gap = gap_stats(cross.A)["sup"]
    if abs(sup_gap - 1.0) <= 1e-9 and cert.res_A <= 1e-6:
        theta = fourier_pi(psi)
        fit = critical_structure(theta, cross.A)
        report["critical_structure"] = {
            "alternation_defect": fit.alternation_defect,
            "correlation_min": float(np.min(fit.correlations)),
            "reconstruction_error": fit.reconstruction_error,
            "l2_sum": fit.l2_sum,
        }
    _write_json(args.output, report)
    if _figures_enabled(args, cfg) and args.output:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        theta = fourier_pi(psi)
        fig, ax = plt.subplots(figsize=(7, 3.2))
        t = grid.points
        m = np.abs(t) <= 16
        ax.plot(t[m], theta.values.real[m], lw=0.8, label="transform")
        a_in = cross.A.values[np.abs(cross.A.values) <= 16]
        ax.plot(a_in, np.zeros_like(a_in), "k.", ms=4, label="cross points")
        ax.set_title(f"verdict: {cert.verdict}")
        ax.legend(fontsize=8)
        _save_figure(fig, os.path.splitext(args.output)[0], "certificate")
    if cert.verdict == "vanishing_violated":
        return 1 if args.expect_uniqueness else 0
    if cert.verdict == "inconclusive":
        return 3
    return 0


def cmd_construct(args):
    import numpy as np

    from .counterexample import (
        ConstructionMachinery,
        FitError,
        InfeasibleError,
        banach_solve,
    )
    from .grid import weighted_norms
    from .lattice import RealSequence, gap_stats

    cfg = _load_config(args.config)
    window = int(_setting(args, cfg, "window", 48))
    try:
        if args.A and args.B:
            A = RealSequence(np.asarray(json.loads(args.A), float))
            B = RealSequence(np.asarray(json.loads(args.B), float))
        else:
            cross = _parse_cross(args.cross, cfg, window)
            A = RealSequence(cross.A.values[cross.A.values != 0.0])
            B = RealSequence(cross.B.values[cross.B.values != 0.0])
    except ValueError as exc:
        print(f"error: bad sequence: {exc}", file=sys.stderr)
        return 2
    for name, seq in (("A", A), ("B", B)):
        stats = gap_stats(seq)
        if stats["liminf_tail"] <= 1.0 + 1e-12:
            print(
                f"error: liminf gap estimate of {name} is {stats['liminf_tail']:.6g} <= 1; "
                "no integrable witness exists in this regime (consecutive gaps "
                "must exceed one)",
                file=sys.stderr,
            )
            return 4
    try:
        kwargs = {}
        for key in ("density", "gamma", "s_param"):
            v = _setting(args, cfg, key, None)
            if v is not None:
                kwargs[key] = float(v)
        mach = ConstructionMachinery(A, B, **kwargs)
        result = banach_solve(
            A,
            B,
            L_cutoff=_setting(args, cfg, "L_cutoff", None),
            tol=float(_setting(args, cfg, "tol", 1e-8)),
            machinery=mach,
        )
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 4
    except FitError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return 4 if "degenerate" in str(exc) else 1
    payload = result.to_json_dict()
    payload["psi_l2"] = weighted_norms(result.psi).l2
    _write_json(args.output, payload)
    if _figures_enabled(args, cfg) and args.output:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, axes = plt.subplots(1, 3, figsize=(12, 3.2))
        t = result.psi.grid.points
        m = np.abs(t) <= min(40, result.psi.grid.half_length)
        axes[0].plot(t[m], result.psi.values.real[m], lw=0.7)
        axes[0].set_title("witness density (real part)")
        F = result.F_plus.values + result.F_minus.values
        axes[1].plot(t[m], F.real[m], lw=0.7)
        axes[1].plot(A.values, np.zeros(len(A.values)), "k.", ms=3)
        axes[1].set_title("transform, zeros on A")
        axes[2].semilogy(result.contraction_history, "o-")
        axes[2].set_title(f"contraction (factor {result.contraction_factor:.3f})")
        _save_figure(fig, os.path.splitext(args.output)[0], "witness")
    ok = (
        result.contraction_factor <= 0.5
        and result.residual_A <= 1e-5
        and result.residual_B <= 1e-5
    )
    return 0 if ok else 1


def cmd_poisson(args):
    from .counterexample import InfeasibleError, poisson_counterexample
    from .grid import weighted_norms
    from .transforms import extension_E

    import numpy as np

    cfg = _load_config(args.config)
    try:
        psi, params = poisson_counterexample(args.alpha, args.beta)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 4
    n_side = 25
    pts = [(args.alpha * k, 0.0) for k in range(-n_side, n_side + 1)]
    pts += [(0.0, args.beta * k) for k in range(-n_side, n_side + 1) if k != 0]
    vals = extension_E(psi, pts)
    probe = extension_E(psi, [(x, 0.0) for x in np.linspace(0, 3, 31)])
    sup = float(np.max(np.abs(probe)))
    res = float(np.max(np.abs(vals))) / sup
    payload = {
        "psi": psi.to_json_dict(),
        "params": {k: v for k, v in params.items() if k != "pullback_centers"},
        "cross_points": len(pts),
        "cross_residual": res,
        "extension_sup": sup,
        "psi_l2": weighted_norms(psi).l2,
    }
    _write_json(args.output, payload)
    return 0 if res <= 1e-8 else 1


def cmd_annulus(args):
    from .certify import annulus_poincare

    cfg = _load_config(args.config)
    a_list = cfg.get("a_values", [0.5, 1.0, 2.0])
    ratio_list = cfg.get("ratio_values", [1.1, 2.0, 5.0])
    d_list = cfg.get("d_values", [2, 3, 4, 5, 6])
    rows = []
    all_pass = True
    for a in a_list:
        for ratio in ratio_list:
            for d in d_list:
                out = annulus_poincare(a, a * ratio, d)
                rows.append(
                    (a, a * ratio, d, out["C_computed"], out["C_bound"], out["pass"])
                )
                all_pass &= out["pass"]
    if args.csv:
        _write_csv(args.csv, ["a", "b", "d", "C_computed", "C_bound", "pass"], rows)
    _write_json(args.output, {"rows": rows, "pass": all_pass})
    if _figures_enabled(args, cfg) and args.csv:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        import numpy as np

        fig, ax = plt.subplots(figsize=(6, 4))
        arr = np.array([r[:5] for r in rows], dtype=float)
        for d in sorted(set(arr[:, 2])):
            m = arr[:, 2] == d
            ax.plot(arr[m, 1] / arr[m, 0], arr[m, 3] / arr[m, 4], "o", label=f"d={int(d)}")
        ax.axhline(1.0, color="k", ls="--", lw=0.8)
        ax.set_xlabel("b/a")
        ax.set_ylabel("C_computed / C_bound")
        ax.legend(fontsize=8)
        _save_figure(fig, os.path.splitext(args.csv)[0], "annulus")
    return 0 if all_pass else 1


def cmd_kg(args):
    import numpy as np

    from .grid import Grid
    from .transforms import build_extension, kg_residual

    cfg = _load_config(args.config)
    grid = _make_grid(args, cfg, default_L=32.0, default_n=2**13)
    psi = _load_psi(args.psi, grid)
    n0 = int(_setting(args, cfg, "box_n", 64))
    box = float(_setting(args, cfg, "box_extent", 4.0))
    residuals = []
    for n in (n0, 2 * n0):
        xg = Grid(box, n)
        ext = build_extension(psi, xg, xg)
        residuals.append(kg_residual(ext))
    ratio = residuals[0] / residuals[1]
    payload = {
        "residual_coarse": residuals[0],
        "residual_fine": residuals[1],
        "refinement_ratio": ratio,
    }
    _write_json(args.output, payload)
    if args.csv:
        xg = Grid(box, n0)
        ext = build_extension(psi, xg, xg)
        _write_csv(args.csv, ["x", "y", "re", "im"], list(ext.to_csv_rows()))
        if _figures_enabled(args, cfg):
            import matplotlib

            matplotlib.use("Agg")
            import matplotlib.pyplot as plt

            fig, ax = plt.subplots(figsize=(5, 4))
            im = ax.imshow(
                ext.values.real.T,
                origin="lower",
                extent=(-box, box, -box, box),
                cmap="RdBu",
            )
            fig.colorbar(im, ax=ax)
            ax.set_title("extension (real part)")
            _save_figure(fig, os.path.splitext(args.csv)[0], "extension")
    return 0 if residuals[1] <= residuals[0] else 1


def cmd_onesided(args):
    import numpy as np

    from .certify import one_sided_probe
    from .lattice import RealSequence

    cfg = _load_config(args.config)
    grid = _make_grid(args, cfg)
    psi = _load_psi(args.psi, grid)
    alpha = float(_setting(args, cfg, "alpha", 0.9))
    beta = float(_setting(args, cfg, "beta", 0.9))
    n_pts = int(_setting(args, cfg, "points", 12))
    A = RealSequence(alpha * np.arange(0, n_pts + 1, dtype=float))
    B = RealSequence(-beta * np.arange(n_pts, -1, -1, dtype=float))
    out = one_sided_probe(psi, A, B)
    payload = {
        "invariance_residual": out["invariance_residual"],
        "cross_residual": out["cross_residual"],
        "quadrant_extent": out["quadrant_extent"],
        "quadrant_max": float(np.max(np.abs(out["quadrant"]))),
    }
    _write_json(args.output, payload)
    if args.csv:
        rows = []
        q = out["quadrant_extent"]
        xs = np.linspace(0.0, q, 16)
        ys = np.linspace(-q, 0.0, 16)
        for i, x in enumerate(xs):
            for j, yv in enumerate(ys):
                v = out["quadrant"][i, j]
                rows.append((float(x), float(yv), float(v.real), float(v.imag)))
        _write_csv(args.csv, ["xi1", "xi2", "re", "im"], rows)
        if _figures_enabled(args, cfg):
            import matplotlib

            matplotlib.use("Agg")
            import matplotlib.pyplot as plt

            fig, ax = plt.subplots(figsize=(5, 4))
            im = ax.imshow(
                np.abs(out["quadrant"]).T,
                origin="lower",
                extent=(0, q, -q, 0),
                cmap="viridis",
            )
            fig.colorbar(im, ax=ax)
            ax.set_title("|extension| on the probe quadrant")
            _save_figure(fig, os.path.splitext(args.csv)[0], "quadrant")
    return 0


def main(argv=None):
    _cap_threads()
    parser = argparse.ArgumentParser(
        prog="hyperhup",
        description="uniqueness-pair machinery for the hyperbola: restriction "
        "operator checks, certificates, and witness constructions",
    )
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--output", help="JSON report path")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--no-figures", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-t", help="run the restriction-operator property suite")
    p.add_argument("--grid-L", dest="grid_L", type=float)
    p.add_argument("--grid-n", dest="grid_n", type=int)
    p.set_defaults(fn=cmd_verify_t)

    p = sub.add_parser("certify", help="uniqueness certificate for a density/cross pair")
    p.add_argument("--cross", help="inline alpha:beta:theta or JSON file")
    p.add_argument("--psi", help="density source (gaussian|zero|hermite:k|poisson:a:b|file)")
    p.add_argument("--expect-uniqueness", action="store_true")
    p.add_argument("--grid-L", dest="grid_L", type=float)
    p.add_argument("--grid-n", dest="grid_n", type=int)
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("construct", help="build a non-uniqueness witness for a cross")
    p.add_argument("--cross", help="inline alpha:beta:theta or JSON file")
    p.add_argument("--A", help="JSON array of A points")
    p.add_argument("--B", help="JSON array of B points")
    p.set_defaults(fn=cmd_construct)

    p = sub.add_parser("poisson", help="kernel-difference witness for alpha*beta > 1")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.set_defaults(fn=cmd_poisson)

    p = sub.add_parser("annulus", help="radial Poincare constants against the 1-d bound")
    p.add_argument("--csv", help="CSV output path")
    p.set_defaults(fn=cmd_annulus)

    p = sub.add_parser("kg", help="wave-equation residual of a density extension")
    p.add_argument("--psi")
    p.add_argument("--csv")
    p.add_argument("--grid-L", dest="grid_L", type=float)
    p.add_argument("--grid-n", dest="grid_n", type=int)
    p.set_defaults(fn=cmd_kg)

    p = sub.add_parser("onesided", help="one-sided cross probe")
    p.add_argument("--psi")
    p.add_argument("--csv")
    p.add_argument("--grid-L", dest="grid_L", type=float)
    p.add_argument("--grid-n", dest="grid_n", type=int)
    p.set_defaults(fn=cmd_onesided)

    args = parser.parse_args(argv)
    import numpy as np

    np.random.seed(args.seed)
    try:
        return args.fn(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
