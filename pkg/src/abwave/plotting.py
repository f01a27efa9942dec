"""Static SVG figures for verification reports."""

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .errors import InvalidArgumentError  # noqa: E402

_RC = {"svg.fonttype": "none", "svg.hashsalt": "abwave", "figure.figsize": (6.4, 4.4)}


def _fit_line(ax, x, y, label, **kw):
    x, y = np.asarray(x, float), np.asarray(y, float)
    slope, icpt = np.polyfit(np.log(x), np.log(y), 1)
    ax.plot(x, np.exp(icpt) * x**slope, "--", label=f"{label} fit slope {slope:.3f}", **kw)


def _reference(ax, x, anchor_x, anchor_y, slope, label, style):
    x = np.asarray(x, float)
    ax.plot(x, anchor_y * (x / anchor_x) ** slope, style, color="0.3", label=label)


def _bessel(ax, rep):
    by_nu = {}
    for s in rep["samples"]:
        by_nu.setdefault(s["nu"], []).append(s)
    for nu, rows in sorted(by_nu.items()):
        r = [s["r"] for s in rows]
        e = [abs(s["e"]) for s in rows]
        j2 = [s["j2_envelope"] for s in rows]
        ax.loglog(r, j2, "o", ms=3, label=f"|J2| envelope, nu={nu:g}")
        _fit_line(ax, r, j2, f"J2 nu={nu:g}")
        if all(v > 0 for v in e):
            ax.loglog(r, e, "s", ms=3, label=f"|E|, nu={nu:g}")
            _fit_line(ax, r, e, f"E nu={nu:g}")
    ax.set_xlabel("r")
    ax.set_ylabel("magnitude")
    ax.set_title("Schlafli pieces: decay envelopes")


def _sweep(ax, rep):
    curves = {}
    for s in rep["samples"]:
        key = (s["p"], s["q"])
        curves.setdefault(key, []).append((s["param"], s["ratio"]))
    for (p, q), pts in sorted(curves.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1]))):
        pts.sort()
        f = lambda v: "inf" if v == math.inf else f"{v:g}"  # noqa: E731
        ax.plot([a for a, _ in pts], [b for _, b in pts], "o-", label=f"(p,q)=({f(p)},{f(q)})")
    lam = [s["param"] for s in rep["samples"]]
    if lam and min(lam) > 0 and max(lam) / min(lam) > 3:
        ax.set_xscale("log")
    ax.set_xlabel("family parameter")
    ax.set_ylabel("ratio")
    ax.set_title(rep["estimate"])


def _dichotomy(ax, rep):
    summary = rep.get("summary", {})
    ref = summary.get("reference", {})
    by_member = {}
    for s in rep["samples"]:
        by_member.setdefault(s["member"], []).append(s)
    for member, rows in sorted(by_member.items()):
        rows.sort(key=lambda s: s["R"])
        small = [s for s in rows if s["branch"] == "small"]
        large = [s for s in rows if s["branch"] == "large"]
        ax.loglog([s["R"] for s in rows], [s["A"] for s in rows], "o", ms=4, label=f"A(R), {member}")
        for branch, pts, slope, name in (
            ("small", small, ref.get("small"), "eps/2"),
            ("large", large, ref.get("large"), "1/p - 1/2"),
        ):
            if not pts or slope is None:
                continue
            R = [s["R"] for s in pts]
            _fit_line(ax, R, [s["A"] for s in pts], f"{branch} {member}")
            _reference(ax, R, R[-1] if branch == "small" else R[0],
                       pts[-1]["A"] if branch == "small" else pts[0]["A"], slope,
                       f"reference slope {name} = {slope:g}", ":")
    ax.set_xlabel("R")
    ax.set_ylabel("A(R)")
    ax.set_title("frequency-localized dichotomy")


def _smoothing(ax, rep):
    curves = {}
    for s in rep["samples"]:
        curves.setdefault((s["beta"], s["branch"]), []).append((s["param"], s["ratio"]))
    for (beta, branch), pts in sorted(curves.items()):
        pts.sort()
        ax.plot([a for a, _ in pts], [b for _, b in pts], "o-", label=f"beta={beta:g}, {branch}")
    ax.set_xscale("log")
    ax.set_xlabel("lambda")
    ax.set_ylabel("ratio")
    ax.set_title("Klein-Gordon local smoothing")


def _conservation(ax, rep):
    curves = {}
    for s in rep["samples"]:
        curves.setdefault(s["flow"], []).append((s["t"], max(s["drift"], 1e-17)))
    for flow, pts in sorted(curves.items()):
        ax.semilogy([a for a, _ in pts], [b for _, b in pts], "o-", ms=3, label=flow)
    ax.set_xlabel("t")
    ax.set_ylabel("relative drift")
    ax.set_title("conserved quantities")


_PLOTTERS = {
    "bessel-envelopes": _bessel,
    "strichartz-wave": _sweep,
    "strichartz-dirac": _sweep,
    "localized-dichotomy": _dichotomy,
    "local-smoothing-kg": _smoothing,
    "conservation": _conservation,
}


def plot_report(report: dict, out_path):
    """Write an SVG for a report dict; raises on empty or unsupported reports."""
    if not report.get("samples"):
        raise InvalidArgumentError("report has no samples to plot")
    kind = report.get("estimate")
    fn = _PLOTTERS.get(kind)
    if fn is None:
        raise InvalidArgumentError(f"no plot defined for estimate {kind!r}")
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        fn(ax, report)
        ax.legend(fontsize=6)
        fig.tight_layout()
        fig.savefig(out_path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return out_path
