"""The four figure kinds: landscape, bars, ratio_curve, wigner.

Static file output only.  Every plotted number is read from the input files;
metadata-driven unit relabeling (energies via the recorded hbar, rates in
units of g or gamma) is the only arithmetic done here.
"""

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib import pyplot as plt

from .io import (SchemaError, energy_label, meta_float, read_steady_json,
                 read_table, read_wigner_csv, require_columns)

OCCUPATION_COLORS = ("#0072B2", "#D55E00", "#009E73")
FLOOR = 1e-12


def _style():
    plt.rcParams.update({
        "font.size": 9,
        "axes.labelsize": 9,
        "legend.fontsize": 8,
        "xtick.direction": "in",
        "ytick.direction": "in",
        "figure.dpi": 150,
        "savefig.dpi": 150,
    })


def _energy_axis(meta, columns, path):
    """Axis values as energies (hbar * omega) using the recorded constant."""
    require_columns(columns, ["delta_lx"], path)
    hbar = meta_float(meta, "hbar_mev_ps", path)
    return columns["delta_lx"] * hbar


def plot_landscape(sweep_csv, out_path, resonances_csv=None, dressed_csv=None,
                   zoom=None):
    """Occupations P(1..3) against the laser-emitter detuning.

    Optional overlays: resonance ticks from a theory table, a dressed-state
    energy panel below the main axes, and zoom insets over given energy
    windows (defaults to the densely sampled refinement windows when the
    sweep grid carries them).
    """
    _style()
    meta, _header, columns = read_table(sweep_csv)
    require_columns(columns, ["P1", "P2", "P3", "status"], sweep_csv)
    ok = columns["status"] == "ok"
    energy = _energy_axis(meta, columns, sweep_csv)[ok]
    eunit = energy_label(meta)

    if dressed_csv is not None:
        fig, (ax, ax_dressed) = plt.subplots(
            2, 1, figsize=(5.2, 5.4), sharex=True,
            gridspec_kw={"height_ratios": [2.2, 1.0], "hspace": 0.08})
    else:
        fig, ax = plt.subplots(figsize=(5.2, 3.6))
        ax_dressed = None

    for n, color in zip((1, 2, 3), OCCUPATION_COLORS):
        ax.semilogy(energy, np.maximum(columns[f"P{n}"][ok], FLOOR),
                    color=color, lw=1.0, label=f"$P({n})$")
    ax.set_ylim(1e-9, 1.0)
    ax.set_ylabel("stationary occupation")
    ax.legend(loc="upper right", frameon=False)

    if resonances_csv is not None:
        rmeta, _h, rcols = read_table(resonances_csv)
        require_columns(rcols, ["N", f"hbar_delta_lx_{eunit}"], resonances_csv)
        for n_val, pos in zip(rcols["N"], rcols[f"hbar_delta_lx_{eunit}"]):
            ax.axvline(pos, color="#56B4E9", lw=0.6, alpha=0.6, zorder=0)
            ax.annotate(f"{int(n_val)}", (pos, 1.2), xycoords=("data", "axes fraction"),
                        ha="center", fontsize=7, color="#56B4E9",
                        annotation_clip=False)

    if zoom is None:
        zoom = _refined_windows(energy)
    for window, anchor in zip(zoom[:2], ((0.04, 0.55), (0.38, 0.55))):
        lo, hi = window
        inset = ax.inset_axes([anchor[0], anchor[1], 0.24, 0.38])
        mask = (energy >= lo) & (energy <= hi)
        if not mask.any():
            continue
        for n, color in zip((1, 2, 3), OCCUPATION_COLORS):
            inset.semilogy(energy[mask], np.maximum(columns[f"P{n}"][ok][mask], FLOOR),
                           color=color, lw=0.8)
        inset.set_xlim(lo, hi)
        inset.tick_params(labelsize=6)
        ax.indicate_inset_zoom(inset, edgecolor="#E69F00")

    if ax_dressed is not None:
        dmeta, _h, dcols = read_table(dressed_csv)
        require_columns(dcols, [f"hbar_delta_lx_{eunit}", "e_plus_over_g",
                                "e_minus_over_g", "delta_cl_over_g"], dressed_csv)
        x = dcols[f"hbar_delta_lx_{eunit}"]
        ax_dressed.plot(x, dcols["e_plus_over_g"], color="#0072B2", lw=1.0,
                        label=r"$e_+$")
        ax_dressed.plot(x, dcols["e_minus_over_g"], color="#D55E00", lw=1.0,
                        label=r"$e_-$")
        ax_dressed.fill_between(x, 0.0, np.abs(dcols["delta_cl_over_g"]),
                                color="0.85", label=r"$|\Delta\omega_{CL}|$")
        ax_dressed.set_ylabel("energy / g")
        ax_dressed.legend(loc="upper right", frameon=False, ncol=3)
        ax_dressed.set_xlabel(rf"$\hbar\,\Delta\omega_{{LX}}$ ({eunit})")
    else:
        ax.set_xlabel(rf"$\hbar\,\Delta\omega_{{LX}}$ ({eunit})")

    fig.savefig(out_path, bbox_inches="tight")
    plt.close(fig)
    return out_path


def _refined_windows(energy):
    """Contiguous stretches where the grid is denser than the base step."""
    steps = np.diff(energy)
    base = np.median(steps)
    fine = steps < 0.6 * base
    windows = []
    start = None
    for i, flag in enumerate(fine):
        if flag and start is None:
            start = i
        if not flag and start is not None:
            windows.append((energy[start], energy[i]))
            start = None
    if start is not None:
        windows.append((energy[start], energy[-1]))
    return windows


def plot_bars(steady_jsons, out_path, n_show=6):
    """P(n)/P(1) bars for one or more stationary results, with the 1/n guide."""
    _style()
    fig, ax = plt.subplots(figsize=(4.6, 3.2))
    n_axis = np.arange(1, n_show + 1)
    width = 0.8 / len(steady_jsons)
    for k, path in enumerate(steady_jsons):
        payload = read_steady_json(path)
        probs = np.asarray(payload["P"], dtype=float)
        if len(probs) <= 1 or probs[1] <= 0:
            raise SchemaError(f"{path}: P(1) vanishes; nothing to normalize")
        values = np.zeros(n_show)
        upto = min(n_show, len(probs) - 1)
        values[:upto] = probs[1:upto + 1] / probs[1]
        label = payload.get("label") or payload["params"].get("preset") \
            or f"input {k + 1}"
        ax.bar(n_axis + (k - (len(steady_jsons) - 1) / 2) * width, values,
               width=width, label=str(label))
    ax.plot(n_axis, 1.0 / n_axis, "k--", lw=1.0, label=r"$1/n$")
    ax.set_xlabel("photon number $n$")
    ax.set_ylabel("$P(n)/P(1)$")
    ax.set_xticks(n_axis)
    ax.legend(frameon=False)
    fig.savefig(out_path, bbox_inches="tight")
    plt.close(fig)
    return out_path


def plot_ratio_curve(sweep_csv, out_path):
    """r and P(3)/P(1) against the sweep axis on a log x scale.

    The kappa axis is shown in units of gamma, the others as energies; the
    0.5 target line marks the ideal two-photon value.  Undefined ratios
    (blank fields) are simply absent from the curves.
    """
    _style()
    meta, _header, columns = read_table(sweep_csv)
    require_columns(columns, ["r", "ratio31", "status"], sweep_csv)
    axis_name = meta.get("axis")
    if axis_name not in ("kappa", "gamma_phi", "delta_lx"):
        raise SchemaError(f"{sweep_csv}: unsupported sweep axis {axis_name!r}")
    ok = columns["status"] == "ok"
    if axis_name == "kappa":
        gamma = meta_float(meta, "gamma", sweep_csv)
        x = columns["kappa"][ok] / gamma
        xlabel = r"$\kappa / \gamma$"
    else:
        hbar = meta_float(meta, "hbar_mev_ps", sweep_csv)
        x = columns[axis_name][ok] * hbar
        symbol = {"gamma_phi": r"\gamma_\phi", "delta_lx": r"\Delta\omega_{LX}"}
        xlabel = rf"$\hbar\,{symbol[axis_name]}$ ({energy_label(meta)})"

    fig, ax = plt.subplots(figsize=(4.6, 3.2))
    for column, label, color in (("r", "$P(2)/P(1)$", "#0072B2"),
                                 ("ratio31", "$P(3)/P(1)$", "#D55E00")):
        y = columns[column][ok]
        defined = ~np.isnan(y)
        ax.semilogx(x[defined], y[defined], "o-", ms=3, lw=1.0,
                    color=color, label=label)
    ax.axhline(0.5, color="k", ls=":", lw=1.0, label="target 0.5")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("occupation ratio")
    ax.legend(frameon=False)
    fig.savefig(out_path, bbox_inches="tight")
    plt.close(fig)
    return out_path


def plot_wigner(wigner_csv, out_path):
    """Phase-space heatmap, diverging colors centered on W = 0."""
    _style()
    _meta, re_axis, im_axis, values = read_wigner_csv(wigner_csv)
    scale = np.abs(values).max()
    fig, ax = plt.subplots(figsize=(4.2, 3.6))
    mesh = ax.pcolormesh(re_axis, im_axis, values, cmap="RdBu_r",
                         vmin=-scale, vmax=scale, shading="auto")
    fig.colorbar(mesh, ax=ax, label=r"$W(\alpha)$")
    ax.set_xlabel(r"Re $\alpha$")
    ax.set_ylabel(r"Im $\alpha$")
    ax.set_aspect("equal")
    fig.savefig(out_path, bbox_inches="tight")
    plt.close(fig)
    return out_path
