"""Experiment orchestration: prepare, evolve, analyse, and emit artifacts.

A run executes preparation -> evolution -> each requested analysis and
writes one CSV per analysis plus a JSON manifest with a sha256 inventory
of every emitted file.  CSV cells are printed with %.17g, so re-running
an identical config reproduces every file bit for bit.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig
from .entanglement import BlockSpec, block_entropy, contour_trajectory
from .gaussian import (
    CondensatePair,
    condensates,
    evolve,
    evolve_adaptive,
    free_ground_state,
    mass_quench_prepare,
    real_space_correlation,
    self_consistent_ground_state,
)
from .lattice import LatticeSpec, cosmological_time, preparation_scale
from .production import bogoliubov_spectrum, mode_pair_entropy, particle_density
from .quasiparticle import condensate_persistence, qp_entropy, qp_input_from_spectrum
from .symmetry import spectrum_symmetry_check, symmetry_report


@dataclass
class RunManifest:
    """Record of one executed run: config snapshot, inventory, timings."""

    directory: Path
    config: dict
    files: dict  # relative path -> sha256 hex digest
    wall_time: float
    version: str = __version__
    workers: int = 1

    def path(self) -> Path:
        return self.directory / "manifest.json"

    def save(self):
        payload = {
            "version": self.version,
            "wall_time_s": self.wall_time,
            "workers": self.workers,
            "config": self.config,
            "files": self.files,
        }
        with open(self.path(), "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "RunManifest":
        path = Path(path)
        with open(path) as fh:
            payload = json.load(fh)
        return cls(
            directory=path.parent,
            config=payload["config"],
            files=payload["files"],
            wall_time=payload["wall_time_s"],
            version=payload["version"],
            workers=payload.get("workers", 1),
        )

    def verify(self) -> list:
        """Names of inventory files that are missing or whose hash changed."""
        bad = []
        for name, digest in self.files.items():
            target = self.directory / name
            if not target.exists() or _sha256(target) != digest:
                bad.append(name)
        return bad


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{x:.17g}" if isinstance(x, float) else x for x in row])


def _prepare(config: RunConfig):
    lattice = config.lattice
    profile = config.profile
    eta0 = config.eta_span[0]
    a_start = preparation_scale(profile, eta0)
    prep = config.preparation
    prep_lattice = lattice
    if prep.get("coupling_pre") is not None:
        prep_lattice = LatticeSpec(lattice.num_sites, lattice.spacing,
                                   lattice.mass, prep["coupling_pre"])
    if prep["kind"] == "mass_quench":
        state, cond = mass_quench_prepare(prep_lattice, prep["m_pre"], a_start)
    elif prep_lattice.coupling == 0.0:
        state = free_ground_state(prep_lattice, prep_lattice.mass * a_start,
                                  a_val=a_start)
        cond = CondensatePair(0.0, 0.0)
    else:
        state, cond = self_consistent_ground_state(prep_lattice, a_start)
    state.spec = lattice
    state.eta = eta0
    return state, cond


def _evolve(config: RunConfig, state):
    ev = config.evolution
    if ev["method"] == "adaptive":
        return evolve_adaptive(
            state, config.profile, config.eta_span,
            n_samples=ev["n_samples"], rtol=ev["rtol"],
        )
    return evolve(
        state, config.profile, config.eta_span, ev["deta"],
        sample_every=ev["sample_every"],
    )


def _emit_condensates(traj, directory, name="condensates.csv"):
    times = np.asarray(cosmological_time(traj.profile, traj.etas), dtype=float)
    rows = [
        (float(e), float(t), c.sigma, c.pi)
        for e, t, c in zip(traj.etas, times, traj.condensates)
    ]
    _write_csv(directory / name, ["eta[a]", "t[a]", "sigma[1/a]", "pi[1/a]"], rows)
    return [name]


def _emit_entropy(traj, block: BlockSpec, directory, name="entropy_measured.csv"):
    times = np.asarray(cosmological_time(traj.profile, traj.etas), dtype=float)
    rows = []
    for eta, t, state in zip(traj.etas, times, traj.states):
        gamma = real_space_correlation(state)
        rows.append((float(eta), float(t), block_entropy(gamma, block)))
    _write_csv(directory / name, ["eta[a]", "t[a]", "entropy[nats]"], rows)
    return [name]


def _emit_contour(traj, block: BlockSpec, directory, time_stride=1,
                  name="contour.csv"):
    field = contour_trajectory(traj, block, time_stride=time_stride)
    times = field.times if field.times is not None else np.zeros_like(field.etas)
    rows = []
    for i, (eta, t) in enumerate(zip(field.etas, times)):
        for j in range(block.length):
            rows.append((float(eta), float(t), j,
                         float(field.values[i, j, 0]), float(field.values[i, j, 1])))
    _write_csv(directory / name,
               ["eta[a]", "t[a]", "site[block index]", "S_u[nats]", "S_d[nats]"],
               rows)
    return [name], field


def _qp_reference(traj, lattice, window=None):
    """Late-window mean condensates and the dressed reference parameters."""
    etas = traj.etas
    if window is None:
        window = (etas[0] + 0.75 * (etas[-1] - etas[0]), etas[-1])
    mask = (etas >= window[0]) & (etas <= window[1])
    sig = float(np.mean([c.sigma for c, m in zip(traj.condensates, mask) if m]))
    pi = float(np.mean([c.pi for c, m in zip(traj.condensates, mask) if m]))
    a_f = traj.states[-1].a_val
    return lattice.mass * a_f + sig, pi, a_f


def _emit_spectrum(traj, lattice, reference_mode, directory, name="spectrum.csv"):
    a_f = traj.states[-1].a_val
    if reference_mode == "dressed" and lattice.coupling != 0.0:
        ma_ref, pi_ref, a_f = _qp_reference(traj, lattice)
        spectrum = bogoliubov_spectrum(
            traj.states[-1], lattice.mass * a_f,
            sigma=ma_ref - lattice.mass * a_f, pi=pi_ref, a_ref=a_f,
        )
    else:
        spectrum = bogoliubov_spectrum(
            traj.states[-1], lattice.mass * a_f, a_ref=a_f
        )
    s_mode, s_pair = mode_pair_entropy(spectrum.beta_sq)
    rows = [
        (float(k), float(b), float(sm), float(sp))
        for k, b, sm, sp in zip(spectrum.k, spectrum.beta_sq, s_mode, s_pair)
    ]
    _write_csv(directory / name,
               ["k[1/a]", "beta_sq[dimensionless]", "s_mode[nats]", "s_pair[nats]"],
               rows)
    return [name], spectrum


def _emit_qp(traj, lattice, block: BlockSpec, window, directory,
             name="entropy_qp.csv"):
    ma_ref, pi_ref, a_f = _qp_reference(traj, lattice,
                                        tuple(window) if window else None)
    spectrum = bogoliubov_spectrum(
        traj.states[-1], lattice.mass * a_f,
        sigma=ma_ref - lattice.mass * a_f, pi=pi_ref, a_ref=a_f,
    )
    out_of_validity = False
    if lattice.coupling != 0.0:
        try:
            out_of_validity = condensate_persistence(traj, "sigma") > 0.5
        except ValueError:
            pass
    qp = qp_input_from_spectrum(
        spectrum, lattice, block.length * lattice.spacing,
        out_of_validity=out_of_validity,
    )
    eta0 = traj.etas[0]
    rows = [(float(e), qp_entropy(qp, float(e - eta0))) for e in traj.etas]
    _write_csv(directory / name, ["eta[a]", "entropy[nats]"], rows)
    return [name], qp


def _emit_symmetry(traj, lattice, opts, directory, workers=1):
    names = []
    cond = condensates(traj.states[-1])
    a_f = traj.states[-1].a_val
    report = symmetry_report(lattice.mass * a_f + cond.sigma, 0.0, cond.pi, lattice)
    rows = [(nm, report.residuals[nm], report.holds[nm])
            for nm in ("T", "C", "S", "P", "CP")]
    _write_csv(directory / "symmetry_report.csv",
               ["symmetry", "residual[1/a]", "holds"], rows)
    with open(directory / "symmetry_report.txt", "w") as fh:
        fh.write(report.table() + "\n")
    names += ["symmetry_report.csv", "symmetry_report.txt"]

    hubble_values = opts["hubble_values"]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        args = [
            (lattice, opts["a_0"], opts["a_f"], h, opts["reference_mode"])
            for h in hubble_values
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            sweep = list(pool.map(_symmetry_single, args))
    else:
        sweep = spectrum_symmetry_check(
            lattice, opts["a_0"], opts["a_f"], hubble_values,
            reference_mode=opts["reference_mode"],
        )
    _write_csv(directory / "symmetry_sweep.csv",
               ["hubble[1/a]", "asymmetry[dimensionless]", "beta_sq_sum[dimensionless]"],
               [(r["hubble"], r["asymmetry"], r["beta_sq_sum"]) for r in sweep])
    names.append("symmetry_sweep.csv")
    return names


def _symmetry_single(args):
    lattice, a_0, a_f, hubble, reference_mode = args
    return spectrum_symmetry_check(
        lattice, a_0, a_f, [hubble], reference_mode=reference_mode
    )[0]


def run(config: RunConfig, output_dir=None, workers: int = 1) -> RunManifest:
    """Execute a validated config and write all artifacts.

    Returns the saved :class:`RunManifest`.  ``output_dir`` overrides
    ``output.directory`` from the config; one of the two must be set.
    """
    t_start = time.perf_counter()
    directory = Path(output_dir or config.output["directory"] or ".")
    directory.mkdir(parents=True, exist_ok=True)

    state, _ = _prepare(config)
    traj = _evolve(config, state)

    files = []
    files += _emit_condensates(traj, directory)
    for analysis in config.analyses:
        opts = analysis.options
        if analysis.kind == "entropy":
            blk = BlockSpec(opts["block"]["start"], opts["block"]["length"],
                            config.lattice.num_sites)
            files += _emit_entropy(traj, blk, directory)
        elif analysis.kind == "contour":
            blk = BlockSpec(opts["block"]["start"], opts["block"]["length"],
                            config.lattice.num_sites)
            names, _ = _emit_contour(traj, blk, directory,
                                     time_stride=opts.get("time_stride", 1))
            files += names
        elif analysis.kind == "spectrum":
            names, spectrum = _emit_spectrum(traj, config.lattice,
                                             opts["reference_mode"], directory)
            files += names
        elif analysis.kind == "qp":
            blk = BlockSpec(opts["block"]["start"], opts["block"]["length"],
                            config.lattice.num_sites)
            names, _ = _emit_qp(traj, config.lattice, blk, opts.get("window"),
                                directory)
            files += names
        elif analysis.kind == "condensates":
            pass  # always emitted
        elif analysis.kind == "symmetry":
            files += _emit_symmetry(traj, config.lattice, opts, directory,
                                    workers=workers)
    if config.output.get("binary"):
        # final-state Bloch vectors, shape (N_S, 3) little-endian float64
        final = traj.states[-1].bloch.astype("<f8")
        np.save(directory / "state_final.npy", final)
        files.append("state_final.npy")

    inventory = {name: _sha256(directory / name) for name in files}
    manifest = RunManifest(
        directory=directory,
        config=config.raw,
        files=inventory,
        wall_time=time.perf_counter() - t_start,
        workers=workers,
    )
    manifest.save()
    return manifest


# ---------------------------------------------------------------------------
# Plot-script generation
# ---------------------------------------------------------------------------

_PLOT_HEADER = """\
#!/usr/bin/env python3
# Auto-generated data-only plot script; reads CSVs by relative path.
import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

HERE = Path(__file__).resolve().parent

def load(name):
    with open(HERE / name) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(x) for x in row] for row in reader])
    return header, data
"""

_PLOT_ENTROPY = _PLOT_HEADER + """
_, measured = load("entropy_measured.csv")
fig, ax = plt.subplots(figsize=(5, 3.2))
ax.plot(measured[:, 0], measured[:, 2], label="measured")
try:
    _, qp = load("entropy_qp.csv")
    ax.plot(qp[:, 0], qp[:, 1], "--", label="quasi-particle")
except FileNotFoundError:
    pass
ax.set_xlabel(r"$\\eta$ [a]")
ax.set_ylabel(r"$S_A$ [nats]")
ax.legend(frameon=False)
fig.tight_layout()
fig.savefig(HERE / "entropy.png", dpi=160)
"""

_PLOT_CONTOUR = _PLOT_HEADER + """
_, data = load("contour.csv")
etas = np.unique(data[:, 0])
sites = np.unique(data[:, 2]).astype(int)
n_t, n_x = etas.size, sites.size
s_u = data[:, 3].reshape(n_t, n_x)
s_d = data[:, 4].reshape(n_t, n_x)
times = data[:, 1].reshape(n_t, n_x)[:, 0]

for tag, axis_vals, axis_label in (("eta", etas, r"$\\eta$ [a]"),
                                   ("t", times, r"$t$ [a]")):
    fig, axes = plt.subplots(1, 2, figsize=(8, 3.2), sharey=True)
    for ax, field, title in ((axes[0], s_u, r"$S_i^u$"),
                             (axes[1], s_d, r"$S_i^d$")):
        im = ax.pcolormesh(sites, axis_vals, field, shading="nearest")
        ax.set_xlabel("site")
        ax.set_title(title)
        fig.colorbar(im, ax=ax)
    axes[0].set_ylabel(axis_label)
    fig.tight_layout()
    fig.savefig(HERE / f"contour_{tag}.png", dpi=160)

# zigzag rendering: sites and spinors interleaved (1u, 1d, 2u, 2d, ...)
zig = np.empty((n_t, 2 * n_x))
zig[:, 0::2] = s_u
zig[:, 1::2] = s_d
fig, ax = plt.subplots(figsize=(5, 3.2))
im = ax.pcolormesh(np.arange(2 * n_x), etas, zig, shading="nearest")
ax.set_xlabel("zigzag index")
ax.set_ylabel(r"$\\eta$ [a]")
fig.colorbar(im, ax=ax)
fig.tight_layout()
fig.savefig(HERE / "contour_zigzag.png", dpi=160)
"""

_PLOT_SPECTRUM = _PLOT_HEADER + """
_, data = load("spectrum.csv")
fig, ax = plt.subplots(figsize=(5, 3.2))
ax.plot(data[:, 0], data[:, 1], ".-", ms=3)
ax.set_xlabel("k [1/a]")
ax.set_ylabel(r"$|\\beta_k|^2$")
fig.tight_layout()
fig.savefig(HERE / "spectrum.png", dpi=160)
"""

_PLOT_SWEEP = _PLOT_HEADER + """
_, data = load("symmetry_sweep.csv")
fig, ax = plt.subplots(figsize=(5, 3.2))
ax.loglog(data[:, 0], data[:, 1], "o-")
ax.set_xlabel("H [1/a]")
ax.set_ylabel("spectrum asymmetry")
fig.tight_layout()
fig.savefig(HERE / "symmetry_sweep.png", dpi=160)
"""

_PLOT_CONDENSATES = _PLOT_HEADER + """
_, data = load("condensates.csv")
fig, ax = plt.subplots(figsize=(5, 3.2))
ax.plot(data[:, 0], data[:, 2], label=r"$\\Sigma$")
ax.plot(data[:, 0], data[:, 3], label=r"$\\Pi$")
ax.set_xlabel(r"$\\eta$ [a]")
ax.set_ylabel("condensate [1/a]")
ax.legend(frameon=False)
fig.tight_layout()
fig.savefig(HERE / "condensates.png", dpi=160)
"""

_PLOTS = {
    "entropy_measured.csv": ("plot_entropy.py", _PLOT_ENTROPY),
    "contour.csv": ("plot_contour.py", _PLOT_CONTOUR),
    "spectrum.csv": ("plot_spectrum.py", _PLOT_SPECTRUM),
    "symmetry_sweep.csv": ("plot_symmetry_sweep.py", _PLOT_SWEEP),
    "condensates.csv": ("plot_condensates.py", _PLOT_CONDENSATES),
}


def make_plots(manifest: RunManifest) -> list:
    """Emit self-contained plot scripts next to the manifest's CSVs.

    Scripts only read the CSVs (no recomputation); one script per
    analysis whose data file is present.  Returns the script paths.
    """
    missing = manifest.verify()
    if missing:
        raise FileNotFoundError(
            f"manifest inventory out of date, missing/modified: {missing}"
        )
    written = []
    for data_file, (script_name, body) in _PLOTS.items():
        if data_file in manifest.files:
            path = manifest.directory / script_name
            with open(path, "w") as fh:
                fh.write(body)
            written.append(path)
    return written
