"""
Commands of the ``qnet`` command line. Each one reads a validated configuration and returns a figure-ready Dataset.

Rates and detunings are angular frequencies in the units of the configuration (usually units of gamma or gamma_r),
except for the ``circuit`` command which reads energies in GHz and capacitances in fF, and reports both rad/s and GHz.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, TypeVar

import numpy as np
from scipy.stats import unitary_group

from qnet.circuit import (
    CircuitParams,
    InterfaceParams,
    balanced_coupler_energy,
    chi_sweep,
    effective_model,
    interface_model,
    optimize_circuit,
    renormalized_hamiltonian,
    subradiance,
)
from qnet.conf import settings
from qnet.core import RunContext, command
from qnet.core import Field as F
from qnet.dynamics import (
    DriveSpec,
    MasterEquation,
    NoiseSpec,
    TwoLevelChain,
    chain_space,
    cutoff_convergence,
    evolve,
    flux_ratio,
    product_dimers,
    steady_state,
)
from qnet.exceptions import ConfigurationError
from qnet.gue import (
    averaged_directionality,
    build_coupling_ops,
    collective_commutator,
    directionality,
    optimal_gue,
    optimal_params,
)
from qnet.handlers.base import Dataset, plain
from qnet.protocols import (
    BACKENDS,
    ProtocolOutcome,
    ToricLattice,
    line_diagonals,
    parity_fidelity,
    parity_network,
    photon_detector,
    prepare_cluster_1d,
    prepare_ghz,
    pulse_fidelity_scan,
    qst_entanglement_fidelity,
    qst_fidelity_closed_form,
    resonant_node,
    run_heralded_retry,
    stabilizer_values,
    toric_generate,
    toric_logical,
    transfer_network,
)
from qnet.protocols.toric import ACTIONS
from qnet.qops import Operator, basis_state
from qnet.scatter import ideal_phase_gate
from qnet.slh import NetworkSpec

logger = logging.getLogger(__name__)

T = TypeVar("T")

GHZ = 2 * np.pi * 1e9
FEMTOFARAD = 1e-15


def _map(function: Callable[[Any], T], items: Iterable, jobs: int) -> list[T]:
    """Evaluate ``function`` on every item, on up to ``jobs`` threads, keeping the order of ``items``"""
    items = list(items)
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            return list(executor.map(function, items))
    return [function(item) for item in items]


def _axis(config: dict, name: str) -> np.ndarray:
    points = config[f"{name}_points"]
    if points < 1:
        raise ConfigurationError(f'"{name}_points" must be >= 1, got {points}')
    return np.linspace(config[f"{name}_min"], config[f"{name}_max"], points)


def _seed(context: RunContext) -> int:
    return 0 if context.seed is None else context.seed


BACKEND = F("str", "ideal", BACKENDS)

DIRECTIONALITY_GRID = {
    "r": F("float"),
    "gamma": F("float", 1.0),
    "delta": F("float", 0.0),
    "j_min": F("float"),
    "j_max": F("float"),
    "j_points": F("int", 101),
    "phi_min": F("float"),
    "phi_max": F("float"),
    "phi_points": F("int", 101),
    "method": F("str", "exact", ("exact", "ode")),
}

DIRECTIONALITY_MONTECARLO = {
    "r": F("float"),
    "gamma": F("float", 1.0),
    "sd_r": F("floats"),
    "sd_gamma": F("floats"),
    "samples": F("int", 500),
    "method": F("str", "exact", ("exact", "ode")),
}


@command(
    name="directionality",
    help="Directionality of the photons emitted by one GUE, on a (J, phi) grid or averaged over fabrication disorder",
    modes={"grid": DIRECTIONALITY_GRID, "montecarlo": DIRECTIONALITY_MONTECARLO},
)
def cmd_directionality(config: dict, context: RunContext) -> Dataset:
    if config["mode"] == "grid":
        base = optimal_gue(config["r"], config["gamma"], config["delta"], n_max=2)
        points = list(itertools.product(_axis(config, "j"), _axis(config, "phi")))

        def evaluate(point: tuple[float, float]) -> float:
            j_ratio, phi = point
            return directionality(base.replace(j_hop=j_ratio * config["gamma"], phi=phi), "R", config["method"])

        values = _map(evaluate, points, context.jobs)
        rows = [(j_ratio, phi, beta) for (j_ratio, phi), beta in zip(points, values)]
        opt = optimal_params(config["r"], config["gamma"])
        meta = {
            "j_opt_over_gamma": opt.j_opt / config["gamma"],
            "phi_opt": opt.phi_opt,
            "collective_commutator": collective_commutator(base),
        }
        return Dataset(context.command, ["j_over_gamma", "phi", "beta_dir"], rows, meta)

    rows = []
    for sd_r, sd_gamma in itertools.product(config["sd_r"], config["sd_gamma"]):
        mean, sem = averaged_directionality(
            config["r"],
            config["gamma"],
            sd_r,
            sd_gamma,
            config["samples"],
            _seed(context),
            context.jobs,
            config["method"],
        )
        rows.append((sd_r, sd_gamma, mean, sem))
    return Dataset(context.command, ["sd_r", "sd_gamma", "beta_mean", "beta_sem"], rows, {"samples": config["samples"]})


DYNAMICS_CHAIN_MAP = {
    "n_emitters": F("int", 2),
    "gamma_r": F("float", 1.0),
    "delta": F("float", 0.0),
    "phi_tilde": F("float", 0.0),
    "omegas": F("floats"),
    "gamma_phis": F("floats", [0.0]),
}

DYNAMICS_GUE_MAP = {
    "r": F("float"),
    "gamma": F("float", 1.0),
    "delta": F("float", 0.0),
    "n_max": F("int", 3),
    "check_cutoff": F("bool", True),
    "omegas": F("floats"),
    "gamma_phis": F("floats", [0.0]),
}

DYNAMICS_TRAJECTORY = {
    "n_emitters": F("int", 2),
    "gamma_r": F("float", 1.0),
    "delta": F("float", 0.0),
    "phi_tilde": F("float", 0.0),
    "omega": F("float"),
    "gamma_phi": F("float", 0.0),
    "t_max": F("float"),
    "t_points": F("int", 201),
}


def _chain(config: dict, omega: float, gamma_phi: float) -> TwoLevelChain:
    return TwoLevelChain(
        n_emitters=config["n_emitters"],
        omega_rabi=omega,
        delta=config["delta"],
        gamma_r=config["gamma_r"],
        phi_tilde=config["phi_tilde"],
        noise=NoiseSpec(gamma_phi=gamma_phi),
    )


def _chain_map(config: dict, context: RunContext) -> Dataset:
    points = list(itertools.product(config["omegas"], config["gamma_phis"]))

    def evaluate(point: tuple[float, float]) -> tuple[float, float]:
        omega, gamma_phi = point
        chain = _chain(config, omega, gamma_phi)
        generator = MasterEquation.from_chain(chain)
        rho = steady_state(generator)
        dark = product_dimers(omega, chain.gamma_r, chain.n_emitters, chain.phi_tilde)
        lr = generator.lr
        flux = float(np.real(np.trace(lr.conj().T @ lr @ rho.matrix)))  # type: ignore[union-attr]
        return 1.0 - rho.fidelity(dark), flux

    values = _map(evaluate, points, context.jobs)
    rows = [(omega, gamma_phi, infidelity, flux) for (omega, gamma_phi), (infidelity, flux) in zip(points, values)]
    return Dataset(context.command, ["omega", "gamma_phi", "dark_infidelity", "output_flux"], rows)


def _gue_map(config: dict, context: RunContext) -> Dataset:
    params = optimal_gue(config["r"], config["gamma"], config["delta"], n_max=config["n_max"])
    gamma_r = optimal_params(config["r"], config["gamma"]).gamma_r
    ops = build_coupling_ops(params)
    points = list(itertools.product(config["omegas"], config["gamma_phis"]))

    def evaluate(point: tuple[float, float]) -> tuple[float, float]:
        omega, gamma_phi = point
        generator = MasterEquation.from_gue(params, DriveSpec.from_rabi(omega, gamma_r), NoiseSpec(gamma_phi=gamma_phi))
        rho = steady_state(generator)
        return flux_ratio(rho, ops.ll, ops.lr), rho.purity()

    values = _map(evaluate, points, context.jobs)
    rows = [(omega, gamma_phi, ratio, purity) for (omega, gamma_phi), (ratio, purity) in zip(points, values)]
    meta: dict[str, Any] = {"gamma_r": gamma_r}
    if config["check_cutoff"] and points:
        # The strongest drive populates the highest Fock states
        omega = max(config["omegas"])

        def observable(p, rho):
            coupling = build_coupling_ops(p)
            return flux_ratio(rho, coupling.ll, coupling.lr)

        _, shift = cutoff_convergence(
            params, DriveSpec.from_rabi(omega, gamma_r), NoiseSpec(gamma_phi=min(config["gamma_phis"])), observable
        )
        meta.update(cutoff_omega=omega, cutoff_shift=shift, cutoff_converged=bool(shift <= settings.QNET_CUTOFF_SHIFT))
    return Dataset(context.command, ["omega", "gamma_phi", "flux_ratio", "purity"], rows, meta)


def _trajectory(config: dict, context: RunContext) -> Dataset:
    chain = _chain(config, config["omega"], config["gamma_phi"])
    space = chain_space(chain.n_emitters)
    dark = product_dimers(chain.omega_rabi, chain.gamma_r, chain.n_emitters, chain.phi_tilde).vector
    overlap = Operator(space, np.outer(dark, dark.conj()), hermitian=True)
    ground = basis_state(space, [0] * chain.n_emitters)
    times = np.linspace(0.0, config["t_max"], config["t_points"])
    trajectory = evolve(MasterEquation.from_chain(chain), ground, times, [overlap])
    rows = [
        (t, float(np.real(value)), float(np.real(trace)), float(purity))
        for t, value, trace, purity in zip(
            trajectory.times, trajectory.expectations[0], trajectory.trace, trajectory.purity
        )
    ]
    meta = {"trace_drift": trajectory.trace_drift}
    return Dataset(context.command, ["t", "dark_overlap", "trace", "purity"], rows, meta)


@command(
    name="dynamics",
    help="Driven-dissipative steady states and trajectories of cascaded emitters and of a single GUE",
    modes={"chain_map": DYNAMICS_CHAIN_MAP, "gue_map": DYNAMICS_GUE_MAP, "trajectory": DYNAMICS_TRAJECTORY},
)
def cmd_dynamics(config: dict, context: RunContext) -> Dataset:
    if config["mode"] == "chain_map":
        return _chain_map(config, context)
    if config["mode"] == "gue_map":
        return _gue_map(config, context)
    return _trajectory(config, context)


SCATTER_PHASE_GATE = {
    "gamma_r": F("float", 1.0),
    "r": F("float", 0.0),
    "v_ratio": F("float", 1.0),
    "delta_ps": F("floats"),
}

SCATTER_PARITY = {
    "gamma_r": F("float", 1.0),
    "r": F("float", 0.0),
    "n_gs": F("ints"),
    "v_ratios": F("floats", [1.0]),
    "delta_ps": F("floats"),
    "idle": F("str", "exact", ("exact", "far")),
    "backend": BACKEND,
}

SCATTER_BACKENDS = {
    "gamma_r": F("float", 1.0),
    "r": F("float", 0.0),
    "n_nodes": F("ints"),
    "delta_ps": F("floats", [0.0]),
    "samples": F("int", 10),
}


def _parity_rows(config: dict, context: RunContext) -> list[tuple]:
    points = list(itertools.product(config["n_gs"], config["v_ratios"], config["delta_ps"]))

    def evaluate(point: tuple[int, float, float]) -> float:
        n_g, v_ratio, delta_p = point
        subset = range(1, n_g + 1)
        node = resonant_node(config["gamma_r"], config["r"], v_ratio)
        spec = parity_network(n_g, subset, config["gamma_r"], node, idle=config["idle"])
        return parity_fidelity(spec, subset, delta_p, config["backend"])

    values = _map(evaluate, points, context.jobs)
    return [(n_g, v_ratio, delta_p, value, 1.0 - value) for (n_g, v_ratio, delta_p), value in zip(points, values)]


def _backend_rows(config: dict, context: RunContext) -> list[tuple]:
    rng = np.random.default_rng(_seed(context))
    node = resonant_node(config["gamma_r"], config["r"])
    rows = []
    for n_nodes in config["n_nodes"]:
        for sample in range(config["samples"]):
            unitaries = [unitary_group.rvs(2, random_state=rng) for _ in range(n_nodes + 1)]
            spec = NetworkSpec((node,) * n_nodes, tuple(unitaries))
            for delta_p in config["delta_ps"]:
                ideal = line_diagonals(spec, delta_p, "ideal")
                general = line_diagonals(spec, delta_p, "general", context.jobs)
                difference = max(float(np.max(np.abs(ideal[line] - general[line]))) for line in ideal)
                rows.append((n_nodes, sample, delta_p, difference))
    return rows


@command(
    name="scatter",
    help="Single-photon phase gates, parity measurement fidelities and scattering backend comparison",
    modes={"phase_gate": SCATTER_PHASE_GATE, "parity": SCATTER_PARITY, "backends": SCATTER_BACKENDS},
)
def cmd_scatter(config: dict, context: RunContext) -> Dataset:
    if config["mode"] == "phase_gate":
        node = resonant_node(config["gamma_r"], config["r"], config["v_ratio"])
        rows = []
        for delta_p in config["delta_ps"]:
            t0, t1 = np.diag(ideal_phase_gate(node, delta_p))
            rows.append((delta_p, complex(t0), complex(t1), float(np.angle(t1 / t0))))
        return Dataset(context.command, ["delta_p", "t0", "t1", "relative_phase"], rows)

    if config["mode"] == "parity":
        rows = _parity_rows(config, context)
        columns = ["n_g", "v_ratio", "delta_p", "fidelity", "infidelity"]
        return Dataset(context.command, columns, rows, {"backend": config["backend"], "idle": config["idle"]})

    rows = _backend_rows(config, context)
    worst = max((row[-1] for row in rows), default=0.0)
    return Dataset(context.command, ["n_nodes", "sample", "delta_p", "max_difference"], rows, {"max_difference": worst})


PROTOCOL_COMMON = {"gamma_r": F("float", 1.0), "backend": BACKEND}

PROTOCOL_MODES = {
    "qst": {**PROTOCOL_COMMON, "n_nodes": F("int", 2), "delta_ps": F("floats", [0.0])},
    "qst_retry": {
        **PROTOCOL_COMMON,
        "loss_probability": F("float"),
        "runs": F("int", 10000),
        "input_state": F("floats", [1.0, 0.0]),
        "delta_p": F("float", 0.0),
    },
    "parity": {
        **PROTOCOL_COMMON,
        "n_qubits": F("int"),
        "subset": F("ints", None),
        "r": F("float", 0.0),
        "v_ratio": F("float", 1.0),
        "delta_ps": F("floats", [0.0]),
        "idle": F("str", "far", ("exact", "far")),
    },
    "ghz": {**PROTOCOL_COMMON, "n_qubits": F("int"), "delta_p": F("float", 0.0)},
    "cluster": {**PROTOCOL_COMMON, "n_qubits": F("int"), "delta_p": F("float", 0.0)},
    "toric": {
        **PROTOCOL_COMMON,
        "n_side": F("int", 2),
        "action": F("str", "generate", ("generate", *ACTIONS)),
        "delta_p": F("float", 0.0),
        "sample": F("bool", False),
        "phi": F("float", 0.0),
        "string": F("str", "Z1", ("Z1", "Z2", "X1", "X2")),
        "amplitudes": F("floats", [1.0, 0.0]),
    },
    "detector": {"gamma_r": F("float", 1.0), "delta_ps": F("floats")},
    "pulse": {
        **PROTOCOL_COMMON,
        "n_qubits": F("int", 4),
        "r": F("float", 0.0),
        "v_ratio": F("float", 1.0),
        "duration": F("float"),
        "sigmas": F("floats"),
        "idle": F("str", "exact", ("exact", "far")),
    },
}


def _outcome_dataset(context: RunContext, outcome: ProtocolOutcome, lattice: ToricLattice | None = None) -> Dataset:
    """One row per measurement branch: record, probability, fidelity and applied corrections"""
    columns = ["record", "probability", "fidelity", "corrections"]
    if lattice is not None:
        columns.append("min_stabilizer")
    rows = []
    for branch in outcome.branches:
        row: list = [" ".join(branch.record), branch.probability, branch.fidelity, " ".join(branch.corrections)]
        if lattice is not None:
            if branch.state is None or any(label not in branch.state.labels for label in lattice.labels):
                row.append(None)
            else:
                plaquettes, vertices = stabilizer_values(branch.state, lattice)
                row.append(float(min(np.min(plaquettes), np.min(vertices))))
        rows.append(tuple(row))
    meta = {key: plain(value) for key, value in outcome.data.items() if key != "trials"}
    meta["protocol"] = outcome.name
    meta["fidelity"] = outcome.fidelity
    meta["total_probability"] = outcome.total_probability()
    return Dataset(context.command, columns, rows, meta)


def _pulse_dataset(config: dict, context: RunContext) -> Dataset:
    subset = range(1, config["n_qubits"] + 1)
    node = resonant_node(config["gamma_r"], config["r"], config["v_ratio"])
    spec = parity_network(config["n_qubits"], subset, config["gamma_r"], node, idle=config["idle"])
    scan = pulse_fidelity_scan(
        lambda delta_p: parity_fidelity(spec, subset, delta_p, config["backend"]), config["duration"], config["sigmas"]
    )
    rows = list(zip(scan.sigmas.tolist(), scan.fidelities.tolist()))
    meta = {"best_sigma": scan.best_sigma, "best_fidelity": scan.best_fidelity, "duration": config["duration"]}
    return Dataset(context.command, ["sigma_t", "fidelity"], rows, meta)


def _toric_dataset(config: dict, context: RunContext) -> Dataset:
    lattice = ToricLattice(config["n_side"])
    if config["action"] == "generate":
        seed = _seed(context) if config["sample"] else None
        outcome = toric_generate(lattice, config["delta_p"], seed, config["gamma_r"], config["backend"])
    else:
        outcome = toric_logical(
            lattice,
            config["action"],
            delta_p=config["delta_p"],
            gamma_r=config["gamma_r"],
            backend=config["backend"],
            phi=config["phi"],
            string=config["string"],
            amplitudes=config["amplitudes"],
        )
    return _outcome_dataset(context, outcome, lattice)


@command(
    name="protocol",
    help="State transfer, parity, GHZ, cluster, toric code, photon detector and pulse-averaged protocols",
    modes=PROTOCOL_MODES,
)
def cmd_protocol(config: dict, context: RunContext) -> Dataset:  # noqa: C901
    mode = config["mode"]
    gamma_r, backend = config.get("gamma_r", 1.0), config.get("backend", "ideal")

    if mode == "qst":
        spec = transfer_network(config["n_nodes"], gamma_r)
        rows = []
        for delta_p in config["delta_ps"]:
            closed_form = float(qst_fidelity_closed_form(delta_p, gamma_r))
            rows.append((delta_p, closed_form, qst_entanglement_fidelity(spec, delta_p, backend)))
        return Dataset(context.command, ["delta_p", "closed_form", "simulated"], rows)

    if mode == "qst_retry":
        outcome = run_heralded_retry(
            config["loss_probability"],
            config["input_state"],
            _seed(context),
            config["runs"],
            config["delta_p"],
            gamma_r,
            backend,
        )
        rows = [(int(branch.record[0].split(":")[1]), branch.probability) for branch in outcome.branches]
        meta = {key: plain(value) for key, value in outcome.data.items() if key != "trials"}
        meta["fidelity"] = outcome.fidelity
        return Dataset(context.command, ["trials", "frequency"], rows, meta)

    if mode == "parity":
        subset = config["subset"] or list(range(1, config["n_qubits"] + 1))
        node = resonant_node(gamma_r, config["r"], config["v_ratio"])
        spec = parity_network(config["n_qubits"], subset, gamma_r, node, idle=config["idle"])
        rows = [(delta_p, parity_fidelity(spec, subset, delta_p, backend)) for delta_p in config["delta_ps"]]
        return Dataset(context.command, ["delta_p", "fidelity"], rows, {"subset": subset})

    if mode in ("ghz", "cluster"):
        prepare = prepare_ghz if mode == "ghz" else prepare_cluster_1d
        return _outcome_dataset(context, prepare(config["n_qubits"], config["delta_p"], gamma_r, backend))

    if mode == "toric":
        return _toric_dataset(config, context)

    if mode == "detector":
        responses = [photon_detector(delta_p, gamma_r) for delta_p in config["delta_ps"]]
        rows = [(response.delta_p, response.p_click, response.p_no_click) for response in responses]
        return Dataset(context.command, ["delta_p", "p_click", "p_no_click"], rows)

    return _pulse_dataset(config, context)


CIRCUIT = {
    "ej1": F("float"),
    "ej2": F("float"),
    "ejc": F("float", 0.0),
    "c1": F("float"),
    "c2": F("float"),
    "cc": F("float", 0.0),
    "cp1": F("float"),
    "cp2": F("float"),
    "omega0": F("float"),
    "z0": F("float", 50.0),
}

INTERFACE = {
    **CIRCUIT,
    "ejq": F("float"),
    "cq": F("float"),
    "ejc_q1": F("float", 0.0),
    "ejc_q2": F("float", 0.0),
    "ccc1": F("float", 0.0),
    "ccc2": F("float", 0.0),
    "omega_q": F("float", None),
    "phase_qd": F("float", float(np.pi)),
}

CIRCUIT_MODES = {
    "effective": CIRCUIT,
    "renormalized": {**CIRCUIT, "n_max": F("int", 6), "assignment": F("str", "overlap", ("overlap", "diagonal"))},
    "interface": INTERFACE,
    "subradiance": {"phases": F("floats"), "geff1": F("float"), "geff2": F("float")},
    "chi_sweep": {
        "ratios": F("floats"),
        "omega0": F("float"),
        "r": F("float"),
        "n_max": F("int", 6),
        "optimize": F("bool", True),
    },
    "optimize": {**CIRCUIT, "n_max": F("int", 6), "rtol": F("float", 1e-9)},
}

PARAMETER_COLUMNS = ["parameter", "rad_s", "ghz"]


def _circuit(config: dict) -> CircuitParams:
    """Circuit parameters from energies in GHz and capacitances in fF"""
    return CircuitParams(
        ej1=config["ej1"] * GHZ,
        ej2=config["ej2"] * GHZ,
        ejc=config["ejc"] * GHZ,
        c1=config["c1"] * FEMTOFARAD,
        c2=config["c2"] * FEMTOFARAD,
        cc=config["cc"] * FEMTOFARAD,
        cp1=config["cp1"] * FEMTOFARAD,
        cp2=config["cp2"] * FEMTOFARAD,
        omega0=config["omega0"] * GHZ,
        z0=config["z0"],
    )


def _parameter_rows(values: dict[str, float]) -> list[tuple]:
    return [(name, float(value), float(value) / GHZ) for name, value in values.items()]


def _effective_dataset(config: dict, context: RunContext) -> Dataset:
    cp = _circuit(config)
    model = effective_model(cp)
    rates = ("omega1", "omega2", "u1", "u2", "j_c", "j_i", "chi", "gamma1", "gamma2")
    rows = _parameter_rows({name: getattr(model, name) for name in rates} | {"j": model.j})
    rows += [("r1", model.r1, None), ("r2", model.r2, None)]
    return Dataset(context.command, PARAMETER_COLUMNS, rows, {"weak_coupling": cp.weak_coupling})


def _renormalized_dataset(config: dict, context: RunContext) -> Dataset:
    cp = _circuit(config)
    _, extracted = renormalized_hamiltonian(cp, config["n_max"], config["assignment"])
    model = effective_model(cp)
    analytic = {
        "omega1": model.omega1,
        "omega2": model.omega2,
        "u1": model.u1,
        "u2": model.u2,
        "j": model.j,
        "chi": model.chi,
    }
    rows = [(name, float(extracted[name]), value, float(extracted[name]) / GHZ) for name, value in analytic.items()]
    meta = {"ambiguous": extracted["ambiguous"], "min_overlap": extracted["min_overlap"], "n_max": config["n_max"]}
    return Dataset(context.command, ["parameter", "numeric", "analytic", "numeric_ghz"], rows, meta)


def _interface_dataset(config: dict, context: RunContext) -> Dataset:
    cp = _circuit(config)
    ip = InterfaceParams(
        ejq=config["ejq"] * GHZ,
        cq=config["cq"] * FEMTOFARAD,
        ejc1=config["ejc_q1"] * GHZ,
        ejc2=config["ejc_q2"] * GHZ,
        ccc1=config["ccc1"] * FEMTOFARAD,
        ccc2=config["ccc2"] * FEMTOFARAD,
        phase_qd=config["phase_qd"],
        omega_q=None if config["omega_q"] is None else config["omega_q"] * GHZ,
    )
    model = interface_model(ip, cp)
    names = (
        "omega_q",
        "v1",
        "v2",
        "jc1",
        "jc2",
        "ji1",
        "ji2",
        "gamma_q1",
        "gamma_q2",
        "gamma_q1_eff",
        "gamma_q2_eff",
        "delta_q",
        "gamma_q",
    )
    rows = _parameter_rows({name: getattr(model, name) for name in names})
    meta = {
        "rotating_wave": model.rotating_wave,
        "exchange_residuals": list(model.exchange_residuals),
        "balanced_ejc_ghz": [balanced_coupler_energy(ip, cp, k) / GHZ for k in (1, 2)],
    }
    return Dataset(context.command, PARAMETER_COLUMNS, rows, meta)


def _optimize_dataset(config: dict, context: RunContext) -> Dataset:
    cp, extracted = optimize_circuit(_circuit(config), config["n_max"], config["rtol"])
    values = {"ej1": cp.ej1, "ej2": cp.ej2, "ejc": cp.ejc}
    values |= {name: float(extracted[name]) for name in ("omega1", "omega2", "u1", "u2", "j", "chi", "j_opt")}
    return Dataset(context.command, PARAMETER_COLUMNS, _parameter_rows(values), {"ambiguous": extracted["ambiguous"]})


@command(
    name="circuit",
    help="Superconducting circuit mapping: effective model, renormalized levels, qubit interface and chi trends",
    modes=CIRCUIT_MODES,
)
def cmd_circuit(config: dict, context: RunContext) -> Dataset:
    mode = config["mode"]
    if mode == "effective":
        return _effective_dataset(config, context)
    if mode == "renormalized":
        return _renormalized_dataset(config, context)
    if mode == "interface":
        return _interface_dataset(config, context)
    if mode == "optimize":
        return _optimize_dataset(config, context)
    if mode == "subradiance":
        rows = [
            (phase, *subradiance(phase, config["geff1"] * GHZ, config["geff2"] * GHZ)) for phase in config["phases"]
        ]
        return Dataset(context.command, ["phase", "delta_q", "gamma_q"], rows, {"units": "rad/s"})

    sweep = chi_sweep(config["ratios"], config["omega0"] * GHZ, config["r"], config["n_max"], config["optimize"])
    rows = list(
        zip(sweep.ratios.tolist(), sweep.chi_analytic.tolist(), sweep.chi_numeric.tolist(), sweep.u_numeric.tolist())
    )
    meta = {"slope": sweep.slope, "units": "rad/s"}
    return Dataset(context.command, ["ratio", "chi_analytic", "chi_numeric", "u_numeric"], rows, meta)
