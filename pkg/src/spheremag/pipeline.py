"""Command implementations shared by the compute service and the CLI client.

Every function takes a validated config model and returns (result, tables):
``result`` is a JSON-ready dict, ``tables`` maps CSV file stems to their text.
Outputs are deterministic functions of the config; reruns must reproduce them
byte for byte.
"""

from __future__ import annotations

import math

import numpy as np

from . import documents as doc
from . import schemas
from .fields import (
    ZETA,
    display_grid,
    example_inducing_field,
    example_magnetization,
    example_susceptibility,
)
from .forward import AbelPoissonBasis, PotentialSamples, potential_direct, \
    potential_exterior_spectral
from .harmonics import ScalarCoeffs, VectorCoeffs, coeff_size, degrees_flat, \
    scalar_synthesis, vector_harm, vector_synthesis, vsht_forward
from .inverse import ReconstructionProblem, assemble_operator, evaluate_candidate, solve_spd
from .sphere import CapRegion, PointSet, fibonacci_points, gauss_grid_for_degree, grid_norm
from .uniqueness import UnidirectionalSpec, hardy_hodge_energy, make_silent_exterior, \
    silence_score, solve_existence_truncated, unidirectional_silent

DEFAULT_SOURCE_EXACTNESS = 400


def _source_grid(exactness: int | None):
    return gauss_grid_for_degree(exactness or DEFAULT_SOURCE_EXACTNESS)


def _display_tables(prefix: str, values_fn) -> dict:
    lat_axis, lon_axis, pts = display_grid()
    lon, lat = doc.display_lon_lat(lat_axis, lon_axis)
    return {name: doc.field_table(lon, lat, vals)
            for name, vals in values_fn(pts, prefix).items()}


def _synth_potential(example: int, radius: float, eval_exactness: int,
                     source_exactness: int | None):
    eval_grid = gauss_grid_for_degree(eval_exactness)
    src = _source_grid(source_exactness)
    m = example_magnetization(example, src.nodes)
    values = potential_direct(m, src, radius * eval_grid.nodes)
    return eval_grid, src, m, values


def run_synth(cfg: schemas.SynthConfig):
    data_grid, src, m, values = _synth_potential(
        cfg.example, cfg.radius, cfg.data_grid_exactness, cfg.source_grid_exactness)
    result = {
        "config": cfg.model_dump(),
        "data": {
            "example": cfg.example,
            "radius": doc.fnum(cfg.radius),
            "data_grid_exactness": cfg.data_grid_exactness,
            "values": doc.flist(values),
        },
        "metrics": {
            "potential_max_abs": doc.fnum(np.max(np.abs(values))),
            "potential_l2": doc.fnum(
                math.sqrt(float(values**2 @ (cfg.radius**2 * data_grid.weights)))),
            "magnetization_l2": doc.fnum(grid_norm(m, src)),
        },
    }
    lon, lat = doc.grid_lon_lat(data_grid)
    tables = {"field_V_data": doc.field_table(lon, lat, values)}
    if cfg.display:
        lat_axis, lon_axis, pts = display_grid()
        dlon, dlat = doc.display_lon_lat(lat_axis, lon_axis)
        q = example_susceptibility(cfg.example, pts)
        v = example_inducing_field(cfg.example, pts)
        tables["field_Q_true"] = doc.field_table(dlon, dlat, q)
        for i, comp in enumerate("xyz"):
            tables[f"field_v_{comp}"] = doc.field_table(dlon, dlat, v[:, i])
    return result, tables


def run_forward(cfg: schemas.ForwardConfig):
    eval_grid, src, m, values = _synth_potential(
        cfg.example, cfg.radius, cfg.eval_grid_exactness, cfg.source_grid_exactness)
    lon, lat = doc.grid_lon_lat(eval_grid)
    result = {
        "config": cfg.model_dump(),
        "radius": doc.fnum(cfg.radius),
        "values": doc.flist(values),
        "metrics": {"potential_max_abs": doc.fnum(np.max(np.abs(values)))},
    }
    return result, {"field_V_forward": doc.field_table(lon, lat, values)}


def _field_from_spec(spec, points, L_hint: int | None = None):
    """Samples of the configured field at points, plus its natural band limit (or None)."""
    if isinstance(spec, schemas.VectorHarmonicField):
        if spec.order_index > 2 * spec.degree + 1:
            raise ValueError("order_index exceeds 2*degree + 1")
        return vector_harm(spec.family, spec.degree, spec.order_index, points), spec.degree
    if isinstance(spec, schemas.ExampleField):
        return example_magnetization(spec.example, points), None
    if isinstance(spec, schemas.RandomField):
        rng = np.random.default_rng(spec.seed)
        scale = spec.decay ** degrees_flat(spec.L)
        c1 = rng.standard_normal(coeff_size(spec.L)) * scale
        c2 = rng.standard_normal(coeff_size(spec.L)) * scale
        c3 = rng.standard_normal(coeff_size(spec.L)) * scale
        c2[0] = c3[0] = 0.0
        return vector_synthesis(VectorCoeffs(spec.L, c1, c2, c3), points), spec.L
    if isinstance(spec, schemas.UnidirectionalField):
        uspec = UnidirectionalSpec(zeta=np.array(spec.axis), v3=spec.v3,
                                   support=tuple(spec.support))
        return unidirectional_silent(uspec, points), None
    raise ValueError(f"unsupported field spec {spec!r}")


def run_decompose(cfg: schemas.DecomposeConfig):
    exactness = cfg.grid_exactness or max(2 * cfg.L + 2, 16)
    if exactness < 2 * cfg.L + 2:
        raise ValueError("grid exactness must be at least 2L + 2 for the vector transform")
    grid = gauss_grid_for_degree(exactness)
    samples, _ = _field_from_spec(cfg.field_spec, grid.nodes)
    coeffs = vsht_forward(samples, grid, cfg.L)
    e1, e2, e3 = coeffs.energies()
    total = e1 + e2 + e3
    result = {
        "config": cfg.model_dump(),
        "energies": {"e1": doc.fnum(e1), "e2": doc.fnum(e2), "e3": doc.fnum(e3)},
        "fractions": {
            "e1": doc.fnum(e1 / total) if total else 0.0,
            "e2": doc.fnum(e2 / total) if total else 0.0,
            "e3": doc.fnum(e3 / total) if total else 0.0,
        },
        "field_l2_on_grid": doc.fnum(grid_norm(samples, grid)),
        "coefficients": [
            {"L": cfg.L, "family": i, "values": doc.flist(coeffs.family(i))}
            for i in (1, 2, 3)
        ],
    }
    return result, {}


def run_reconstruct(req: schemas.ReconstructRequest):
    data_grid = gauss_grid_for_degree(req.data.data_grid_exactness)
    values = np.asarray(req.data.values, dtype=float)
    if values.shape != (data_grid.n_nodes,):
        raise ValueError(
            f"data document carries {values.size} values but its grid has "
            f"{data_grid.n_nodes} nodes")
    data = PotentialSamples(radius=req.data.radius, grid=data_grid, values=values)
    basis = AbelPoissonBasis(centers=fibonacci_points(req.n_centers), h=req.h)
    region = CapRegion(axis=np.array(req.region_axis), threshold=req.region_threshold)
    example = req.data.example

    def v_fn(pts):
        return example_inducing_field(example, pts)

    problem = ReconstructionProblem(data=data, v_fn=v_fn, basis=basis, region=region,
                                    alpha=0.0, ridge=req.ridge)
    op = assemble_operator(problem)
    err_grid = gauss_grid_for_degree(req.error_grid_exactness)
    q_true = example_susceptibility(example, err_grid.nodes)
    q_true_norm = grid_norm(q_true, err_grid)

    records = []
    tables = {}
    if req.display:
        lat_axis, lon_axis, pts = display_grid()
        dlon, dlat = doc.display_lon_lat(lat_axis, lon_axis)
        tables["field_Q_true"] = doc.field_table(
            dlon, dlat, example_susceptibility(example, pts))
    for idx, alpha in enumerate(req.alphas):
        M, g = op.system(alpha)
        gamma, diagnostics = solve_spd(M, g, req.ridge)
        misfit = op.misfit(gamma)
        leakage = op.leakage(gamma)
        qbar = evaluate_candidate(basis, gamma, err_grid.nodes)
        rel_error = grid_norm(qbar - q_true, err_grid) / q_true_norm
        records.append({
            "alpha": doc.fnum(alpha),
            "misfit": doc.fnum(misfit),
            "leakage": doc.fnum(leakage),
            "functional": doc.fnum(misfit + alpha * leakage),
            "rel_error_vs_truth": doc.fnum(rel_error),
            "diagnostics": {k: doc.fnum(v) if isinstance(v, float) else v
                            for k, v in diagnostics.items()},
            "gamma": doc.flist(gamma),
        })
        if req.display:
            qd = evaluate_candidate(basis, gamma, pts)
            tables[f"field_Qbar_alpha{idx}"] = doc.field_table(dlon, dlat, qd)
    result = {
        "config": req.model_dump(exclude={"data"}),
        "data_summary": {
            "example": example,
            "radius": doc.fnum(req.data.radius),
            "data_grid_exactness": req.data.data_grid_exactness,
            "n_values": len(req.data.values),
            "potential_l2": doc.fnum(math.sqrt(data.norm_squared())),
        },
        "records": records,
    }
    return result, tables


def run_silent(cfg: schemas.SilentConfig):
    grid = gauss_grid_for_degree(cfg.grid_exactness)
    if cfg.mode == "unidirectional":
        spec = UnidirectionalSpec(v3=cfg.v3, support=tuple(cfg.support))
        m = unidirectional_silent(spec, grid.nodes)
        upper = grid.nodes @ ZETA > 0.0
        extra = {
            "max_abs_outside_support": doc.fnum(
                np.max(np.abs(m[grid.nodes @ ZETA > cfg.support[1]]))
                if np.any(grid.nodes @ ZETA > cfg.support[1]) else 0.0),
            "max_abs_upper_hemisphere": doc.fnum(
                np.max(np.abs(m[upper])) if np.any(upper) else 0.0),
            "max_radial_component": doc.fnum(np.max(np.abs(np.sum(m * grid.nodes, axis=1)))),
        }
    else:
        rng = np.random.default_rng(cfg.seed)
        s1 = ScalarCoeffs(cfg.L, rng.standard_normal(coeff_size(cfg.L)))
        s3v = rng.standard_normal(coeff_size(cfg.L))
        s3v[0] = 0.0
        s3 = ScalarCoeffs(cfg.L, s3v)
        m = make_silent_exterior(s1, s3, grid.nodes)
        e1, e2, e3 = hardy_hodge_energy(m, grid, cfg.L)
        extra = {"energy_fractions": {
            "e1": doc.fnum(e1 / (e1 + e2 + e3)),
            "e2": doc.fnum(e2 / (e1 + e2 + e3)),
            "e3": doc.fnum(e3 / (e1 + e2 + e3)),
        }}
    r_out, r_in = cfg.radii
    result = {
        "config": cfg.model_dump(),
        "silence_score_outside": doc.fnum(silence_score(m, r_out, grid)),
        "silence_score_inside": doc.fnum(silence_score(m, r_in, grid)),
        "magnetization_l2": doc.fnum(grid_norm(m, grid)),
    }
    result.update(extra)
    return result, {}


def run_existence(cfg: schemas.ExistenceConfig):
    exactness = cfg.grid_exactness or (2 * cfg.L + 16)
    grid = gauss_grid_for_degree(exactness)
    axis = np.array(cfg.axis, dtype=float)

    def v_fn(pts):
        if cfg.v_kind == "radial":
            return np.array(pts, dtype=float, copy=True)
        tang = axis[None, :] - (pts @ axis)[:, None] * pts
        return pts + cfg.epsilon * tang

    rng = np.random.default_rng(cfg.target_seed)
    scale = cfg.target_decay ** degrees_flat(cfg.L)
    c1 = rng.standard_normal(coeff_size(cfg.L)) * scale
    c2 = rng.standard_normal(coeff_size(cfg.L)) * scale
    c3 = rng.standard_normal(coeff_size(cfg.L)) * scale
    c2[0] = c3[0] = 0.0
    target = VectorCoeffs(cfg.L, c1, c2, c3)

    model = solve_existence_truncated(target, v_fn(grid.nodes), cfg.L, grid)
    eval_pts = fibonacci_points(cfg.n_eval).centers * cfg.eval_radius
    v_target = potential_exterior_spectral(target, eval_pts)
    big = gauss_grid_for_degree(DEFAULT_SOURCE_EXACTNESS)
    q_big = scalar_synthesis(model.diagnostics["m1_coeffs"], cfg.L, big.nodes) \
        / np.sum(big.nodes * v_fn(big.nodes), axis=1)
    m_big = q_big[:, None] * v_fn(big.nodes)
    v_model = potential_direct(m_big, big, eval_pts)
    denom = max(float(np.max(np.abs(v_target))), 1e-300)
    result = {
        "config": cfg.model_dump(),
        "system": {
            "residual_rel": doc.fnum(model.diagnostics["residual_rel"]),
            "sigma_min": doc.fnum(model.diagnostics["sigma_min"]),
            "sigma_max": doc.fnum(model.diagnostics["sigma_max"]),
            "radial_bound": doc.fnum(model.diagnostics["radial_bound"]),
        },
        "equivalence": {
            "max_abs_err": doc.fnum(np.max(np.abs(v_model - v_target))),
            "rel_err": doc.fnum(np.max(np.abs(v_model - v_target)) / denom),
            "target_max_abs": doc.fnum(np.max(np.abs(v_target))),
        },
        "m1_coefficients": {"L": cfg.L, "values": doc.flist(model.diagnostics["m1_coeffs"])},
        "m2_coefficients": {"L": cfg.L, "values": doc.flist(model.diagnostics["m2_coeffs"])},
    }
    return result, {}


COMMANDS = {
    "synth": (schemas.SynthConfig, run_synth),
    "forward": (schemas.ForwardConfig, run_forward),
    "decompose": (schemas.DecomposeConfig, run_decompose),
    "reconstruct": (schemas.ReconstructRequest, run_reconstruct),
    "silent": (schemas.SilentConfig, run_silent),
    "existence": (schemas.ExistenceConfig, run_existence),
}
