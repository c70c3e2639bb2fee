//! One function per subcommand. Each returns the deterministic part of the
//! report plus any extra files, and never touches the clock.

use serde::Serialize;
use serde_json::{json, Value};

use resource_engine::athermality::{
    ground_state_reachable, lower_bound_polytope, qubit_reachable_set, simulate, tilde_states,
    top_ratio, EngineParams, Start,
};
use resource_engine::coherence::{
    alternating_product, c_u, check_h2_pattern, fractional_fourier, gram_pattern, graph_diagnosis,
    lower_bound_strokes, pattern_matrix, synthesize_dense_product, UnitaryMatrix,
};
use resource_engine::hull::hull_distance;
use resource_engine::mutual::{
    necessary_conditions, permutation_proximity_blocker, row_maximum_blocker, search_flat_column,
    search_unbiased_state, verify_mutually_coherent,
};
use resource_engine::qubit::{
    constructive_stroke_bound, fidelity, plan_error, sharp_stroke_bound, state_stroke_bound,
    synthesize_state, synthesize_unitary,
};
use resource_engine::thermo::{EnergyLevels, ProbabilityVector};

use crate::config::{Loaded, Mode, NamedStart, StartSpec};
use crate::error::{CliError, CliResult};
use crate::matrix;
use crate::svg::simplex_svg;

/// LP slack for calling a point inside a hull.
const INSIDE_TOL: f64 = 1e-6;

#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Value,
    /// Extra output files, name and contents.
    pub files: Vec<(String, String)>,
    /// Validation failures; any entry turns into exit code 3 after the
    /// outputs are written.
    pub failures: Vec<String>,
}

/// JSON has no infinities, so non-finite values become strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data serializes")
}

fn config_err(e: resource_engine::Error) -> CliError {
    CliError::Config(e.to_string())
}

fn complex_rows(u: &UnitaryMatrix) -> Value {
    let m = u.matrix();
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect();
    to_value(&rows)
}

pub fn run(mode: Mode, loaded: &Loaded) -> CliResult<Outcome> {
    match mode {
        Mode::Athermality => athermality(loaded),
        Mode::Coherence => coherence(loaded),
        Mode::Fig4 => fig4(loaded),
        Mode::QubitSynth => qubit_synth(loaded),
        Mode::Mutual => mutual(loaded),
    }
}

fn vertex_rows(v: &[ProbabilityVector]) -> Vec<Vec<f64>> {
    v.iter().map(|p| p.as_slice().to_vec()).collect()
}

fn athermality(loaded: &Loaded) -> CliResult<Outcome> {
    let a = loaded
        .config
        .athermality
        .as_ref()
        .expect("section filled on load");
    let levels = EnergyLevels::new(a.energies.clone()).map_err(config_err)?;
    let params = EngineParams::new(levels, a.alpha, a.beta).map_err(config_err)?;
    let d = params.dim();
    let (start, start_state) = match &a.start {
        StartSpec::Named(NamedStart::Cold) => (Start::FromCold, params.cold().clone()),
        StartSpec::Named(NamedStart::Hot) => (Start::FromHot, params.hot().clone()),
        StartSpec::State(p) => {
            let p = ProbabilityVector::new(p.clone()).map_err(config_err)?;
            (Start::Custom(p.clone()), p)
        }
    };
    // stroke 1 is the preparation itself, so 0 and 1 both give the start alone
    let sets = simulate(&params, &start, a.max_strokes.max(1), a.tol)?;
    let last = sets.last().expect("at least the starting state");

    let bound = top_ratio(&params);
    let thermal_start = !matches!(start, Start::Custom(_));
    let max_top = sets
        .iter()
        .flat_map(|s| s.vertices.iter().map(|v| v[d - 1]))
        .fold(0.0, f64::max);
    let bound_holds = max_top <= bound + resource_engine::tol::TOL_CURVE;
    let mut failures = Vec::new();
    if thermal_start && !bound_holds {
        failures.push(format!(
            "top-level weight {max_top} exceeds the bound {bound}"
        ));
    }

    let distinct = a.alpha > a.beta;
    let tilde = if distinct {
        tilde_states(&params).ok()
    } else {
        None
    };
    let polytope = if distinct {
        lower_bound_polytope(&params).ok()
    } else {
        None
    };
    let hull: Vec<&[f64]> = last.vertices.iter().map(|v| v.as_slice()).collect();
    let polytope_json = polytope.as_ref().map(|poly| {
        let dist: Vec<f64> = poly
            .iter()
            .map(|v| hull_distance(&hull, v.as_slice()))
            .collect();
        let worst = dist.iter().cloned().fold(0.0, f64::max);
        json!({
            "vertices": vertex_rows(poly),
            "max_lp_distance": num(worst),
            "inside_final_hull": worst <= INSIDE_TOL,
        })
    });
    let qubit_limit = if d == 2 && distinct {
        qubit_reachable_set(&start_state, &params, None)
            .ok()
            .map(|q| to_value(&q))
    } else {
        None
    };

    let strokes: Vec<Value> = sets
        .iter()
        .map(|s| {
            json!({
                "stroke": s.stroke_index,
                "vertex_count": s.vertices.len(),
                "hausdorff_delta": num(s.hausdorff_delta),
                "converged": s.converged,
            })
        })
        .collect();
    let results = json!({
        "dim": d,
        "cold_gibbs": params.cold().as_slice(),
        "hot_gibbs": params.hot().as_slice(),
        "start": start_state.as_slice(),
        "strokes_run": last.stroke_index,
        "converged": last.converged,
        "strokes": strokes,
        "final_vertices": vertex_rows(&last.vertices),
        "top_weight": {
            "bound": num(bound),
            "max_observed": num(max_top),
            "holds": bound_holds,
            "guaranteed": thermal_start,
        },
        "ground_state": to_value(&ground_state_reachable(&params)),
        "tilde_states": tilde.as_ref().map(|t| json!({
            "gamma_tilde": t.gamma_tilde.as_slice(),
            "big_gamma_tilde": t.big_gamma_tilde.as_slice(),
        })),
        "polytope": polytope_json,
        "qubit_limit": qubit_limit,
    });

    let mut files = vec![("vertices.csv".to_string(), vertices_csv(&sets, d)?)];
    if d == 3 {
        let hull = vertex_rows(&last.vertices);
        let poly = polytope.as_deref().map(vertex_rows).unwrap_or_default();
        files.push(("simplex.svg".into(), simplex_svg(&hull, &poly, bound)));
    }
    Ok(Outcome {
        results,
        files,
        failures,
    })
}

fn vertices_csv(
    sets: &[resource_engine::athermality::ReachableSet],
    d: usize,
) -> CliResult<String> {
    let mut rows: Vec<(usize, &[f64])> = sets
        .iter()
        .flat_map(|s| {
            s.vertices
                .iter()
                .map(move |v| (s.stroke_index, v.as_slice()))
        })
        .collect();
    rows.sort_by(|a, b| {
        a.0.cmp(&b.0).then_with(|| {
            a.1.iter()
                .zip(b.1)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["stroke".to_string()];
    header.extend((1..=d).map(|k| format!("p{k}")));
    let csv_err = |e: csv::Error| CliError::Numeric(format!("csv: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    for (stroke, v) in rows {
        let mut rec = vec![stroke.to_string()];
        rec.extend(v.iter().map(|x| x.to_string()));
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Numeric(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("ascii"))
}

fn require_dim(u: &UnitaryMatrix, min: usize, mode: &str) -> CliResult<()> {
    if u.dim() < min {
        return Err(CliError::Config(format!(
            "{mode} needs a matrix of dimension at least {min}, got {}",
            u.dim()
        )));
    }
    Ok(())
}

fn budget(configured: usize, d: usize) -> usize {
    if configured == 0 {
        4 * d
    } else {
        configured
    }
}

fn blockers(u: &UnitaryMatrix) -> Value {
    json!({
        "necessary_conditions": to_value(&necessary_conditions(u)),
        "necessary_conditions_adjoint": to_value(&necessary_conditions(&u.adjoint())),
        "row_maximum_blocker": row_maximum_blocker(u),
        "permutation_proximity": to_value(&permutation_proximity_blocker(u)),
    })
}

fn coherence(loaded: &Loaded) -> CliResult<Outcome> {
    let c = loaded
        .config
        .coherence
        .as_ref()
        .expect("section filled on load");
    let seed = loaded.config.seed;
    let u = matrix::load(c.source(), loaded, "two_step_dense_6", 0)?;
    require_dim(&u, 2, "coherence")?;
    let d = u.dim();
    let pattern = pattern_matrix(&u, c.tol_zero);
    let rows: Vec<String> = pattern
        .to_bits()
        .iter()
        .map(|r| r.iter().map(|&b| if b { '1' } else { '0' }).collect())
        .collect();
    let verdict = check_h2_pattern(&pattern);
    let diagnosis = graph_diagnosis(&gram_pattern(&pattern));
    let (cu, lower) = if d >= 3 {
        (Some(c_u(&u)?), Some(lower_bound_strokes(&u)?))
    } else {
        (None, None)
    };
    let witness = match (c.dense_witness, verdict.minimal_m) {
        (true, Some(m)) => Some(match synthesize_dense_product(&u, m, seed) {
            Ok(diags) => {
                let p = alternating_product(&u, &diags);
                let min_mod = p.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
                json!({
                    "m": m,
                    "phases": diags.iter().map(|x| x.phases().to_vec()).collect::<Vec<_>>(),
                    "min_modulus": num(min_mod),
                })
            }
            Err(e) => json!({ "m": m, "error": e.to_string() }),
        }),
        _ => None,
    };
    let flat = search_flat_column(&u, budget(c.search_budget, d), seed, c.tol_flat);
    let results = json!({
        "dim": d,
        "unitarity_defect": num(u.defect()),
        "pattern": rows,
        "h2": to_value(&verdict),
        "graph": to_value(&diagnosis),
        "c_u": cu.map(num),
        "stroke_lower_bound": lower.map(num),
        "dense_witness": witness,
        "blockers": blockers(&u),
        "flat_column": to_value(&flat),
    });
    Ok(Outcome {
        results,
        ..Default::default()
    })
}

fn mutual(loaded: &Loaded) -> CliResult<Outcome> {
    let c = loaded
        .config
        .mutual
        .as_ref()
        .expect("section filled on load");
    let seed = loaded.config.seed;
    let u = matrix::load(c.source(), loaded, "fourier d=3", 0)?;
    require_dim(&u, 2, "mutual")?;
    let d = u.dim();
    let n = budget(c.search_budget, d);
    let flat = search_flat_column(&u, n, seed, c.tol_flat);
    let mut failures = Vec::new();
    if let Some(s) = flat.solution() {
        if !verify_mutually_coherent(&u, &s.state, 10.0 * c.tol_flat) {
            failures.push("flat-column state fails verification".into());
        }
    }
    let unbiased = if c.unbiased_state {
        Some(match search_unbiased_state(&u, 2 * n, seed, c.tol_flat) {
            Some((psi, residual)) => json!({
                "state": to_value(&psi),
                "residual": num(residual),
                "verified": verify_mutually_coherent(&u, &psi, 10.0 * c.tol_flat),
            }),
            None => json!("not found within budget"),
        })
    } else {
        None
    };
    let results = json!({
        "dim": d,
        "matrix": complex_rows(&u),
        "blockers": blockers(&u),
        "flat_column": to_value(&flat),
        "unbiased_state": unbiased,
    });
    Ok(Outcome {
        results,
        files: Vec::new(),
        failures,
    })
}

fn fig4(loaded: &Loaded) -> CliResult<Outcome> {
    let f = loaded.config.fig4.as_ref().expect("section filled on load");
    let mut table = String::from("d,alpha,c_u,bound\n");
    let mut per_d = Vec::new();
    let mut failures = Vec::new();
    for &d in &f.dims {
        let mut bounds = Vec::with_capacity(f.alpha_steps);
        for k in 1..=f.alpha_steps {
            let alpha = k as f64 / f.alpha_steps as f64;
            let u = fractional_fourier(d, alpha)?;
            let (c, b) = (c_u(&u)?, lower_bound_strokes(&u)?);
            table.push_str(&format!("{d},{alpha},{c},{b}\n"));
            bounds.push((alpha, b));
        }
        let mut rise = 0.0f64;
        let mut rise_at = None;
        for w in bounds.windows(2) {
            if w[1].1 - w[0].1 > rise {
                rise = w[1].1 - w[0].1;
                rise_at = Some(w[1].0);
            }
        }
        let at_one = bounds.last().unwrap().1;
        if (at_one - 2.0).abs() > 1e-12 {
            failures.push(format!("d={d}: bound {at_one} at alpha = 1, expected 2"));
        }
        per_d.push(json!({
            "d": d,
            "monotone": rise <= 1e-12,
            "largest_rise": num(rise),
            "largest_rise_at_alpha": rise_at,
            "bound_at_smallest_alpha": num(bounds[0].1),
            "bound_at_one": num(at_one),
        }));
    }
    Ok(Outcome {
        results: json!({ "alpha_steps": f.alpha_steps, "curves": per_d }),
        files: vec![("fig4.csv".into(), table)],
        failures,
    })
}

fn qubit_synth(loaded: &Loaded) -> CliResult<Outcome> {
    let q = loaded
        .config
        .qubit_synth
        .as_ref()
        .expect("section filled on load");
    let random = q.matrix_file.is_none()
        && q.generator
            .as_deref()
            .is_none_or(|g| g.trim_start().starts_with("haar"));
    if q.count > 1 && !random {
        return Err(CliError::Config(
            "qubit_synth.count > 1 needs the haar generator".into(),
        ));
    }
    let bound = constructive_stroke_bound(q.alpha);
    let state_bound = state_stroke_bound(q.alpha);
    let mut targets = Vec::new();
    let mut failures = Vec::new();
    for i in 0..q.count {
        let v = matrix::load(q.source(), loaded, "haar d=2", i as u64)?;
        if v.dim() != 2 {
            return Err(CliError::Config(format!(
                "qubit_synth needs a 2x2 matrix, got {0}x{0}",
                v.dim()
            )));
        }
        let plan = synthesize_unitary(&v, q.alpha)?;
        let err = plan_error(&plan, &v);
        let m = v.matrix();
        let target = [m[(0, 0)], m[(1, 0)]];
        let state = synthesize_state(target, q.alpha)?;
        let fid = fidelity(state.final_state(), target);
        if plan.len() > bound || !plan.is_alternating() || err >= 1e-9 {
            failures.push(format!("target {i}: {} strokes, error {err:e}", plan.len()));
        }
        if state.plan.len() > state_bound || fid < 1.0 - 1e-12 {
            failures.push(format!(
                "target {i}: state plan of {} strokes, fidelity {fid}",
                state.plan.len()
            ));
        }
        targets.push(json!({
            "index": i,
            "target": complex_rows(&v),
            "plan": to_value(&plan),
            "length": plan.len(),
            "operator_error": num(err),
            "state_plan": to_value(&state),
            "state_fidelity": num(fid),
        }));
    }
    Ok(Outcome {
        results: json!({
            "alpha": q.alpha,
            "constructive_bound": bound,
            "sharp_bound": sharp_stroke_bound(q.alpha),
            "state_bound": state_bound,
            "targets": targets,
        }),
        files: Vec::new(),
        failures,
    })
}
