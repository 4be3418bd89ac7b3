//! WebAssembly entry points for `www/index.html`. Each returns a JSON string.
//!
//! Build with `wasm-pack build crates/web --target web --out-dir www/pkg`.

use serde_json::{json, Value};
use siegert_core::expanding_domain::{conservation_report, integrate_domain, vbar, DomainMode};
use siegert_core::quadrature::QuadSpec;
use siegert_core::siegert_solver::{
    find_bound_states, lowest_resonances, scan_both_parities, DEFAULT_TOL,
};
use siegert_core::{Complex64, PotentialSpec, ScanRegion, SiegertRoot, WaveState};
use wasm_bindgen::prelude::*;

fn root_json(r: &SiegertRoot) -> Value {
    json!({
        "parity": r.parity.as_str(),
        "class": r.class.as_str(),
        "k": [r.k.re, r.k.im],
        "e": [r.energy.re, r.energy.im],
    })
}

fn pair(v0: f64, a1: Complex64, a2: Complex64) -> Result<WaveState, String> {
    let pot = PotentialSpec::with_depth(v0).map_err(|e| e.to_string())?;
    let r = lowest_resonances(&pot, 2).map_err(|e| e.to_string())?;
    WaveState::superposition(&[(a1, r[0]), (a2, r[1])], &pot).map_err(|e| e.to_string())
}

/// All roots with `|Re K| <= re_max` and `-im_depth <= Im K < 0`, plus the
/// bound states.
pub fn spectrum_json(v0: f64, re_max: f64, im_depth: f64) -> Result<String, String> {
    let pot = PotentialSpec::with_depth(v0).map_err(|e| e.to_string())?;
    let region = ScanRegion::new(-re_max, re_max, -im_depth, -0.05).map_err(|e| e.to_string())?;
    let mut roots = scan_both_parities(&region, &pot, DEFAULT_TOL).map_err(|e| e.to_string())?;
    roots.extend(find_bound_states(&pot, DEFAULT_TOL).map_err(|e| e.to_string())?);
    Ok(json!({ "v0": v0, "roots": roots.iter().map(root_json).collect::<Vec<_>>() }).to_string())
}

/// `v̄(x)` on `points` nodes of `[-x_max, x_max]`; nodes of the density are
/// reported as `null`.
pub fn speed_profile_json(
    v0: f64,
    a1: Complex64,
    a2: Complex64,
    t: f64,
    x_max: f64,
    points: usize,
) -> Result<String, String> {
    let state = pair(v0, a1, a2)?;
    let points = points.max(2);
    let xs: Vec<f64> = (0..points)
        .map(|i| -x_max + 2.0 * x_max * i as f64 / (points - 1) as f64)
        .collect();
    let vs: Vec<Option<f64>> = xs.iter().map(|&x| vbar(&state, x, t).ok()).collect();
    let k: Vec<[f64; 2]> = state
        .terms()
        .iter()
        .map(|(_, f)| [f.root.k.re, f.root.k.im])
        .collect();
    Ok(json!({ "x": xs, "vbar": vs, "k": k }).to_string())
}

/// `L(t)`, `L'(t)` and the norm drift for both edge rules.
pub fn domain_trajectory_json(
    v0: f64,
    a1: Complex64,
    a2: Complex64,
    t_end: f64,
    step: f64,
) -> Result<String, String> {
    let state = pair(v0, a1, a2)?;
    let quad = QuadSpec::with_rel_tol(1e-8);
    let mut out = serde_json::Map::new();
    for (key, mode) in [
        ("single_edge", DomainMode::PaperSingleEdge),
        ("two_edge", DomainMode::TwoEdgeExact),
    ] {
        let entry = integrate_domain(&state, 1.0, t_end, step, mode, &quad)
            .and_then(|traj| conservation_report(&state, &traj).map(|r| (traj, r)))
            .map(|(traj, r)| {
                let every = (traj.samples.len() / 400).max(1);
                let s: Vec<_> = traj.samples.iter().zip(&r.samples).step_by(every).collect();
                json!({
                    "t": s.iter().map(|(p, _)| p.t).collect::<Vec<_>>(),
                    "l": s.iter().map(|(p, _)| p.half_width).collect::<Vec<_>>(),
                    "ldot": s.iter().map(|(p, _)| p.speed).collect::<Vec<_>>(),
                    "drift": s.iter().map(|(_, b)| b.drift).collect::<Vec<_>>(),
                    "max_drift": r.max_drift,
                })
            })
            .unwrap_or_else(|e| json!({ "error": e.to_string() }));
        out.insert(key.into(), entry);
    }
    Ok(Value::Object(out).to_string())
}

#[wasm_bindgen]
pub fn spectrum(v0: f64, re_max: f64, im_depth: f64) -> Result<String, JsError> {
    spectrum_json(v0, re_max, im_depth).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn speed_profile(
    v0: f64,
    a1_re: f64,
    a1_im: f64,
    a2_re: f64,
    a2_im: f64,
    t: f64,
    x_max: f64,
    points: usize,
) -> Result<String, JsError> {
    speed_profile_json(
        v0,
        Complex64::new(a1_re, a1_im),
        Complex64::new(a2_re, a2_im),
        t,
        x_max,
        points,
    )
    .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn domain_trajectory(
    v0: f64,
    a1_re: f64,
    a1_im: f64,
    a2_re: f64,
    a2_im: f64,
    t_end: f64,
    step: f64,
) -> Result<String, JsError> {
    domain_trajectory_json(
        v0,
        Complex64::new(a1_re, a1_im),
        Complex64::new(a2_re, a2_im),
        t_end,
        step,
    )
    .map_err(|e| JsError::new(&e))
}
