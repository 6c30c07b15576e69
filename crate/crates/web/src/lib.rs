//! wasm-bindgen front end for the static demo page in `www/`.
//!
//! Each export is a thin wrapper over a plain function so the logic can be
//! tested natively.

use rpdqs_core::circuit::{compile, gate_count, lower_to_basis, ZeroAnglePolicy};
use rpdqs_core::experiment::{self, ExperimentConfig, Mode, NuclearSampling, ThetaGrid};
use rpdqs_core::qsim::NoiseProfile;
use wasm_bindgen::prelude::*;

/// Demo grids are coarser than the command-line defaults to stay interactive.
const DEMO_DT: f64 = 0.005;

#[derive(Clone, Copy, Debug)]
pub struct DemoParams {
    pub field_mt: f64,
    pub rate_mhz: f64,
    /// 0 = exact solver, otherwise Trotter order.
    pub trotter_steps: usize,
    pub noisy: bool,
}

impl DemoParams {
    fn config(self) -> ExperimentConfig {
        let mut cfg = ExperimentConfig {
            dt: DEMO_DT,
            ..ExperimentConfig::default()
        };
        cfg.system.field_mt = self.field_mt;
        cfg.system.k_singlet = self.rate_mhz;
        cfg.system.k_triplet = self.rate_mhz;
        match (self.trotter_steps, self.noisy) {
            (0, _) => {}
            (n, false) => {
                cfg.mode = Mode::Statevector;
                cfg.trotter_steps = n;
            }
            (n, true) => {
                cfg.mode = Mode::Density;
                cfg.nuclear = NuclearSampling::Mixed;
                cfg.trotter_steps = n;
                cfg.noise = NoiseProfile::device_like();
            }
        }
        cfg
    }
}

/// `[t0, p0, t1, p1, ...]`: decayed singlet population at `theta`.
pub fn population_points(p: DemoParams, theta: f64) -> Result<Vec<f64>, String> {
    let cfg = ExperimentConfig {
        theta,
        ..p.config()
    };
    let (_, decayed) = experiment::population(&cfg).map_err(|e| e.to_string())?;
    Ok(decayed
        .times
        .iter()
        .zip(&decayed.singlet_population)
        .flat_map(|(t, y)| [*t, *y])
        .collect())
}

/// `[anisotropy, θ0, Φ0, θ1, Φ1, ...]` over `count` angles in `[0, π]`.
pub fn yield_points(p: DemoParams, count: usize) -> Result<Vec<f64>, String> {
    let cfg = ExperimentConfig {
        theta_grid: ThetaGrid::uniform(count),
        ..p.config()
    };
    let s = experiment::yield_sweep(&cfg).map_err(|e| e.to_string())?;
    let mut out = vec![s.anisotropy];
    out.extend(
        s.curve
            .thetas
            .iter()
            .zip(&s.curve.yields)
            .flat_map(|(t, y)| [*t, *y]),
    );
    Ok(out)
}

/// `[total, trotter-only]` lowered gate counts.
pub fn lowered_gate_count(theta: f64, steps: usize, prune_all: bool) -> Result<Vec<u32>, String> {
    let sys = rpdqs_core::spinham::RadicalPairSystem::prototype().with_angles(theta, 0.0);
    let policy = if prune_all {
        ZeroAnglePolicy::PruneAll
    } else {
        ZeroAnglePolicy::PruneSingleQubit
    };
    let c = compile(&sys, 1.0, steps).map_err(|e| e.to_string())?;
    let gc = gate_count(&lower_to_basis(&c, policy));
    Ok(vec![gc.total as u32, gc.trotter_only as u32])
}

fn params(field_mt: f64, rate_mhz: f64, trotter_steps: u32, noisy: bool) -> DemoParams {
    DemoParams {
        field_mt,
        rate_mhz,
        trotter_steps: trotter_steps as usize,
        noisy,
    }
}

#[wasm_bindgen(js_name = populationTrace)]
pub fn population_trace(
    field_mt: f64,
    rate_mhz: f64,
    trotter_steps: u32,
    noisy: bool,
    theta: f64,
) -> Result<Vec<f64>, JsError> {
    population_points(params(field_mt, rate_mhz, trotter_steps, noisy), theta)
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = yieldCurve)]
pub fn yield_curve(
    field_mt: f64,
    rate_mhz: f64,
    trotter_steps: u32,
    noisy: bool,
    count: u32,
) -> Result<Vec<f64>, JsError> {
    yield_points(
        params(field_mt, rate_mhz, trotter_steps, noisy),
        count as usize,
    )
    .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = gateCount)]
pub fn gate_count_js(theta: f64, steps: u32, prune_all: bool) -> Result<Vec<u32>, JsError> {
    lowered_gate_count(theta, steps as usize, prune_all).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXACT: DemoParams = DemoParams {
        field_mt: 0.05,
        rate_mhz: 1.0,
        trotter_steps: 0,
        noisy: false,
    };

    #[test]
    fn population_starts_in_singlet() {
        let pts = population_points(EXACT, 1.0).unwrap();
        assert_eq!(pts.len(), 2 * 201);
        assert_eq!(pts[0], 0.0);
        assert!((pts[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn yield_curve_layout() {
        let pts = yield_points(EXACT, 5).unwrap();
        assert_eq!(pts.len(), 11);
        let ys: Vec<f64> = pts[1..].chunks(2).map(|c| c[1]).collect();
        let spread = ys.iter().cloned().fold(f64::MIN, f64::max)
            - ys.iter().cloned().fold(f64::MAX, f64::min);
        assert!((pts[0] - spread).abs() < 1e-15);
    }

    #[test]
    fn noisy_mode_runs() {
        let p = DemoParams {
            trotter_steps: 2,
            noisy: true,
            ..EXACT
        };
        assert!(yield_points(p, 2).unwrap()[0] >= 0.0);
    }

    #[test]
    fn gate_counts() {
        assert_eq!(lowered_gate_count(0.7, 1, false).unwrap(), vec![61, 55]);
        assert_eq!(lowered_gate_count(0.7, 3, false).unwrap(), vec![171, 165]);
        assert_eq!(lowered_gate_count(0.7, 1, true).unwrap()[1], 21);
        assert!(lowered_gate_count(0.7, 0, false).is_err());
    }

    #[test]
    fn bad_rate_is_reported() {
        assert!(population_points(
            DemoParams {
                rate_mhz: -1.0,
                ..EXACT
            },
            0.0
        )
        .is_err());
    }
}
