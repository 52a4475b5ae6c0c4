//! Browser bindings: fidelity curves, entanglement curves and the output
//! state for a slider-selected alpha.
//!
//! Every exported function takes `alpha` in `[0, 1]` and folds it onto the
//! canonical range, so a slider can cover the whole interval.

use entcopy::cloner::{
    assemble_blocks, f_max, optimal_params, upper_bound_curve, EntanglementClass,
};
use entcopy::measures::MeasureReport;
use wasm_bindgen::prelude::*;

fn class(alpha: f64) -> Option<EntanglementClass> {
    EntanglementClass::folded(alpha).ok()
}

/// `n` points of `[lo, hi]`, endpoints included.
fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

/// `F_max` at `n` points of `alpha in [0, 1]`.
#[wasm_bindgen]
pub fn fidelity_curve(n: usize) -> Vec<f64> {
    linspace(0.0, 1.0, n)
        .map(|a| class(a).map_or(f64::NAN, f_max))
        .collect()
}

/// Upper bound of the fidelity against `A6 in [0, 16/9]` at fixed alpha.
#[wasm_bindgen]
pub fn upper_bound(alpha: f64, n: usize) -> Vec<f64> {
    let Some(c) = class(alpha) else {
        return vec![f64::NAN; n.max(2)];
    };
    linspace(0.0, 16.0 / 9.0, n)
        .map(|a6| upper_bound_curve(c, a6).unwrap_or(f64::NAN))
        .collect()
}

/// Optimal `A6` for the class of `alpha`.
#[wasm_bindgen]
pub fn optimal_a6(alpha: f64) -> f64 {
    class(alpha).map_or(f64::NAN, |c| optimal_params(c).re(6))
}

/// Rows `[alpha, c_in, c12, c13, negativity, i_pair]` for `n` points of
/// `[0, 1/sqrt 2]`, flattened.
#[wasm_bindgen]
pub fn entanglement_curves(n: usize) -> Vec<f64> {
    linspace(0.0, std::f64::consts::FRAC_1_SQRT_2, n)
        .flat_map(
            |a| match class(a).and_then(|c| MeasureReport::for_class(c).ok()) {
                Some(r) => [a, r.c_in, r.c12, r.c13, r.negativity, r.i_pair],
                None => [a, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN],
            },
        )
        .collect()
}

/// `|rho_out|` of the optimal copier, 16x16 row-major in qubit order
/// (1,2,3,4).
#[wasm_bindgen]
pub fn output_magnitudes(alpha: f64) -> Vec<f64> {
    class(alpha)
        .and_then(|c| assemble_blocks(c, &optimal_params(c)).ok())
        .map_or_else(
            || vec![f64::NAN; 256],
            |out| out.rho.as_slice().iter().map(|z| z.norm()).collect(),
        )
}
