//! Central mixed finite differences with one Richardson level.

use crate::error::{Error, Result};
use crate::subset::IndexSet;

/// Most variables a finite-difference stencil may span.
pub const MAX_FD_ORDER: usize = 6;

/// Coordinates below this are outside the supported stencil region.
pub const MIN_FD_COORDINATE: f64 = 1e-3;

/// Relative step `ε^{1/(k+2)}` for a `k`-fold mixed difference.
pub fn relative_step(order: usize) -> f64 {
    f64::EPSILON.powf(1.0 / (order as f64 + 2.0))
}

fn central_stencil<F>(f: &F, x: &[f64], vars: &[usize], steps: &[f64]) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let k = vars.len();
    let mut point = x.to_vec();
    let mut acc = 0.0;
    for corner in 0..(1u32 << k) {
        let mut sign = 1.0;
        for (j, (&i, &h)) in vars.iter().zip(steps).enumerate() {
            if corner & (1 << j) != 0 {
                point[i] = x[i] + h;
            } else {
                point[i] = x[i] - h;
                sign = -sign;
            }
        }
        acc += sign * f(&point);
    }
    let denom: f64 = steps.iter().map(|h| 2.0 * h).product();
    acc / denom
}

/// `∂^{|vars|} f / ∂x_vars` at `x` by iterated central differences over the
/// `2^|vars|` stencil corners, with steps `h_i = ε^{1/(|vars|+2)} x_i` and
/// the Richardson combination `(4 D(h/2) − D(h)) / 3`.
pub fn mixed_central_difference<F>(f: F, x: &[f64], vars: IndexSet) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let vars: Vec<usize> = vars.iter().collect();
    if vars.is_empty() {
        return Ok(f(x));
    }
    if vars.len() > MAX_FD_ORDER {
        return Err(Error::InvalidParameter(format!(
            "finite differences support at most {MAX_FD_ORDER} variables, got {}",
            vars.len()
        )));
    }
    if let Some(&i) = vars.iter().find(|&&i| i >= x.len()) {
        return Err(Error::IndexOutOfRange {
            index: i,
            dim: x.len(),
        });
    }
    if let Some(&i) = vars.iter().find(|&&i| x[i] < MIN_FD_COORDINATE) {
        return Err(Error::Domain(format!(
            "finite differences need x_{i} >= {MIN_FD_COORDINATE}, got {}",
            x[i]
        )));
    }
    let rel = relative_step(vars.len());
    let coarse: Vec<f64> = vars.iter().map(|&i| rel * x[i]).collect();
    let fine: Vec<f64> = coarse.iter().map(|h| 0.5 * h).collect();
    let d_coarse = central_stencil(&f, x, &vars, &coarse);
    let d_fine = central_stencil(&f, x, &vars, &fine);
    Ok((4.0 * d_fine - d_coarse) / 3.0)
}
