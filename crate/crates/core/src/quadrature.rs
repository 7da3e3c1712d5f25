//! Gauss–Legendre rules, plus a graded rule on the unit interval for
//! integrating densities after the map `x = −1 / log u`.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(z) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// A node `u ∈ (0, 1)` stored together with `1 − u` to keep precision near 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitNode {
    pub u: f64,
    pub one_minus_u: f64,
    pub weight: f64,
}

impl UnitNode {
    /// `x = −1 / log u`.
    pub fn frechet_point(&self) -> f64 {
        -1.0 / (-self.one_minus_u).ln_1p()
    }

    /// `dx/du = 1 / (u log² u)`.
    pub fn jacobian(&self) -> f64 {
        let l = (-self.one_minus_u).ln_1p();
        1.0 / (self.u * l * l)
    }
}

/// Composite rule on `(0, 1)` with panels `[2^{−k−1}, 2^{−k}]`,
/// `k = 1..levels`, and their mirror images near 1, `order` nodes each.
/// The rule covers `[2^{−levels−1}, 1 − 2^{−levels−1}]`.
pub fn graded_unit_rule(levels: u32, order: usize) -> Vec<UnitNode> {
    let (z, w) = gauss_legendre(order);
    let mut out = Vec::with_capacity(2 * levels as usize * order);
    for k in 1..=levels {
        let hi = 0.5f64.powi(k as i32);
        let half = hi / 4.0;
        for (zi, wi) in z.iter().zip(&w) {
            // t is the distance to the nearer endpoint
            let t = hi / 2.0 + half * (zi + 1.0);
            let weight = wi * half;
            out.push(UnitNode {
                u: t,
                one_minus_u: 1.0 - t,
                weight,
            });
            out.push(UnitNode {
                u: 1.0 - t,
                one_minus_u: t,
                weight,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let (z, w) = gauss_legendre(6);
        for deg in 0..12 {
            let got: f64 = z.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((got - exact).abs() < 1e-14, "degree {deg}: {got} vs {exact}");
        }
    }

    #[test]
    fn unit_rule_integrates_smooth_functions() {
        let rule = graded_unit_rule(40, 10);
        let total: f64 = rule.iter().map(|n| n.weight).sum();
        assert!((total - 1.0).abs() < 1e-11, "{total}");
        let cubic: f64 = rule.iter().map(|n| n.weight * n.u.powi(3)).sum();
        assert!((cubic - 0.25).abs() < 1e-11);
    }

    #[test]
    fn frechet_density_integrates_to_one() {
        // exp(−1/x)/x² pulled back to u-space is the constant 1
        let rule = graded_unit_rule(40, 10);
        let total: f64 = rule
            .iter()
            .map(|n| {
                let x = n.frechet_point();
                n.weight * (-1.0 / x).exp() / (x * x) * n.jacobian()
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-10, "{total}");
    }
}
