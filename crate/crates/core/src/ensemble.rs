//! Discretized Lorentzian inhomogeneous broadening.
//!
//! Each axis is sampled in the probability variable φ = atan(Δω/W), where the
//! Lorentzian density is uniform. Nodes whose detuning lands beyond
//! `cutoff·W` are pinned to the cutoff; their weight is kept, so the weights
//! always sum to one and the far tails are represented by a class at the edge
//! of the grid instead of being dropped.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::material::MaterialSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureScheme {
    /// Equal-probability cells with nodes at the cell midpoints (quantiles).
    #[default]
    MidpointEqualProb,
    /// Gauss–Legendre in the probability angle.
    Gauss,
}

impl std::str::FromStr for QuadratureScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "midpoint-equalprob" => Ok(Self::MidpointEqualProb),
            "gauss" => Ok(Self::Gauss),
            other => Err(Error::invalid("scheme", format!("unknown quadrature scheme `{other}`"))),
        }
    }
}

/// One detuning class along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningClass {
    pub detuning: f64,
    pub weight: f64,
}

/// Nodes and weights of a Gauss–Legendre rule on [−1, 1].
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - 1.0);
            let step = pn / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule[i] = (-x, w);
        rule[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        rule[n / 2].0 = 0.0;
    }
    rule
}

/// Discretizes a Lorentzian of half width `width` into `n` weighted classes.
pub fn build_lorentzian_grid(
    width: f64,
    n: usize,
    cutoff: f64,
    scheme: QuadratureScheme,
) -> Result<Vec<DetuningClass>> {
    if n == 0 {
        return Err(Error::Domain("class count must be at least 1".into()));
    }
    if n == 1 {
        return Ok(vec![DetuningClass { detuning: 0.0, weight: 1.0 }]);
    }
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::Domain(format!("Lorentzian width must be positive, got {width}")));
    }
    if !(cutoff >= 3.0) {
        return Err(Error::Domain(format!("cutoff must be at least 3, got {cutoff}")));
    }
    let edge = cutoff * width;
    let to_detuning = |angle: f64| (width * angle.tan()).clamp(-edge, edge);

    // Build the non-negative half and mirror it so the grid is exactly symmetric.
    let half: Vec<(f64, f64)> = match scheme {
        QuadratureScheme::MidpointEqualProb => {
            let nf = n as f64;
            (n / 2..n)
                .map(|i| {
                    let u = (i as f64 + 0.5) / nf - 0.5;
                    (PI * u, 1.0 / nf)
                })
                .collect()
        }
        QuadratureScheme::Gauss => gauss_legendre(n)[n / 2..]
            .iter()
            .map(|&(x, w)| (FRAC_PI_2 * x, 0.5 * w))
            .collect(),
    };
    let mut classes = Vec::with_capacity(n);
    for &(angle, weight) in half.iter().rev() {
        if angle != 0.0 {
            classes.push(DetuningClass { detuning: -to_detuning(angle), weight });
        }
    }
    for &(angle, weight) in &half {
        classes.push(DetuningClass { detuning: if angle == 0.0 { 0.0 } else { to_detuning(angle) }, weight });
    }
    Ok(classes)
}

/// Tensor-product grid over (Δω₁₂, Δω₁₃).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetuningGrid {
    pub classes12: Vec<DetuningClass>,
    pub classes13: Vec<DetuningClass>,
    pub scheme: QuadratureScheme,
    pub cutoff: f64,
}

/// One joint class of the tensor-product grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointClass {
    pub detuning12: f64,
    pub detuning13: f64,
    pub weight: f64,
}

impl DetuningGrid {
    /// Grid for the given widths. A zero width, or a count of one, collapses
    /// that axis to the single on-resonance class.
    pub fn new(
        w12: f64,
        n12: usize,
        w13: f64,
        n13: usize,
        cutoff: f64,
        scheme: QuadratureScheme,
    ) -> Result<Self> {
        let axis = |w: f64, n: usize| {
            if w == 0.0 {
                build_lorentzian_grid(1.0, 1, cutoff, scheme)
            } else {
                build_lorentzian_grid(w, n, cutoff, scheme)
            }
        };
        Ok(Self { classes12: axis(w12, n12)?, classes13: axis(w13, n13)?, scheme, cutoff })
    }

    pub fn for_material(
        material: &MaterialSpec,
        n12: usize,
        n13: usize,
        cutoff: f64,
        scheme: QuadratureScheme,
    ) -> Result<Self> {
        Self::new(material.w12, n12, material.w13, n13, cutoff, scheme)
    }

    pub fn len(&self) -> usize {
        self.classes12.len() * self.classes13.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Joint classes in row-major order (Δω₁₂ outer, Δω₁₃ inner).
    pub fn joint(&self) -> impl Iterator<Item = JointClass> + '_ {
        self.classes12.iter().flat_map(move |a| {
            self.classes13.iter().map(move |b| JointClass {
                detuning12: a.detuning,
                detuning13: b.detuning,
                weight: a.weight * b.weight,
            })
        })
    }

    /// Largest |Δω₁₃| on the grid.
    pub fn max_detuning13(&self) -> f64 {
        self.classes13.iter().map(|c| c.detuning.abs()).fold(0.0, f64::max)
    }

    /// Largest |Δω₁₂| on the grid.
    pub fn max_detuning12(&self) -> f64 {
        self.classes12.iter().map(|c| c.detuning.abs()).fold(0.0, f64::max)
    }
}

/// Weighted sum Σ wᵢ·vᵢ over the joint classes, in grid order.
pub fn ensemble_average(values: &[Complex64], grid: &DetuningGrid) -> Result<Complex64> {
    if values.len() != grid.len() {
        return Err(Error::Domain(format!(
            "expected {} class values, got {}",
            grid.len(),
            values.len()
        )));
    }
    let weights: Vec<f64> = grid.joint().map(|c| c.weight).collect();
    Ok(mirrored_sum(values, &weights))
}

/// Σ wᵢ·vᵢ accumulated over mirror pairs (i, n−1−i). Both axes are symmetric,
/// so odd functions of the detunings cancel exactly.
fn mirrored_sum(values: &[Complex64], weights: &[f64]) -> Complex64 {
    let n = values.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n / 2 {
        acc += (values[i] + values[n - 1 - i]) * weights[i];
    }
    if n % 2 == 1 {
        acc += values[n / 2] * weights[n / 2];
    }
    acc
}

/// Weighted sum over a single axis.
pub fn axis_average<F: Fn(f64) -> Complex64>(classes: &[DetuningClass], f: F) -> Complex64 {
    let values: Vec<Complex64> = classes.iter().map(|c| f(c.detuning)).collect();
    let weights: Vec<f64> = classes.iter().map(|c| c.weight).collect();
    mirrored_sum(&values, &weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCHEMES: [QuadratureScheme; 2] = [QuadratureScheme::MidpointEqualProb, QuadratureScheme::Gauss];

    #[test]
    fn single_class_is_homogeneous_limit() {
        for s in SCHEMES {
            assert_eq!(build_lorentzian_grid(3.0, 1, 30.0, s).unwrap(), vec![DetuningClass { detuning: 0.0, weight: 1.0 }]);
        }
    }

    #[test]
    fn zero_count_rejected() {
        assert!(matches!(build_lorentzian_grid(1.0, 0, 30.0, QuadratureScheme::Gauss), Err(Error::Domain(_))));
    }

    #[test]
    fn weights_normalized_and_grid_symmetric() {
        for s in SCHEMES {
            for n in [2, 3, 7, 64, 501] {
                let g = build_lorentzian_grid(2.5, n, 50.0, s).unwrap();
                assert_eq!(g.len(), n);
                let total: f64 = g.iter().map(|c| c.weight).sum();
                assert!((0.999..=1.0 + 1e-12).contains(&total), "{s:?} n={n} total={total}");
                for (a, b) in g.iter().zip(g.iter().rev()) {
                    assert_eq!(a.detuning, -b.detuning);
                    assert_eq!(a.weight, b.weight);
                }
                assert!(g.iter().all(|c| c.detuning.abs() <= 50.0 * 2.5));
                assert!(g.windows(2).all(|w| w[0].detuning <= w[1].detuning));
                let mean = axis_average(&g, |x| Complex64::new(x, 0.0));
                assert_eq!(mean.re, 0.0);
            }
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(6);
        let integral: f64 = rule.iter().map(|&(x, w)| w * x.powi(10)).sum();
        assert!((integral - 2.0 / 11.0).abs() < 1e-13);
    }

    #[test]
    fn lorentzian_second_moment_oracle() {
        // ∫ (W/π) dx / (x² + W²)² = 1/(2W²)
        let w = 0.7;
        let g = build_lorentzian_grid(w, 2000, 100.0, QuadratureScheme::MidpointEqualProb).unwrap();
        let avg = axis_average(&g, |x| Complex64::new(1.0 / (x * x + w * w), 0.0));
        assert!((avg.re * 2.0 * w * w - 1.0).abs() < 5e-3, "{avg}");
    }

    #[test]
    fn complex_pole_oracle() {
        // f = 1/(W² + iΔω·W). Closing the contour in the lower half plane picks
        // the Lorentzian pole at −iW only, giving 1/(2W²).
        let w = 1.3;
        let f = |x: f64| Complex64::new(1.0, 0.0) / Complex64::new(w * w, x * w);
        let residue = Complex64::new(1.0 / (2.0 * w * w), 0.0);

        // Brute force: substitute x = W tan φ and sum 10⁶ midpoints.
        let m = 1_000_000;
        let brute: Complex64 = (0..m)
            .map(|i| {
                let phi = -FRAC_PI_2 + PI * (i as f64 + 0.5) / m as f64;
                f(w * phi.tan()) / m as f64
            })
            .sum();
        assert!((brute - residue).norm() < 1e-6 * residue.norm());

        for s in SCHEMES {
            let g = build_lorentzian_grid(w, 2000, 100.0, s).unwrap();
            let avg = axis_average(&g, f);
            assert!((avg - residue).norm() / residue.norm() < 5e-3, "{s:?} {avg}");
        }
    }

    #[test]
    fn refinement_is_cauchy() {
        let w = 1.0;
        // A kink at line centre keeps the midpoint rule in its algebraic regime.
        let f = |x: f64| Complex64::new((-x.abs()).exp(), 0.0) / Complex64::new(1.0, 0.3 * x);
        let mut prev: Option<Complex64> = None;
        let mut prev_change = f64::INFINITY;
        for n in [16, 32, 64, 128, 256, 512] {
            let g = build_lorentzian_grid(w, n, 100.0, QuadratureScheme::MidpointEqualProb).unwrap();
            let avg = axis_average(&g, f);
            if let Some(p) = prev {
                let change = (avg - p).norm();
                assert!(change < prev_change, "n={n}");
                prev_change = change;
            }
            prev = Some(avg);
        }
    }

    #[test]
    fn joint_average_and_length_check() {
        let grid = DetuningGrid::new(1.0, 4, 10.0, 6, 30.0, QuadratureScheme::MidpointEqualProb).unwrap();
        assert_eq!(grid.len(), 24);
        let ones = vec![Complex64::new(2.0, -1.0); 24];
        let avg = ensemble_average(&ones, &grid).unwrap();
        assert!((avg - Complex64::new(2.0, -1.0)).norm() < 1e-14);
        assert!(ensemble_average(&ones[..23], &grid).is_err());

        let a: Vec<Complex64> = grid.joint().map(|c| Complex64::new(c.detuning12, c.detuning13.sin())).collect();
        let b: Vec<Complex64> = grid.joint().map(|c| Complex64::new(1.0 / (1.0 + c.detuning13.powi(2)), 0.0)).collect();
        let combo: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * 3.0 - y * 0.5).collect();
        let lhs = ensemble_average(&combo, &grid).unwrap();
        let rhs = ensemble_average(&a, &grid).unwrap() * 3.0 - ensemble_average(&b, &grid).unwrap() * 0.5;
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn zero_width_axis_collapses() {
        let grid = DetuningGrid::new(0.0, 32, 1.0, 8, 30.0, QuadratureScheme::Gauss).unwrap();
        assert_eq!(grid.classes12.len(), 1);
        assert_eq!(grid.len(), 8);
    }
}
