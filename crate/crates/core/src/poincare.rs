//! Potential construction for closed forms on star-shaped domains.
//!
//! The radial contraction h_s(x) = x0 + s (x - x0) has a homotopy velocity
//! that is singular at s = 0; the implementation uses the equivalent
//! reparametrized classical formula with the s^{k-1} weight, which is smooth
//! on [0, 1] and integrates exactly by Gauss-Legendre quadrature for
//! polynomial inputs.

use crate::error::{Error, Result};
use crate::exterior::KCovector;
use crate::fields::{exterior_derivative, lattice, max_norm, FormField};
use crate::linalg;

/// Default quadrature order; exact for polynomial integrands up to
/// degree 2*16 - 1 = 31.
pub const DEFAULT_QUAD_ORDER: usize = 16;

/// Tolerance on the closedness residual of the input form.
pub const CLOSEDNESS_TOL: f64 = 1e-4;

/// A contraction of a star-shaped domain to its center.
#[derive(Debug, Clone, PartialEq)]
pub struct Contraction {
    center: Vec<f64>,
}

impl Contraction {
    pub fn to_point(center: Vec<f64>) -> Self {
        Contraction { center }
    }

    pub fn to_origin(dim: usize) -> Self {
        Contraction { center: vec![0.0; dim] }
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }
}

/// Gauss-Legendre nodes and weights on [0, 1], by Newton iteration on the
/// Legendre polynomial.
pub fn gauss_legendre_unit(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let n = order;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-based initial guess on [-1, 1]
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1, 1] -> [0, 1]
        nodes.push(0.5 * (1.0 - x));
        weights.push(0.5 * w);
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Max-norm of dw over a sample set.
pub fn closedness_residual(w: &FormField, points: &[Vec<f64>], t: f64) -> f64 {
    max_norm(&exterior_derivative(w), points, t)
}

fn default_check_points(center: &[f64]) -> Vec<Vec<f64>> {
    lattice(center.len(), 3, -1.0, 1.0)
        .into_iter()
        .map(|p| linalg::add(&p, center))
        .collect()
}

/// Homotopy potential of a closed k-form on a star-shaped domain:
///
/// alpha(x)(u_1, ..., u_{k-1})
///   = integral over s in [0,1] of s^{k-1} w(x0 + s(x-x0))(x-x0, u_1, ...).
///
/// Closedness of `w` is a checked precondition, so the remainder term of
/// the general homotopy formula vanishes and d(alpha) = w.
pub fn potential(w: &FormField, ctr: &Contraction, quad_order: usize) -> Result<FormField> {
    potential_at_time(w, ctr, quad_order, 0.0)
}

/// As [`potential`], with the closedness precondition checked at time `t`.
/// The returned field remains time-dependent through `w`.
pub fn potential_at_time(
    w: &FormField,
    ctr: &Contraction,
    quad_order: usize,
    t: f64,
) -> Result<FormField> {
    let k = w.degree();
    if k < 1 {
        return Err(Error::InvalidDegree("potential needs a form of degree >= 1".into()));
    }
    if ctr.center().len() != w.dim() {
        return Err(Error::DimensionMismatch { expected: w.dim(), got: ctr.center().len() });
    }
    let residual = closedness_residual(w, &default_check_points(ctr.center()), t);
    if residual > CLOSEDNESS_TOL {
        return Err(Error::Precondition { what: "input form is not closed".into(), residual });
    }
    let (nodes, weights) = gauss_legendre_unit(quad_order.max(1));
    let center = ctr.center().to_vec();
    let field = w.clone();
    let dim = w.dim();
    Ok(FormField::new(dim, k - 1, w.parity(), move |x, time| {
        let radial = linalg::sub(x, &center);
        let mut acc = KCovector::zero(dim, k - 1, field.parity());
        for (s, wq) in nodes.iter().zip(&weights) {
            let mut p = center.clone();
            linalg::axpy(&mut p, *s, &radial);
            let inserted = field
                .sample(&p, time)
                .contract(&radial)
                .expect("degree >= 1 checked");
            acc = acc.add(&inserted.scaled(wq * s.powi(k as i32 - 1)));
        }
        acc
    }))
}

/// Convenience wrapper asserting d(potential(w)) = w on a sample set.
pub fn potential_residual(
    w: &FormField,
    ctr: &Contraction,
    quad_order: usize,
    points: &[Vec<f64>],
    t: f64,
) -> Result<f64> {
    let alpha = potential_at_time(w, ctr, quad_order, t)?;
    let d_alpha = exterior_derivative(&alpha);
    Ok(points
        .iter()
        .map(|p| d_alpha.sample(p, t).sub(&w.sample(p, t)).norm())
        .fold(0.0, f64::max))
}

/// Check that the potential of a spatially uniform two-form is exactly the
/// linear field w.r/2 (used by the uniform-vortex scenarios).
pub fn uniform_two_form_potential_is_half_radial(
    w_value: &KCovector,
    ctr: &Contraction,
    points: &[Vec<f64>],
) -> Result<f64> {
    let field = FormField::constant(w_value.clone());
    let alpha = potential(&field, ctr, 4)?;
    let mut worst = 0.0f64;
    for p in points {
        let radial = linalg::sub(p, ctr.center());
        let expect = w_value.contract(&radial)?.scaled(0.5);
        worst = worst.max(alpha.sample(p, 0.0).sub(&expect).norm());
    }
    Ok(worst)
}
