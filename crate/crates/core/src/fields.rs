//! Fields of k-covectors over flat R^n, the exterior derivative and the
//! classical grad/curl/div correspondences.
//!
//! Fields are pure sampling functions (point, time) -> covector; there is no
//! grid anywhere. The exterior derivative differentiates coefficient functions
//! directly (the flat-space specialization of the Palais formula), either by
//! central differences or through a user-supplied analytic derivative field.

use crate::error::{Error, Result};
use crate::exterior::{multi_indices, KCovector, Metric, Parity, VolumeForm};
use crate::linalg;
use crate::poly::{Poly, TIME_VAR};
use std::sync::Arc;

pub type FormSampler = Arc<dyn Fn(&[f64], f64) -> KCovector + Send + Sync>;
pub type VectorSampler = Arc<dyn Fn(&[f64], f64) -> Vec<f64> + Send + Sync>;

/// Default central-difference step for spatial coefficient derivatives.
pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Default central-difference step for partial time derivatives of samplers.
pub const DEFAULT_TIME_STEP: f64 = 1e-5;

#[derive(Clone)]
pub enum DerivativeMode {
    FiniteDifference { step: f64 },
    /// The exterior derivative is known analytically as a full field.
    Analytic(Box<FormField>),
}

/// A (possibly time-dependent) field of k-covectors on R^n.
#[derive(Clone)]
pub struct FormField {
    dim: usize,
    degree: usize,
    parity: Parity,
    sampler: FormSampler,
    mode: DerivativeMode,
}

impl std::fmt::Debug for FormField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FormField")
            .field("dim", &self.dim)
            .field("degree", &self.degree)
            .field("parity", &self.parity)
            .finish_non_exhaustive()
    }
}


impl FormField {
    pub fn new<F>(dim: usize, degree: usize, parity: Parity, sampler: F) -> Self
    where
        F: Fn(&[f64], f64) -> KCovector + Send + Sync + 'static,
    {
        FormField {
            dim,
            degree,
            parity,
            sampler: Arc::new(sampler),
            mode: DerivativeMode::FiniteDifference { step: DEFAULT_FD_STEP },
        }
    }

    pub fn from_sampler(dim: usize, degree: usize, parity: Parity, sampler: FormSampler) -> Self {
        FormField {
            dim,
            degree,
            parity,
            sampler,
            mode: DerivativeMode::FiniteDifference { step: DEFAULT_FD_STEP },
        }
    }

    /// A field with constant value.
    pub fn constant(value: KCovector) -> Self {
        let (dim, degree, parity) = (value.dim(), value.degree(), value.parity());
        let mut f = FormField::new(dim, degree, parity, move |_, _| value.clone());
        if degree < dim {
            f = f.with_analytic_d(FormField::zero(dim, degree + 1, parity));
        }
        f
    }

    pub fn zero(dim: usize, degree: usize, parity: Parity) -> Self {
        FormField::new(dim, degree, parity, move |_, _| KCovector::zero(dim, degree, parity))
    }

    /// Attach an analytic exterior-derivative field (degree + 1).
    pub fn with_analytic_d(mut self, d: FormField) -> Self {
        assert_eq!(d.degree, self.degree + 1, "analytic derivative must have degree + 1");
        assert_eq!(d.dim, self.dim);
        self.mode = DerivativeMode::Analytic(Box::new(d));
        self
    }

    pub fn with_fd_step(mut self, step: f64) -> Self {
        self.mode = DerivativeMode::FiniteDifference { step };
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn fd_step(&self) -> f64 {
        match &self.mode {
            DerivativeMode::FiniteDifference { step } => *step,
            DerivativeMode::Analytic(_) => DEFAULT_FD_STEP,
        }
    }

    pub fn sample(&self, point: &[f64], t: f64) -> KCovector {
        (self.sampler)(point, t)
    }

    /// Relabel the parity without touching values.
    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        if let DerivativeMode::Analytic(d) = self.mode {
            self.mode = DerivativeMode::Analytic(Box::new(d.with_parity(parity)));
        }
        self.sampler = {
            let s = self.sampler;
            Arc::new(move |x: &[f64], t: f64| s(x, t).with_parity(parity))
        };
        self
    }

    /// Freeze the time argument; the analytic derivative chain is preserved.
    pub fn at_time(&self, t0: f64) -> FormField {
        let s = self.sampler.clone();
        let mut f = FormField::new(self.dim, self.degree, self.parity, move |x, _| s(x, t0));
        f.mode = match &self.mode {
            DerivativeMode::FiniteDifference { step } => {
                DerivativeMode::FiniteDifference { step: *step }
            }
            DerivativeMode::Analytic(d) => DerivativeMode::Analytic(Box::new(d.at_time(t0))),
        };
        f
    }

    pub fn add(&self, other: &FormField) -> FormField {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree));
        let (a, b) = (self.sampler.clone(), other.sampler.clone());
        let mut f = FormField::new(self.dim, self.degree, self.parity, move |x, t| {
            a(x, t).add(&b(x, t))
        });
        if let (DerivativeMode::Analytic(da), DerivativeMode::Analytic(db)) =
            (&self.mode, &other.mode)
        {
            f.mode = DerivativeMode::Analytic(Box::new(da.add(db)));
        } else {
            f.mode = DerivativeMode::FiniteDifference { step: self.fd_step() };
        }
        f
    }

    pub fn scaled(&self, s: f64) -> FormField {
        let a = self.sampler.clone();
        let mut f =
            FormField::new(self.dim, self.degree, self.parity, move |x, t| a(x, t).scaled(s));
        f.mode = match &self.mode {
            DerivativeMode::FiniteDifference { step } => {
                DerivativeMode::FiniteDifference { step: *step }
            }
            DerivativeMode::Analytic(d) => DerivativeMode::Analytic(Box::new(d.scaled(s))),
        };
        f
    }

    pub fn sub(&self, other: &FormField) -> FormField {
        self.add(&other.scaled(-1.0))
    }
}

/// A (possibly time-dependent) tangent vector field.
#[derive(Clone)]
pub struct VectorField {
    dim: usize,
    parity: Parity,
    sampler: VectorSampler,
}

impl VectorField {
    pub fn new<F>(dim: usize, parity: Parity, sampler: F) -> Self
    where
        F: Fn(&[f64], f64) -> Vec<f64> + Send + Sync + 'static,
    {
        VectorField { dim, parity, sampler: Arc::new(sampler) }
    }

    pub fn constant(v: Vec<f64>, parity: Parity) -> Self {
        let dim = v.len();
        VectorField::new(dim, parity, move |_, _| v.clone())
    }

    pub fn zero(dim: usize) -> Self {
        VectorField::constant(vec![0.0; dim], Parity::Even)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn sample(&self, point: &[f64], t: f64) -> Vec<f64> {
        (self.sampler)(point, t)
    }

    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        let (a, b) = (self.sampler.clone(), other.sampler.clone());
        VectorField::new(self.dim, self.parity, move |x, t| linalg::add(&a(x, t), &b(x, t)))
    }

    pub fn scaled(&self, s: f64) -> VectorField {
        let a = self.sampler.clone();
        VectorField::new(self.dim, self.parity, move |x, t| linalg::scale(&a(x, t), s))
    }
}

/// Exterior derivative of a form field.
///
/// For a top-degree input this returns the degree-n field that samples to
/// zero, modelling d(mu) = 0 on an n-manifold.
pub fn exterior_derivative(f: &FormField) -> FormField {
    if f.degree == f.dim {
        return FormField::zero(f.dim, f.dim, f.parity);
    }
    match &f.mode {
        DerivativeMode::Analytic(d) => (**d).clone(),
        DerivativeMode::FiniteDifference { step } => {
            let (dim, degree, parity, h) = (f.dim, f.degree, f.parity, *step);
            let sampler = f.sampler.clone();
            FormField::new(dim, degree + 1, parity, move |x, t| {
                // partial derivatives of every coefficient function
                let mut partials: Vec<Vec<f64>> = Vec::with_capacity(dim);
                for j in 0..dim {
                    let mut xp = x.to_vec();
                    let mut xm = x.to_vec();
                    xp[j] += h;
                    xm[j] -= h;
                    let wp = sampler(&xp, t);
                    let wm = sampler(&xm, t);
                    partials.push(
                        wp.coeffs()
                            .iter()
                            .zip(wm.coeffs())
                            .map(|(p, m)| (p - m) / (2.0 * h))
                            .collect(),
                    );
                }
                d_from_partials(dim, degree, parity, &partials)
            })
        }
    }
}

/// Assemble d(omega) at a point from per-variable coefficient partials.
fn d_from_partials(dim: usize, degree: usize, parity: Parity, partials: &[Vec<f64>]) -> KCovector {
    let mut out = KCovector::zero(dim, degree + 1, parity);
    let out_sets = multi_indices(dim, degree + 1);
    let in_sets = multi_indices(dim, degree);
    let mut coeffs = vec![0.0; out_sets.len()];
    for (r, kset) in out_sets.iter().enumerate() {
        let mut acc = 0.0;
        for (pos, &j) in kset.iter().enumerate() {
            let rest: Vec<usize> = kset.iter().copied().filter(|&i| i != j).collect();
            let ri = in_sets.iter().position(|s| *s == rest).expect("subset rank");
            let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * partials[j][ri];
        }
        coeffs[r] = acc;
    }
    for (r, c) in coeffs.into_iter().enumerate() {
        out.set_coeff(&out_sets[r].clone(), c);
    }
    out
}

/// Pointwise contraction of a form field with a vector field.
pub fn contract_field(f: &FormField, v: &VectorField) -> FormField {
    assert!(f.degree >= 1, "cannot contract a degree-0 field");
    assert_eq!(f.dim, v.dim);
    let (fs, vs) = (f.sampler.clone(), v.sampler.clone());
    let parity = f.parity.combine(v.parity);
    FormField::new(f.dim, f.degree - 1, parity, move |x, t| {
        fs(x, t).contract(&vs(x, t)).expect("contract_field dimensions")
    })
}

/// Partial time derivative at fixed spatial point (central difference).
pub fn partial_time(f: &FormField, step: f64) -> FormField {
    let s = f.sampler.clone();
    FormField::new(f.dim, f.degree, f.parity, move |x, t| {
        s(x, t + step).sub(&s(x, t - step)).scaled(1.0 / (2.0 * step))
    })
}

/// Lie derivative along a vector field at frozen time, via the Cartan
/// homotopy formula L_v w = (dw).v + d(w.v).
pub fn lie_derivative_spatial(f: &FormField, v: &VectorField, t: f64) -> FormField {
    assert_eq!(f.dim, v.dim);
    let ft = f.at_time(t);
    let vt = VectorField::new(v.dim, v.parity, {
        let s = v.sampler.clone();
        move |x, _| s(x, t)
    });
    // for a top-degree form dw vanishes identically, leaving d(w.v)
    if f.degree == f.dim {
        return exterior_derivative(&contract_field(&ft, &vt));
    }
    let term1 = contract_field(&exterior_derivative(&ft), &vt);
    if f.degree == 0 {
        return term1;
    }
    let term2 = exterior_derivative(&contract_field(&ft, &vt));
    term1.add(&term2)
}

/// Gradient: the unique vector field with g.grad(f) = df.
pub fn grad(f0: &FormField, g: &Metric) -> Result<VectorField> {
    if f0.degree() != 0 {
        return Err(Error::InvalidDegree("grad expects a degree-0 field".into()));
    }
    let df = exterior_derivative(f0);
    let gm = *g;
    let s = df.sampler.clone();
    Ok(VectorField::new(f0.dim, f0.parity, move |x, t| {
        gm.sharp(&s(x, t)).expect("one-form sharp")
    }))
}

/// Curl in R^3: d(g.v) = mu.(rot v). The output parity is flipped
/// (the rotor of an even vector field is an odd vector field).
pub fn curl(v: &VectorField, g: &Metric, mu: &VolumeForm) -> Result<VectorField> {
    if v.dim() != 3 {
        return Err(Error::UnsupportedDimension { op: "curl", dim: v.dim() });
    }
    let gm = *g;
    let vs = v.sampler.clone();
    let one_form = FormField::new(3, 1, v.parity, move |x, t| {
        gm.flat(&vs(x, t), Parity::Even).expect("flat")
    });
    let two_form = exterior_derivative(&one_form);
    let muv = *mu;
    let s = two_form.sampler.clone();
    Ok(VectorField::new(3, v.parity.flip(), move |x, t| {
        crate::exterior::two_form_to_vector(&s(x, t), &muv).expect("two-form inversion")
    }))
}

/// Divergence: the scalar field with d(mu.v) = (div v) mu.
pub fn div(v: &VectorField, mu: &VolumeForm) -> FormField {
    assert_eq!(v.dim(), mu.dim());
    let dim = v.dim();
    let muv = *mu;
    let vs = v.sampler.clone();
    let flux = FormField::new(dim, dim - 1, v.parity, move |x, t| {
        muv.contract_vector(&vs(x, t), Parity::Even).expect("mu contraction")
    });
    let top = exterior_derivative(&flux);
    let s = top.sampler.clone();
    let sign = mu.sign();
    let parity = v.parity;
    FormField::new(dim, 0, parity, move |x, t| {
        KCovector::scalar(dim, s(x, t).coeffs()[0] / sign, parity)
    })
}

/// Max coefficient difference between two fields over a sample set.
pub fn max_difference(a: &FormField, b: &FormField, points: &[Vec<f64>], t: f64) -> f64 {
    points
        .iter()
        .map(|p| a.sample(p, t).sub(&b.sample(p, t)).norm())
        .fold(0.0, f64::max)
}

/// Max coefficient norm of a field over a sample set.
pub fn max_norm(f: &FormField, points: &[Vec<f64>], t: f64) -> f64 {
    points.iter().map(|p| f.sample(p, t).norm()).fold(0.0, f64::max)
}

/// A regular lattice of sample points on [lo, hi]^dim.
pub fn lattice(dim: usize, per_axis: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let mut pts = vec![vec![]];
    for _ in 0..dim {
        let mut next = Vec::new();
        for p in &pts {
            for i in 0..per_axis {
                let frac = if per_axis == 1 { 0.5 } else { i as f64 / (per_axis - 1) as f64 };
                let mut q = p.clone();
                q.push(lo + (hi - lo) * frac);
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}

// ---------------------------------------------------------------------------
// Polynomial-backed fields
// ---------------------------------------------------------------------------

/// A form field whose coefficients are polynomials in position and time.
/// Exterior derivatives, contractions and time derivatives stay symbolic.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyForm {
    dim: usize,
    degree: usize,
    parity: Parity,
    comps: Vec<Poly>,
}

impl PolyForm {
    pub fn new(dim: usize, degree: usize, parity: Parity, comps: Vec<Poly>) -> Result<Self> {
        let want = multi_indices(dim, degree).len();
        if comps.len() != want {
            return Err(Error::Configuration(format!(
                "expected {want} polynomial coefficients, got {}",
                comps.len()
            )));
        }
        Ok(PolyForm { dim, degree, parity, comps })
    }

    pub fn zero(dim: usize, degree: usize, parity: Parity) -> Self {
        let n = multi_indices(dim, degree).len();
        PolyForm { dim, degree, parity, comps: vec![Poly::zero(); n] }
    }

    pub fn scalar(dim: usize, p: Poly, parity: Parity) -> Self {
        PolyForm { dim, degree: 0, parity, comps: vec![p] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    pub fn eval(&self, point: &[f64], t: f64) -> KCovector {
        let coeffs = self.comps.iter().map(|p| p.eval(point, t)).collect();
        KCovector::from_coeffs(self.dim, self.degree, self.parity, coeffs)
            .expect("consistent polynomial form")
    }

    /// Symbolic exterior derivative.
    pub fn d(&self) -> PolyForm {
        if self.degree == self.dim {
            return PolyForm::zero(self.dim, self.dim, self.parity);
        }
        let out_sets = multi_indices(self.dim, self.degree + 1);
        let in_sets = multi_indices(self.dim, self.degree);
        let comps = out_sets
            .iter()
            .map(|kset| {
                let mut acc = Poly::zero();
                for (pos, &j) in kset.iter().enumerate() {
                    let rest: Vec<usize> = kset.iter().copied().filter(|&i| i != j).collect();
                    let ri = in_sets.iter().position(|s| *s == rest).expect("subset rank");
                    let term = self.comps[ri].partial(j);
                    acc = if pos % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
                }
                acc
            })
            .collect();
        PolyForm { dim: self.dim, degree: self.degree + 1, parity: self.parity, comps }
    }

    /// Symbolic partial time derivative.
    pub fn partial_t(&self) -> PolyForm {
        PolyForm {
            comps: self.comps.iter().map(|p| p.partial(TIME_VAR)).collect(),
            ..self.clone()
        }
    }

    /// Symbolic contraction with a polynomial vector field.
    pub fn contract(&self, v: &[Poly]) -> PolyForm {
        assert!(self.degree >= 1);
        assert_eq!(v.len(), self.dim);
        let out_sets = multi_indices(self.dim, self.degree - 1);
        let comps = out_sets
            .iter()
            .map(|jdx| {
                let mut acc = Poly::zero();
                for i in 0..self.dim {
                    if jdx.contains(&i) {
                        continue;
                    }
                    let pos = jdx.iter().take_while(|&&j| j < i).count();
                    let mut full = jdx.clone();
                    full.insert(pos, i);
                    let r = multi_indices(self.dim, self.degree)
                        .iter()
                        .position(|s| *s == full)
                        .unwrap();
                    let term = v[i].mul(&self.comps[r]);
                    acc = if pos % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
                }
                acc
            })
            .collect();
        PolyForm { dim: self.dim, degree: self.degree - 1, parity: self.parity, comps }
    }

    pub fn add(&self, other: &PolyForm) -> PolyForm {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree));
        PolyForm {
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, s: f64) -> PolyForm {
        PolyForm { comps: self.comps.iter().map(|p| p.scale(s)).collect(), ..self.clone() }
    }

    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    /// Realize as a sampling field with the full analytic derivative chain
    /// d, dd, ... attached, so higher derivatives are exact.
    pub fn as_field(&self) -> FormField {
        let me = self.clone();
        let base = FormField::new(self.dim, self.degree, self.parity, move |x, t| me.eval(x, t));
        if self.degree < self.dim {
            base.with_analytic_d(self.d().as_field())
        } else {
            base
        }
    }
}

/// A vector field with polynomial components.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyVector {
    dim: usize,
    parity: Parity,
    comps: Vec<Poly>,
}

impl PolyVector {
    pub fn new(comps: Vec<Poly>, parity: Parity) -> Self {
        PolyVector { dim: comps.len(), parity, comps }
    }

    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    pub fn eval(&self, point: &[f64], t: f64) -> Vec<f64> {
        self.comps.iter().map(|p| p.eval(point, t)).collect()
    }

    pub fn as_field(&self) -> VectorField {
        let me = self.clone();
        VectorField::new(self.dim, self.parity, move |x, t| me.eval(x, t))
    }
}
