//! Classical 4D affine space-time: observers, the split of forms into
//! spatial/temporal pairs, and the equivalence of the closedness of the
//! electromagnetic two-forms with the 3D induction laws.
//!
//! Events are (x, y, z, t); the time axis is the 4th coordinate and the
//! common time-like vector is u = e4. An observer with boost w embeds space
//! at time t by gamma(x, t) = (x + t w, t); its tangent maps spatial vectors
//! to (a, 0) regardless of w, which is the whole content of the Galilei
//! invariance argument. No metric on R^4 is ever used.
//!
//! Sign conventions follow the split relations
//!   gamma-pull(faraday) = P_S(omega_B) - dt ^ P_S(omega_E),
//!   gamma-pull(ampere)  = P_S(omega_D) + dt ^ P_S(omega_H),
//! so splitting a Faraday form returns (omega_B, -omega_E) and an Ampere
//! form returns (omega_D, +omega_H).

use crate::error::{Error, Result};
use crate::exterior::{multi_indices, KCovector, Parity};
use crate::fields::{exterior_derivative, FormField, VectorField};
use crate::linalg;

/// Which electromagnetic object a 4D form represents; fixes parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpacetimeRole {
    /// Field-strength two-form (even): splits into (omega_B, -omega_E).
    Faraday,
    /// Excitation two-form (odd): splits into (omega_D, +omega_H).
    Ampere,
    /// Four-current three-form (odd): splits into (rho_E, -omega_J).
    FourCurrent,
    /// Magnetic-current three-form (even); identically zero in this theory.
    MagneticCurrent,
}

impl SpacetimeRole {
    pub fn parity(self) -> Parity {
        match self {
            SpacetimeRole::Faraday | SpacetimeRole::MagneticCurrent => Parity::Even,
            SpacetimeRole::Ampere | SpacetimeRole::FourCurrent => Parity::Odd,
        }
    }

    pub fn degree(self) -> usize {
        match self {
            SpacetimeRole::Faraday | SpacetimeRole::Ampere => 2,
            SpacetimeRole::FourCurrent | SpacetimeRole::MagneticCurrent => 3,
        }
    }
}

/// A form on the space-time manifold. The sampler's own time argument is
/// ignored; the 4th coordinate of the point is the time.
#[derive(Clone)]
pub struct SpacetimeForm {
    pub field: FormField,
    pub role: SpacetimeRole,
}

impl SpacetimeForm {
    pub fn new(field: FormField, role: SpacetimeRole) -> Result<Self> {
        if field.dim() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: field.dim() });
        }
        if field.degree() != role.degree() {
            return Err(Error::InvalidDegree(format!(
                "a {role:?} form has degree {}, got {}",
                role.degree(),
                field.degree()
            )));
        }
        if field.parity() != role.parity() {
            return Err(Error::ParityMismatch(format!("a {role:?} form is {}", role.parity())));
        }
        Ok(SpacetimeForm { field, role })
    }

    pub fn sample(&self, event: &[f64]) -> KCovector {
        self.field.sample(event, 0.0)
    }
}

/// An observer: world lines along u = e4, with an optional constant boost.
#[derive(Debug, Clone, PartialEq)]
pub struct Observer {
    boost: Vec<f64>,
}

impl Observer {
    /// The canonical embedding gamma(x, t) = (x, t).
    pub fn canonical() -> Self {
        Observer { boost: vec![0.0; 3] }
    }

    /// gamma(x, t) = (x + t w, t).
    pub fn boosted(w: Vec<f64>) -> Self {
        assert_eq!(w.len(), 3);
        Observer { boost: w }
    }

    pub fn boost(&self) -> &[f64] {
        &self.boost
    }

    /// The common time-like 4-vector u = e4.
    pub fn u(&self) -> Vec<f64> {
        vec![0.0, 0.0, 0.0, 1.0]
    }

    pub fn embed(&self, x: &[f64], t: f64) -> Vec<f64> {
        let mut event = Vec::with_capacity(4);
        for i in 0..3 {
            event.push(x[i] + t * self.boost[i]);
        }
        event.push(t);
        event
    }

    /// Inverse of the embedding: location and instant of an event.
    pub fn locate(&self, event: &[f64]) -> (Vec<f64>, f64) {
        let t = event[3];
        let x = (0..3).map(|i| event[i] - t * self.boost[i]).collect();
        (x, t)
    }

    /// The four-velocity gamma-push of (v, 1).
    pub fn four_velocity(&self, v: &[f64]) -> Vec<f64> {
        vec![v[0] + self.boost[0], v[1] + self.boost[1], v[2] + self.boost[2], 1.0]
    }

    /// Decompose a 4D tangent vector as gamma-push of (a, s).
    pub fn split_vector(&self, vec4: &[f64]) -> (Vec<f64>, f64) {
        let s = vec4[3];
        let a = (0..3).map(|i| vec4[i] - s * self.boost[i]).collect();
        (a, s)
    }
}

/// Restrict a 4D covector to the spatial slots (the gamma_t pull-back of
/// the covector at an embedded point).
fn restrict_spatial(cov4: &KCovector) -> KCovector {
    let k = cov4.degree();
    let mut out = KCovector::zero(3, k, cov4.parity());
    for idx in multi_indices(3, k) {
        out.set_coeff(idx, cov4.coeff(idx));
    }
    out
}

/// Build a degree-k covector on R^4 from an evaluation closure.
fn covector4_from<F: Fn(&[&[f64]]) -> f64>(degree: usize, parity: Parity, eval: F) -> KCovector {
    let basis: Vec<Vec<f64>> = (0..4).map(|i| linalg::basis_vector(4, i)).collect();
    let mut out = KCovector::zero(4, degree, parity);
    for idx in multi_indices(4, degree) {
        let args: Vec<&[f64]> = idx.iter().map(|&i| basis[i].as_slice()).collect();
        out.set_coeff(idx, eval(&args));
    }
    out
}

/// Pull a space-time form back to space, as a time-dependent 3D field:
/// (x, t) -> (gamma_t pulled w)(x).
pub fn pull_to_space(w: &SpacetimeForm, obs: &Observer) -> FormField {
    let (f, o) = (w.field.clone(), obs.clone());
    FormField::new(3, w.field.degree(), w.field.parity(), move |x, t| {
        restrict_spatial(&f.sample(&o.embed(x, t), 0.0))
    })
}

/// Pull the contraction w . u_phi back to space, where u_phi is the
/// four-velocity of a body with spatial velocity v_phi.
pub fn pull_contraction_to_space(
    w: &SpacetimeForm,
    obs: &Observer,
    v_phi: &VectorField,
) -> FormField {
    let (f, o, v) = (w.field.clone(), obs.clone(), v_phi.clone());
    FormField::new(3, w.field.degree() - 1, w.field.parity(), move |x, t| {
        let u = o.four_velocity(&v.sample(x, t));
        restrict_spatial(&f.sample(&o.embed(x, t), 0.0).contract(&u).expect("degree >= 1"))
    })
}

/// Observer split of a space-time k-form into the spatial k-form
/// gamma_t-pull(w) and the (k-1)-form gamma_t-pull(w . u_phi). Both are
/// time-dependent fields.
pub fn split(
    w: &SpacetimeForm,
    obs: &Observer,
    v_phi: &VectorField,
) -> (FormField, FormField) {
    (pull_to_space(w, obs), pull_contraction_to_space(w, obs, v_phi))
}

/// Assemble the unique space-time k-form whose observer split along the
/// body four-velocity u_phi = gamma-push(v_phi, 1) is the given pair:
/// gamma_t-pull(w) = spatial and gamma_t-pull(w . u_phi) = temporal.
///
/// Arguments decompose as A = dt(A) u_phi + gamma-push(a', 0) with
/// a' = a - dt(A) v_phi; repeated u_phi slots die by alternation, leaving
/// one spatial term and k single-contraction terms.
fn assemble_split_pair(
    spatial: &FormField,
    temporal: &FormField,
    v_phi: &VectorField,
    obs: &Observer,
    role: SpacetimeRole,
) -> SpacetimeForm {
    let k = spatial.degree();
    assert_eq!(temporal.degree(), k - 1);
    let (sp, tp, v, o) = (spatial.clone(), temporal.clone(), v_phi.clone(), obs.clone());
    let field = FormField::new(4, k, role.parity(), move |event, _| {
        let (x, t) = o.locate(event);
        let ws = sp.sample(&x, t);
        let wt = tp.sample(&x, t);
        let vel = v.sample(&x, t);
        let oo = o.clone();
        covector4_from(k, role.parity(), |args| {
            let parts: Vec<(Vec<f64>, f64)> = args
                .iter()
                .map(|a| {
                    let (mut sp_part, s) = oo.split_vector(a);
                    for (c, vc) in sp_part.iter_mut().zip(&vel) {
                        *c -= s * vc;
                    }
                    (sp_part, s)
                })
                .collect();
            let spatial_refs: Vec<&[f64]> = parts.iter().map(|(a, _)| a.as_slice()).collect();
            let mut acc = ws.apply(&spatial_refs).expect("degree k");
            for (i, (_, s)) in parts.iter().enumerate() {
                if *s == 0.0 {
                    continue;
                }
                let rest: Vec<&[f64]> = parts
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, (a, _))| a.as_slice())
                    .collect();
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * s * wt.apply(&rest).expect("degree k-1");
            }
            acc
        })
    });
    SpacetimeForm { field, role }
}

/// Faraday two-form of a body with velocity v_phi:
/// gamma_t-pull = omega_B and gamma_t-pull(w . u_phi) = -omega_E.
/// For v_phi = 0 this is the split relation
/// gamma-pull(w) = P_S(omega_B) - dt ^ P_S(omega_E).
pub fn assemble_faraday(
    omega_b: &FormField,
    omega_e: &FormField,
    v_phi: &VectorField,
    obs: &Observer,
) -> SpacetimeForm {
    assemble_split_pair(omega_b, &omega_e.scaled(-1.0), v_phi, obs, SpacetimeRole::Faraday)
}

/// Ampere two-form of a body with velocity v_phi:
/// gamma_t-pull = omega_D and gamma_t-pull(w . u_phi) = +omega_H.
/// For v_phi = 0 this is gamma-pull(w) = P_S(omega_D) + dt ^ P_S(omega_H).
pub fn assemble_ampere(
    omega_d: &FormField,
    omega_h: &FormField,
    v_phi: &VectorField,
    obs: &Observer,
) -> SpacetimeForm {
    assemble_split_pair(omega_d, omega_h, v_phi, obs, SpacetimeRole::Ampere)
}

/// The four-current three-form with gamma_t-pull = rho_E and
/// gamma_t-pull(w . u_phi) = -omega_J for a body with velocity v_phi.
pub fn assemble_four_current(
    rho_e: &FormField,
    omega_j: &FormField,
    v_phi: &VectorField,
    obs: &Observer,
) -> SpacetimeForm {
    assemble_split_pair(rho_e, &omega_j.scaled(-1.0), v_phi, obs, SpacetimeRole::FourCurrent)
}

/// Residual of the observer split formula: reassemble gamma-pull(w) from the
/// split pair and compare against direct evaluation, on the supplied
/// argument tuples at the given points.
pub fn split_reassembly_residual(
    w: &SpacetimeForm,
    obs: &Observer,
    v_phi: &VectorField,
    t: f64,
    samples: &[(Vec<f64>, Vec<Vec<f64>>)],
) -> f64 {
    let k = w.field.degree();
    let (spatial, temporal) = split(w, obs, v_phi);
    let mut worst = 0.0f64;
    for (x, args) in samples {
        // direct evaluation of gamma-pull(w): push each (dx, dt) argument
        // by T gamma, i.e. (dx, dt) -> (dx + dt w, dt)
        let event = obs.embed(x, t);
        let pushed: Vec<Vec<f64>> = args
            .iter()
            .map(|a| {
                vec![
                    a[0] + a[3] * obs.boost()[0],
                    a[1] + a[3] * obs.boost()[1],
                    a[2] + a[3] * obs.boost()[2],
                    a[3],
                ]
            })
            .collect();
        let refs: Vec<&[f64]> = pushed.iter().map(|v| v.as_slice()).collect();
        let direct = w.sample(&event).apply(&refs).expect("degree match");

        // split-formula reassembly with the body four-velocity
        let vp = v_phi.sample(x, t);
        let reduced: Vec<Vec<f64>> = args
            .iter()
            .map(|a| (0..3).map(|i| a[i] - a[3] * vp[i]).collect())
            .collect();
        let spatial_refs: Vec<&[f64]> = reduced.iter().map(|v| v.as_slice()).collect();
        let mut assembled = spatial.sample(x, t).apply(&spatial_refs).expect("degree match");
        for i in 0..k {
            let dt_i = args[i][3];
            if dt_i == 0.0 {
                continue;
            }
            let rest: Vec<&[f64]> = reduced
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, v)| v.as_slice())
                .collect();
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            assembled +=
                sign * dt_i * temporal.sample(x, t).apply(&rest).expect("degree match");
        }
        worst = worst.max((direct - assembled).abs());
    }
    worst
}

/// (max-norm of gamma_t-pull(d w), max-norm of gamma_t-pull(d w . u_phi))
/// over the sample points. For a Faraday form these are the Gauss-magnetic
/// and Faraday-law residuals seen by the observer.
pub fn faraday_4d_residuals(
    w: &SpacetimeForm,
    obs: &Observer,
    v_phi: &VectorField,
    t: f64,
    points: &[Vec<f64>],
) -> Result<(f64, f64)> {
    if w.role != SpacetimeRole::Faraday {
        return Err(Error::Configuration("faraday_4d_residuals expects a Faraday form".into()));
    }
    let dw = SpacetimeForm::new(
        exterior_derivative(&w.field).with_parity(w.field.parity()),
        SpacetimeRole::MagneticCurrent,
    )?;
    let closed = pull_to_space(&dw, obs);
    let law = pull_contraction_to_space(&dw, obs, v_phi);
    let r1 = crate::fields::max_norm(&closed, points, t);
    let r2 = crate::fields::max_norm(&law, points, t);
    Ok((r1, r2))
}

/// (Gauss-electric, Ampere, charge-conservation) residuals of the 4D
/// formulation: d(ampere form) = four-current and d(four-current) = 0.
pub fn ampere_4d_residuals(
    wa: &SpacetimeForm,
    wj: &SpacetimeForm,
    obs: &Observer,
    v_phi: &VectorField,
    t: f64,
    points: &[Vec<f64>],
) -> Result<(f64, f64, f64)> {
    if wa.role != SpacetimeRole::Ampere {
        return Err(Error::Configuration("expected an Ampere two-form".into()));
    }
    if wj.role != SpacetimeRole::FourCurrent {
        return Err(Error::Configuration("expected a four-current three-form".into()));
    }
    let defect = SpacetimeForm::new(
        exterior_derivative(&wa.field).sub(&wj.field),
        SpacetimeRole::FourCurrent,
    )?;
    let gauss = crate::fields::max_norm(&pull_to_space(&defect, obs), points, t);
    let ampere =
        crate::fields::max_norm(&pull_contraction_to_space(&defect, obs, v_phi), points, t);
    // d of the four-current is a 4-form; only its u_phi contraction is a
    // nontrivial spatial condition (the charge balance law)
    let dj = exterior_derivative(&wj.field);
    let (djf, o, v) = (dj, obs.clone(), v_phi.clone());
    let continuity_field = FormField::new(3, 3, Parity::Odd, move |x, time| {
        let u = o.four_velocity(&v.sample(x, time));
        restrict_spatial(&djf.sample(&o.embed(x, time), 0.0).contract(&u).expect("4-form"))
    });
    let continuity = crate::fields::max_norm(&continuity_field, points, t);
    Ok((gauss, ampere, continuity))
}

/// Split a 4D potential one-form into the spatial Faraday potential and the
/// scalar pulled from its u_phi contraction. Note the scalar is the raw
/// pull-back gamma_t(w . u_phi); the electrostatic potential of the 3D law
/// is its negative.
pub fn em_potential_split(
    w1: &FormField,
    obs: &Observer,
    v_phi: &VectorField,
) -> Result<(FormField, FormField)> {
    if w1.dim() != 4 || w1.degree() != 1 {
        return Err(Error::InvalidDegree("em_potential_split expects a 4D one-form".into()));
    }
    let (f, o) = (w1.clone(), obs.clone());
    let spatial = FormField::new(3, 1, Parity::Even, move |x, t| {
        restrict_spatial(&f.sample(&o.embed(x, t), 0.0))
    });
    let (f, o, v) = (w1.clone(), obs.clone(), v_phi.clone());
    let scalar = FormField::new(3, 0, Parity::Even, move |x, t| {
        let u = o.four_velocity(&v.sample(x, t));
        let value = f.sample(&o.embed(x, t), 0.0).contract(&u).expect("one-form").value();
        KCovector::scalar(3, value, Parity::Even)
    });
    Ok((spatial, scalar))
}

/// Two observers differing by a boost assign the same pulled-back covector
/// to the same event: gamma2_t-pull(w) at x equals gamma1_t-pull(w) at
/// x + t w_boost. Returns the max-norm of the difference.
pub fn observer_equivalence_residual(
    w: &SpacetimeForm,
    w_boost: &[f64],
    t: f64,
    points: &[Vec<f64>],
) -> f64 {
    let obs1 = Observer::canonical();
    let obs2 = Observer::boosted(w_boost.to_vec());
    let f1 = pull_to_space(w, &obs1);
    let f2 = pull_to_space(w, &obs2);
    points
        .iter()
        .map(|x| {
            let relabeled: Vec<f64> = (0..3).map(|i| x[i] + t * w_boost[i]).collect();
            f2.sample(x, t).sub(&f1.sample(&relabeled, t)).norm()
        })
        .fold(0.0, f64::max)
}
