//! Motions, relative motions, transport of forms and convective derivatives.
//!
//! A [`Motion`] is the two-parameter family of displacement maps phi_{tau,t}
//! taking the placement at time t to the placement at time tau, with
//! phi_{t,t} = id. A [`RelativeMotion`] is a time-dependent automorphism of
//! the ambient space (an observer change); Galilei boosts are the
//! translational stationary case.
//!
//! The flat standard connection is hard-wired throughout: parallel transport
//! is the identity on components, which is all that flat affine space needs.

use crate::chains::{boundary, outer_boundary, integrate_inner, integrate_outer, Chain};
use crate::error::{Error, Result};
use crate::exterior::{KCovector, Metric, Parity, VolumeForm};
use crate::fields::{
    contract_field, div, exterior_derivative, lie_derivative_spatial, partial_time, FormField,
    VectorField,
};
use crate::linalg::{self, cross3};
use std::sync::Arc;

/// Central-difference step for time derivatives of pulled-back quantities.
pub const CONVECTIVE_TIME_STEP: f64 = 1e-4;
/// Step for finite-difference tangent maps (Jacobians of displacements).
pub const TANGENT_FD_STEP: f64 = 1e-6;

const SINGULAR_DET: f64 = 1e-12;

type DisplacementFn = Arc<dyn Fn(&[f64], f64, f64) -> Vec<f64> + Send + Sync>;
type TangentFn = Arc<dyn Fn(&[f64], f64, f64) -> Vec<Vec<f64>> + Send + Sync>;
type VelocityFn = Arc<dyn Fn(&[f64], f64) -> Vec<f64> + Send + Sync>;

/// A two-parameter family of displacement maps phi_{tau,t}.
#[derive(Clone)]
pub struct Motion {
    dim: usize,
    displacement: DisplacementFn,
    tangent: Option<TangentFn>,
    velocity: Option<VelocityFn>,
}

impl Motion {
    pub fn custom<D>(dim: usize, displacement: D) -> Self
    where
        D: Fn(&[f64], f64, f64) -> Vec<f64> + Send + Sync + 'static,
    {
        Motion { dim, displacement: Arc::new(displacement), tangent: None, velocity: None }
    }

    pub fn with_tangent<T>(mut self, tangent: T) -> Self
    where
        T: Fn(&[f64], f64, f64) -> Vec<Vec<f64>> + Send + Sync + 'static,
    {
        self.tangent = Some(Arc::new(tangent));
        self
    }

    pub fn with_velocity<V>(mut self, velocity: V) -> Self
    where
        V: Fn(&[f64], f64) -> Vec<f64> + Send + Sync + 'static,
    {
        self.velocity = Some(Arc::new(velocity));
        self
    }

    /// The body at rest.
    pub fn static_motion(dim: usize) -> Self {
        Motion::custom(dim, |x, _, _| x.to_vec())
            .with_tangent(move |_, _, _| linalg::identity(dim))
            .with_velocity(move |_, _| vec![0.0; dim])
    }

    /// Uniform translation with constant velocity v.
    pub fn translation(v: Vec<f64>) -> Self {
        let dim = v.len();
        let v2 = v.clone();
        Motion::custom(dim, move |x, t, tau| {
            let mut y = x.to_vec();
            linalg::axpy(&mut y, tau - t, &v);
            y
        })
        .with_tangent(move |_, _, _| linalg::identity(dim))
        .with_velocity(move |_, _| v2.clone())
    }

    /// Rigid rotation about the z-axis through the origin (R^3).
    pub fn rotation_z(omega: f64) -> Self {
        let rot = move |x: &[f64], angle: f64| {
            let (s, c) = angle.sin_cos();
            vec![c * x[0] - s * x[1], s * x[0] + c * x[1], x[2]]
        };
        Motion::custom(3, move |x, t, tau| rot(x, omega * (tau - t)))
            .with_tangent(move |_, t, tau| {
                let (s, c) = (omega * (tau - t)).sin_cos();
                vec![vec![c, -s, 0.0], vec![s, c, 0.0], vec![0.0, 0.0, 1.0]]
            })
            .with_velocity(move |x, _| vec![-omega * x[1], omega * x[0], 0.0])
    }

    /// Uniform exponential scaling flow with velocity rate * x.
    pub fn scaling(dim: usize, rate: f64) -> Self {
        Motion::custom(dim, move |x, t, tau| linalg::scale(x, (rate * (tau - t)).exp()))
            .with_tangent(move |_, t, tau| {
                let s = (rate * (tau - t)).exp();
                linalg::identity(dim).iter().map(|row| linalg::scale(row, s)).collect()
            })
            .with_velocity(move |x, _| linalg::scale(x, rate))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn displace(&self, x: &[f64], t: f64, tau: f64) -> Vec<f64> {
        (self.displacement)(x, t, tau)
    }

    /// Tangent map T phi_{tau,t} at x; finite-difference Jacobian when no
    /// analytic tangent was supplied.
    pub fn tangent_map(&self, x: &[f64], t: f64, tau: f64) -> Vec<Vec<f64>> {
        if let Some(tg) = &self.tangent {
            return tg(x, t, tau);
        }
        let h = TANGENT_FD_STEP;
        let n = self.dim;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[j] += h;
            xm[j] -= h;
            cols.push(linalg::scale(
                &linalg::sub(&self.displace(&xp, t, tau), &self.displace(&xm, t, tau)),
                1.0 / (2.0 * h),
            ));
        }
        (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
    }

    /// Spatial velocity v_{phi,t}(x) = d/dtau phi_{tau,t}(x) at tau = t.
    pub fn velocity(&self, x: &[f64], t: f64) -> Vec<f64> {
        if let Some(v) = &self.velocity {
            return v(x, t);
        }
        let h = CONVECTIVE_TIME_STEP;
        linalg::scale(
            &linalg::sub(&self.displace(x, t, t + h), &self.displace(x, t, t - h)),
            1.0 / (2.0 * h),
        )
    }

    pub fn velocity_field(&self, parity: Parity) -> VectorField {
        let m = self.clone();
        VectorField::new(self.dim, parity, move |x, t| m.velocity(x, t))
    }
}

/// A time-dependent automorphism zeta_t of the ambient space.
#[derive(Clone)]
pub struct RelativeMotion {
    dim: usize,
    map: VelocityFn,
    inverse: VelocityFn,
    tangent: Option<Arc<dyn Fn(&[f64], f64) -> Vec<Vec<f64>> + Send + Sync>>,
    velocity: VelocityFn,
    translational: bool,
    stationary: bool,
}

impl RelativeMotion {
    pub fn identity(dim: usize) -> Self {
        RelativeMotion {
            dim,
            map: Arc::new(|x, _| x.to_vec()),
            inverse: Arc::new(|x, _| x.to_vec()),
            tangent: Some(Arc::new(move |_, _| linalg::identity(dim))),
            velocity: Arc::new(move |_, _| vec![0.0; dim]),
            translational: true,
            stationary: true,
        }
    }

    /// Galilei boost: zeta_t(x) = x + t w with constant w.
    pub fn galilei_boost(w: Vec<f64>) -> Self {
        let dim = w.len();
        let (w1, w2, w3) = (w.clone(), w.clone(), w);
        RelativeMotion {
            dim,
            map: Arc::new(move |x, t| {
                let mut y = x.to_vec();
                linalg::axpy(&mut y, t, &w1);
                y
            }),
            inverse: Arc::new(move |x, t| {
                let mut y = x.to_vec();
                linalg::axpy(&mut y, -t, &w2);
                y
            }),
            tangent: Some(Arc::new(move |_, _| linalg::identity(dim))),
            velocity: Arc::new(move |_, _| w3.clone()),
            translational: true,
            stationary: true,
        }
    }

    /// Steady rigid rotation of the ambient space about the z-axis.
    pub fn rotation_z(omega: f64) -> Self {
        let rot = move |x: &[f64], angle: f64| {
            let (s, c) = angle.sin_cos();
            vec![c * x[0] - s * x[1], s * x[0] + c * x[1], x[2]]
        };
        RelativeMotion {
            dim: 3,
            map: Arc::new(move |x, t| rot(x, omega * t)),
            inverse: Arc::new(move |x, t| rot(x, -omega * t)),
            tangent: Some(Arc::new(move |_, t| {
                let (s, c) = (omega * t).sin_cos();
                vec![vec![c, -s, 0.0], vec![s, c, 0.0], vec![0.0, 0.0, 1.0]]
            })),
            velocity: Arc::new(move |x, _| vec![-omega * x[1], omega * x[0], 0.0]),
            translational: false,
            stationary: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_translational(&self) -> bool {
        self.translational
    }

    pub fn is_stationary(&self) -> bool {
        self.stationary
    }

    /// Both translational and stationary: a Galilei relative motion.
    pub fn is_galilei(&self) -> bool {
        self.translational && self.stationary
    }

    pub fn map(&self, x: &[f64], t: f64) -> Vec<f64> {
        (self.map)(x, t)
    }

    pub fn inverse(&self, x: &[f64], t: f64) -> Vec<f64> {
        (self.inverse)(x, t)
    }

    pub fn tangent_map(&self, x: &[f64], t: f64) -> Vec<Vec<f64>> {
        if let Some(tg) = &self.tangent {
            return tg(x, t);
        }
        let h = TANGENT_FD_STEP;
        let n = self.dim;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[j] += h;
            xm[j] -= h;
            cols.push(linalg::scale(&linalg::sub(&self.map(&xp, t), &self.map(&xm, t)), 0.5 / h));
        }
        (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
    }

    pub fn velocity(&self, x: &[f64], t: f64) -> Vec<f64> {
        (self.velocity)(x, t)
    }

    pub fn velocity_field(&self) -> VectorField {
        let z = self.clone();
        VectorField::new(self.dim, Parity::Even, move |x, t| z.velocity(x, t))
    }

    /// Push-forward of a time-dependent form field:
    /// (zeta_up f)_t (x) = f_t(zeta_t^-1 x) . (T zeta_t)^-1.
    pub fn push_form(&self, f: &FormField) -> FormField {
        let z = self.clone();
        let g = f.clone();
        FormField::new(f.dim(), f.degree(), f.parity(), move |x, t| {
            let p = z.inverse(x, t);
            let m = z.tangent_map(&p, t);
            let minv = linalg::invert(&m).expect("relative motions are invertible");
            g.sample(&p, t).compose_linear(&minv)
        })
    }

    /// Push-forward frozen at time t0 (a spatial field snapshot).
    pub fn push_form_at(&self, f: &FormField, t0: f64) -> FormField {
        let z = self.clone();
        let g = f.clone();
        FormField::new(f.dim(), f.degree(), f.parity(), move |x, _| {
            let p = z.inverse(x, t0);
            let m = z.tangent_map(&p, t0);
            let minv = linalg::invert(&m).expect("relative motions are invertible");
            g.sample(&p, t0).compose_linear(&minv)
        })
    }

    pub fn push_vector_field(&self, v: &VectorField) -> VectorField {
        let z = self.clone();
        let u = v.clone();
        VectorField::new(v.dim(), v.parity(), move |x, t| {
            let p = z.inverse(x, t);
            linalg::mat_vec(&z.tangent_map(&p, t), &u.sample(&p, t))
        })
    }
}

/// Pull-back value of f at a single point:
/// (phi_{tau,t} pulled f_tau)(x) = f(phi(x), tau) . T phi.
pub fn pullback_at(
    f: &FormField,
    m: &Motion,
    t: f64,
    tau: f64,
    x: &[f64],
) -> Result<KCovector> {
    let tg = m.tangent_map(x, t, tau);
    let det = linalg::det(&tg);
    if det.abs() < SINGULAR_DET {
        return Err(Error::SingularMap { det });
    }
    let p = m.displace(x, t, tau);
    Ok(f.sample(&p, tau).compose_linear(&tg))
}

/// Pull-back of the field f (sampled at time tau) along phi_{tau,t}.
/// The returned snapshot ignores its own time argument.
pub fn pullback(f: &FormField, m: &Motion, t: f64, tau: f64) -> FormField {
    let (g, mm) = (f.clone(), m.clone());
    FormField::new(f.dim(), f.degree(), f.parity(), move |x, _| {
        pullback_at(&g, &mm, t, tau, x).expect("singular tangent map in pullback")
    })
}

/// Convective (Lie) time-derivative of a material form field along a motion:
/// L_{phi,t} f = d/dtau (phi_{tau,t} pulled f_tau) at tau = t.
pub fn convective_derivative(f: &FormField, m: &Motion, t: f64) -> FormField {
    convective_derivative_with_step(f, m, t, CONVECTIVE_TIME_STEP)
}

pub fn convective_derivative_with_step(f: &FormField, m: &Motion, t: f64, h: f64) -> FormField {
    let plus = pullback(f, m, t, t + h);
    let minus = pullback(f, m, t, t - h);
    plus.sub(&minus).scaled(1.0 / (2.0 * h))
}

/// Convective derivative of a vector field (pull-back by the inverse
/// tangent map).
pub fn vector_convective_derivative(v: &VectorField, m: &Motion, t: f64) -> VectorField {
    let (u, mm) = (v.clone(), m.clone());
    let h = CONVECTIVE_TIME_STEP;
    VectorField::new(v.dim(), v.parity(), move |x, _| {
        let pull = |tau: f64| -> Vec<f64> {
            let tg = mm.tangent_map(x, t, tau);
            let inv = linalg::invert(&tg).expect("invertible tangent map");
            linalg::mat_vec(&inv, &u.sample(&mm.displace(x, t, tau), tau))
        };
        linalg::scale(&linalg::sub(&pull(t + h), &pull(t - h)), 0.5 / h)
    })
}

/// Advect a chain: vertices move with the displacement, outer frames with
/// the tangent map at the simplex barycenter.
pub fn advect_chain(c: &Chain, m: &Motion, t: f64, tau: f64) -> Chain {
    let terms = c
        .terms()
        .iter()
        .map(|(w, s)| {
            let tg = m.tangent_map(&s.barycenter(), t, tau);
            let mut moved = s.map_vertices(|v| m.displace(v, t, tau));
            if let Some(frame) = s.outer_frame() {
                let new_frame = frame.iter().map(|n| linalg::mat_vec(&tg, n)).collect();
                moved = moved.with_outer_frame(new_frame);
            }
            (*w, moved)
        })
        .collect();
    Chain::from_terms(c.dim(), c.degree(), terms).expect("advect preserves shape")
}

fn oriented_integral(
    f: &FormField,
    c: &Chain,
    mu: &VolumeForm,
    t: f64,
    depth: usize,
) -> Result<f64> {
    match f.parity() {
        Parity::Even => integrate_inner(f, c, t, depth),
        Parity::Odd => integrate_outer(f, c, mu, t, depth),
    }
}

fn oriented_boundary_integral(
    f: &FormField,
    c: &Chain,
    mu: &VolumeForm,
    t: f64,
    depth: usize,
) -> Result<f64> {
    match f.parity() {
        Parity::Even => integrate_inner(f, &boundary(c), t, depth),
        Parity::Odd => integrate_outer(f, &outer_boundary(c)?, mu, t, depth),
    }
}

/// Rate of the advected integral, computed two independent ways.
#[derive(Debug, Clone, Copy)]
pub struct ReynoldsRate {
    /// Finite difference in tau of the integral over the advected chain.
    pub direct: f64,
    /// Integral of the convective derivative over the fixed chain.
    pub via_convective: f64,
    pub discrepancy: f64,
}

/// Reynolds transport rate d/dtau of the integral of f over phi_{tau,t}(c).
pub fn reynolds_rate(
    f: &FormField,
    m: &Motion,
    c: &Chain,
    mu: &VolumeForm,
    t: f64,
    depth: usize,
) -> Result<ReynoldsRate> {
    let h = CONVECTIVE_TIME_STEP;
    // subdivide first so the advected geometry resolves nonlinear motions
    let mut fine = c.clone();
    for _ in 0..depth {
        fine = crate::chains::refine(&fine);
    }
    let plus = oriented_integral(f, &advect_chain(&fine, m, t, t + h), mu, t + h, 0)?;
    let minus = oriented_integral(f, &advect_chain(&fine, m, t, t - h), mu, t - h, 0)?;
    let direct = (plus - minus) / (2.0 * h);
    let via_convective = oriented_integral(&convective_derivative(f, m, t), c, mu, t, depth)?;
    Ok(ReynoldsRate { direct, via_convective, discrepancy: (direct - via_convective).abs() })
}

/// Residual of the integral extrusion formula for a time-independent form:
/// rate = integral of (df).v over c + integral of f.v over the boundary.
pub fn extrusion_residual(
    f: &FormField,
    m: &Motion,
    c: &Chain,
    mu: &VolumeForm,
    t: f64,
    depth: usize,
) -> Result<f64> {
    let rate = reynolds_rate(f, m, c, mu, t, depth)?.direct;
    let v = m.velocity_field(Parity::Even);
    let ft = f.at_time(t);
    let stretch = contract_field(&exterior_derivative(&ft), &v);
    let boundary_term = contract_field(&ft, &v);
    let rhs = oriented_integral(&stretch, c, mu, t, depth)?
        + oriented_boundary_integral(&boundary_term, c, mu, t, depth)?;
    Ok((rate - rhs).abs())
}

/// Residual of the Helmholtz flux-transport formula in R^3:
/// rate of the advected flux of u  vs
/// integral of mu.(u_dot + rot(u x v)) + (div u) mu.v.
pub fn helmholtz_residual(
    u: &VectorField,
    m: &Motion,
    c: &Chain,
    g: &Metric,
    mu: &VolumeForm,
    t: f64,
    depth: usize,
) -> Result<f64> {
    if u.dim() != 3 {
        return Err(Error::UnsupportedDimension { op: "helmholtz_residual", dim: u.dim() });
    }
    let muv = *mu;
    let us = u.clone();
    let flux = FormField::new(3, 2, Parity::Even, move |x, t| {
        muv.contract_vector(&us.sample(x, t), Parity::Even).expect("mu.u")
    });
    let rate = reynolds_rate(&flux, m, c, mu, t, depth)?.direct;

    let h = CONVECTIVE_TIME_STEP;
    let uc = u.clone();
    let u_dot = VectorField::new(3, u.parity(), move |x, s| {
        linalg::scale(&linalg::sub(&uc.sample(x, s + h), &uc.sample(x, s - h)), 0.5 / h)
    });
    let v = m.velocity_field(Parity::Even);
    let (uc, vc) = (u.clone(), v.clone());
    let u_cross_v =
        VectorField::new(3, Parity::Even, move |x, s| cross3(&uc.sample(x, s), &vc.sample(x, s)));
    let rot_ucv = crate::fields::curl(&u_cross_v, g, mu)?;
    let total = u_dot.add(&rot_ucv);
    let muv = *mu;
    let ts = total.clone();
    let first = FormField::new(3, 2, Parity::Even, move |x, s| {
        muv.contract_vector(&ts.sample(x, s), Parity::Even).expect("mu.(...)")
    });
    let div_u = div(u, mu);
    let muv = *mu;
    let (ds, vs) = (div_u.clone(), v.clone());
    let second = FormField::new(3, 2, Parity::Even, move |x, s| {
        muv.contract_vector(&vs.sample(x, s), Parity::Even)
            .expect("mu.v")
            .scaled(ds.sample(x, s).value())
    });
    let rhs = integrate_inner(&first.add(&second), c, t, depth)?;
    Ok((rate - rhs).abs())
}

/// The motion pushed by a relative motion: (zeta up phi)_{tau,t}
/// = zeta_tau . phi_{tau,t} . zeta_t^-1, with the velocity law
/// v = v_zeta + zeta_t up v_phi.
pub fn push_motion(phi: &Motion, zeta: &RelativeMotion) -> Motion {
    let (p1, z1) = (phi.clone(), zeta.clone());
    let (p2, z2) = (phi.clone(), zeta.clone());
    let (p3, z3) = (phi.clone(), zeta.clone());
    Motion::custom(phi.dim(), move |x, t, tau| {
        let p = z1.inverse(x, t);
        z1.map(&p1.displace(&p, t, tau), tau)
    })
    .with_tangent(move |x, t, tau| {
        let p = z2.inverse(x, t);
        let a = z2.tangent_map(&p2.displace(&p, t, tau), tau);
        let b = p2.tangent_map(&p, t, tau);
        let c = linalg::invert(&z2.tangent_map(&p, t)).expect("invertible relative motion");
        linalg::mat_mul(&linalg::mat_mul(&a, &b), &c)
    })
    .with_velocity(move |x, t| {
        let p = z3.inverse(x, t);
        let pushed = linalg::mat_vec(&z3.tangent_map(&p, t), &p3.velocity(&p, t));
        linalg::add(&z3.velocity(x, t), &pushed)
    })
}

/// Covariance of convective derivatives under relative motions
/// (a theorem; nonzero residuals beyond tolerance indicate bugs):
/// L_{(zeta up phi),t}(zeta up f) = zeta_t up (L_{phi,t} f).
pub fn covariance_residual(
    f: &FormField,
    phi: &Motion,
    zeta: &RelativeMotion,
    t: f64,
    points: &[Vec<f64>],
) -> Result<f64> {
    let pushed_field = zeta.push_form(f);
    let pushed_motion = push_motion(phi, zeta);
    let lhs = convective_derivative(&pushed_field, &pushed_motion, t);
    let rhs = zeta.push_form_at(&convective_derivative(f, phi, t), t);
    Ok(crate::fields::max_difference(&lhs, &rhs, points, t))
}

/// Relation between partial time derivatives and pushes (Lemma-level
/// identity): d/dt (zeta up f) = zeta up (d/dt f) - L_{v_zeta}(zeta up f).
pub fn boost_partial_derivative_relation(
    f: &FormField,
    zeta: &RelativeMotion,
    t: f64,
    points: &[Vec<f64>],
) -> Result<f64> {
    let pushed = zeta.push_form(f);
    let lhs = partial_time(&pushed, CONVECTIVE_TIME_STEP);
    let dfdt = partial_time(f, CONVECTIVE_TIME_STEP);
    let term1 = zeta.push_form_at(&dfdt, t);
    let term2 = lie_derivative_spatial(&pushed, &zeta.velocity_field(), t);
    let rhs = term1.sub(&term2);
    Ok(crate::fields::max_difference(&lhs, &rhs, points, t))
}
