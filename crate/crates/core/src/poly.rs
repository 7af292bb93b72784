//! Multivariate polynomials in the spatial coordinates and time.
//!
//! These back the field-specification mini-language and give form fields an
//! exact (symbolic) derivative path, so closedness and d.d = 0 can be checked
//! without finite-difference noise where the inputs are polynomial.

use std::collections::BTreeMap;

/// Exponents for (x, y, z, w-spatial, t); unused slots stay zero.
type Expo = [u8; 5];

/// Sparse polynomial: monomial exponents -> coefficient.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    terms: BTreeMap<Expo, f64>,
}

pub const TIME_VAR: usize = 4;

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Poly::default();
        if c != 0.0 {
            p.terms.insert([0; 5], c);
        }
        p
    }

    /// The coordinate monomial for variable `var` (0..=3 spatial, 4 = time).
    pub fn var(var: usize) -> Self {
        assert!(var <= TIME_VAR);
        let mut e = [0u8; 5];
        e[var] = 1;
        let mut p = Poly::default();
        p.terms.insert(e, 1.0);
        p
    }

    pub fn monomial(coeff: f64, exponents: Expo) -> Self {
        let mut p = Poly::default();
        if coeff != 0.0 {
            p.terms.insert(exponents, coeff);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            let entry = out.terms.entry(*e).or_insert(0.0);
            *entry += c;
            if *entry == 0.0 {
                out.terms.remove(e);
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Poly {
        if s == 0.0 {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(e, c)| (*e, c * s)).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut e = *ea;
                for i in 0..5 {
                    e[i] += eb[i];
                }
                let entry = out.terms.entry(e).or_insert(0.0);
                *entry += ca * cb;
                if *entry == 0.0 {
                    out.terms.remove(&e);
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::constant(1.0);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Evaluate at a spatial point and time.
    pub fn eval(&self, point: &[f64], t: f64) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut m = *c;
            for (i, &p) in point.iter().enumerate() {
                for _ in 0..e[i] {
                    m *= p;
                }
            }
            for _ in 0..e[TIME_VAR] {
                m *= t;
            }
            acc += m;
        }
        acc
    }

    /// Exact partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> Poly {
        let mut out = Poly::default();
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut en = *e;
            en[var] -= 1;
            let entry = out.terms.entry(en).or_insert(0.0);
            *entry += c * e[var] as f64;
        }
        out.terms.retain(|_, c| *c != 0.0);
        out
    }

    pub fn max_exponent(&self) -> u8 {
        self.terms.keys().flat_map(|e| e.iter().copied()).max().unwrap_or(0)
    }
}
