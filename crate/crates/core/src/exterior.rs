//! Pointwise multilinear algebra of k-covectors with even/odd parity.
//!
//! A [`KCovector`] is an alternating k-linear map on an ambient space of
//! dimension 2, 3 or 4, stored densely over the lexicographically sorted
//! strictly increasing multi-indices. Coefficients are evaluation-normalized:
//! applying a covector to the basis tuple of one of its multi-indices returns
//! that coefficient directly (no combinatorial factors; those live in the
//! integration rule).
//!
//! Parity is metadata in the sense that it never changes the numeric value of
//! `apply` or `wedge`; it selects the sign rule used by outer-oriented
//! integration and is validated there.

use crate::error::{Error, Result};
use crate::linalg;
use std::sync::OnceLock;

/// Even (plain) or odd (twisted) behaviour under ambient orientation change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Parity of a product: even ^ even = even, even ^ odd = odd, odd ^ odd = even.
    pub fn combine(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

pub const MAX_DIM: usize = 4;

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut c = 1usize;
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}

/// All strictly increasing k-subsets of 0..n in lexicographic order.
/// Cached once per (n, k); n <= 4 keeps the tables tiny.
pub fn multi_indices(n: usize, k: usize) -> &'static [Vec<usize>] {
    static TABLES: OnceLock<Vec<Vec<Vec<Vec<usize>>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        (0..=MAX_DIM)
            .map(|n| (0..=n).map(|k| gen_subsets(n, k)).collect())
            .collect()
    });
    &tables[n][k]
}

fn gen_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut cur = (0..k).collect::<Vec<_>>();
    loop {
        out.push(cur.clone());
        // advance to the next increasing subset
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - (k - i) {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Position of a sorted multi-index in the lexicographic enumeration.
pub fn multi_index_rank(n: usize, idx: &[usize]) -> usize {
    multi_indices(n, idx.len())
        .iter()
        .position(|s| s.as_slice() == idx)
        .expect("multi-index out of range")
}

/// An alternating k-linear map at a point of an n-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct KCovector {
    dim: usize,
    degree: usize,
    parity: Parity,
    coeffs: Vec<f64>,
}

impl KCovector {
    pub fn zero(dim: usize, degree: usize, parity: Parity) -> Self {
        assert!(dim >= 2 && dim <= MAX_DIM, "ambient dimension must be 2..=4");
        assert!(degree <= dim, "degree must not exceed the dimension");
        KCovector {
            dim,
            degree,
            parity,
            coeffs: vec![0.0; binomial(dim, degree)],
        }
    }

    /// A covector from its dense coefficient slice (lexicographic multi-index order).
    pub fn from_coeffs(dim: usize, degree: usize, parity: Parity, coeffs: Vec<f64>) -> Result<Self> {
        if dim < 2 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension { op: "KCovector", dim });
        }
        if degree > dim {
            return Err(Error::InvalidDegree(format!("degree {degree} exceeds dimension {dim}")));
        }
        let want = binomial(dim, degree);
        if coeffs.len() != want {
            return Err(Error::Configuration(format!(
                "expected {want} coefficients for degree {degree} in dimension {dim}, got {}",
                coeffs.len()
            )));
        }
        Ok(KCovector { dim, degree, parity, coeffs })
    }

    /// The basis covector dx_{i1} ^ ... ^ dx_{ik} for a strictly increasing index list.
    pub fn basis(dim: usize, indices: &[usize], parity: Parity) -> Self {
        assert!(indices.windows(2).all(|w| w[0] < w[1]), "indices must be strictly increasing");
        let mut c = Self::zero(dim, indices.len(), parity);
        let r = multi_index_rank(dim, indices);
        c.coeffs[r] = 1.0;
        c
    }

    /// A degree-0 covector holding a single scalar.
    pub fn scalar(dim: usize, value: f64, parity: Parity) -> Self {
        let mut c = Self::zero(dim, 0, parity);
        c.coeffs[0] = value;
        c
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

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, idx: &[usize]) -> f64 {
        self.coeffs[multi_index_rank(self.dim, idx)]
    }

    pub fn set_coeff(&mut self, idx: &[usize], value: f64) {
        let r = multi_index_rank(self.dim, idx);
        self.coeffs[r] = value;
    }

    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    /// Max-norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        linalg::norm_inf(&self.coeffs)
    }

    pub fn value(&self) -> f64 {
        assert_eq!(self.degree, 0, "value() is for degree-0 covectors");
        self.coeffs[0]
    }

    pub fn add(&self, other: &KCovector) -> KCovector {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree));
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        KCovector { coeffs, ..*self }
    }

    pub fn sub(&self, other: &KCovector) -> KCovector {
        self.add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, s: f64) -> KCovector {
        KCovector { coeffs: self.coeffs.iter().map(|c| c * s).collect(), ..*self }
    }

    /// Evaluate the alternating map on `degree` vectors.
    pub fn apply(&self, vectors: &[&[f64]]) -> Result<f64> {
        if vectors.len() != self.degree {
            return Err(Error::ArityMismatch { degree: self.degree, got: vectors.len() });
        }
        for v in vectors {
            if v.len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
            }
        }
        if self.degree == 0 {
            return Ok(self.coeffs[0]);
        }
        let sets = multi_indices(self.dim, self.degree);
        let mut acc = 0.0;
        for (r, idx) in sets.iter().enumerate() {
            let c = self.coeffs[r];
            if c == 0.0 {
                continue;
            }
            let rows: Vec<Vec<f64>> =
                vectors.iter().map(|v| idx.iter().map(|&j| v[j]).collect()).collect();
            acc += c * linalg::det(&rows);
        }
        Ok(acc)
    }

    /// Exterior product. Parity of the result is the XOR of the factor parities;
    /// graded anticommutativity a^b = (-1)^{deg a . deg b} b^a holds exactly.
    pub fn wedge(&self, other: &KCovector) -> Result<KCovector> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let degree = self.degree + other.degree;
        if degree > self.dim {
            return Err(Error::InvalidDegree(format!(
                "wedge of degrees {} and {} exceeds dimension {}",
                self.degree, other.degree, self.dim
            )));
        }
        let mut out = KCovector::zero(self.dim, degree, self.parity.combine(other.parity));
        let a_sets = multi_indices(self.dim, self.degree);
        let b_sets = multi_indices(self.dim, other.degree);
        for (ra, ia) in a_sets.iter().enumerate() {
            if self.coeffs[ra] == 0.0 {
                continue;
            }
            'pair: for (rb, ib) in b_sets.iter().enumerate() {
                if other.coeffs[rb] == 0.0 {
                    continue;
                }
                // merge the two sorted index lists, counting inversions
                let mut merged = Vec::with_capacity(degree);
                let mut sign = 1.0;
                let (mut p, mut q) = (0, 0);
                while p < ia.len() || q < ib.len() {
                    if q == ib.len() || (p < ia.len() && ia[p] < ib[q]) {
                        merged.push(ia[p]);
                        p += 1;
                    } else if p == ia.len() || ib[q] < ia[p] {
                        // ib[q] jumps over the remaining entries of ia
                        if (ia.len() - p) % 2 == 1 {
                            sign = -sign;
                        }
                        merged.push(ib[q]);
                        q += 1;
                    } else {
                        continue 'pair; // repeated index annihilates
                    }
                }
                let r = multi_index_rank(self.dim, &merged);
                out.coeffs[r] += sign * self.coeffs[ra] * other.coeffs[rb];
            }
        }
        Ok(out)
    }

    /// Precompose with a linear map: w . (M x ... x M). `m` is given as
    /// rows, so `M e_j` is the j-th column. This is the pointwise pull-back
    /// of a covector along a map with tangent matrix `m`.
    pub fn compose_linear(&self, m: &[Vec<f64>]) -> KCovector {
        if self.degree == 0 {
            return self.clone();
        }
        let cols: Vec<Vec<f64>> =
            (0..self.dim).map(|j| (0..self.dim).map(|i| m[i][j]).collect()).collect();
        let sets = multi_indices(self.dim, self.degree);
        let coeffs = sets
            .iter()
            .map(|idx| {
                let args: Vec<&[f64]> = idx.iter().map(|&j| cols[j].as_slice()).collect();
                self.apply(&args).expect("square matrix columns")
            })
            .collect();
        KCovector { dim: self.dim, degree: self.degree, parity: self.parity, coeffs }
    }

    /// Contraction (interior product): insert `v` as the first argument.
    pub fn contract(&self, v: &[f64]) -> Result<KCovector> {
        if self.degree == 0 {
            return Err(Error::InvalidDegree("cannot contract a degree-0 covector".into()));
        }
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        let mut out = KCovector::zero(self.dim, self.degree - 1, self.parity);
        let out_sets = multi_indices(self.dim, self.degree - 1);
        for (rj, jdx) in out_sets.iter().enumerate() {
            let mut acc = 0.0;
            for i in 0..self.dim {
                if jdx.contains(&i) {
                    continue;
                }
                if v[i] == 0.0 {
                    continue;
                }
                // insert i into jdx keeping sorted order; position gives the sign
                let pos = jdx.iter().take_while(|&&j| j < i).count();
                let mut full = jdx.clone();
                full.insert(pos, i);
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * v[i] * self.coeffs[multi_index_rank(self.dim, &full)];
            }
            out.coeffs[rj] = acc;
        }
        Ok(out)
    }
}

/// The standard Euclidean metric on R^n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric {
    dim: usize,
}

impl Metric {
    pub fn euclidean(dim: usize) -> Self {
        assert!(dim >= 2 && dim <= MAX_DIM);
        Metric { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        linalg::dot(a, b)
    }

    /// The one-form g.u : a -> g(u, a), carrying the requested parity.
    pub fn flat(&self, u: &[f64], parity: Parity) -> Result<KCovector> {
        if u.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: u.len() });
        }
        KCovector::from_coeffs(self.dim, 1, parity, u.to_vec())
    }

    /// Inverse of `flat`: the unique u with g(u, .) = w.
    pub fn sharp(&self, w: &KCovector) -> Result<Vec<f64>> {
        if w.degree() != 1 {
            return Err(Error::InvalidDegree("sharp expects a one-form".into()));
        }
        if w.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: w.dim() });
        }
        Ok(w.coeffs().to_vec())
    }
}

/// A volume form sign * dx^1 ^ ... ^ dx^n; flipping the sign models
/// re-orienting the ambient manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeForm {
    dim: usize,
    sign: f64,
}

impl VolumeForm {
    pub fn standard(dim: usize) -> Self {
        assert!(dim >= 2 && dim <= MAX_DIM);
        VolumeForm { dim, sign: 1.0 }
    }

    pub fn flipped(self) -> Self {
        VolumeForm { sign: -self.sign, ..self }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    /// The underlying n-covector (even parity).
    pub fn as_covector(&self) -> KCovector {
        let all: Vec<usize> = (0..self.dim).collect();
        KCovector::basis(self.dim, &all, Parity::Even).scaled(self.sign)
    }

    /// Evaluate mu on n vectors.
    pub fn apply(&self, vectors: &[&[f64]]) -> Result<f64> {
        self.as_covector().apply(vectors)
    }

    /// The (n-1)-covector mu.u. The output parity is an explicit caller
    /// choice: composing with SIGN(mu) to build odd forms is a labelling,
    /// not an algebraic operation.
    pub fn contract_vector(&self, u: &[f64], parity: Parity) -> Result<KCovector> {
        if u.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: u.len() });
        }
        Ok(self.as_covector().contract(u)?.with_parity(parity))
    }
}

/// Contraction of the volume form by a vector: the flux (n-1)-covector mu.u.
pub fn mu_contract(mu: &VolumeForm, u: &[f64], parity: Parity) -> Result<KCovector> {
    mu.contract_vector(u, parity)
}

/// The unique vector u with mu.u = w, for a two-covector in R^3.
pub fn two_form_to_vector(w: &KCovector, mu: &VolumeForm) -> Result<Vec<f64>> {
    if w.dim() != 3 || mu.dim() != 3 {
        return Err(Error::UnsupportedDimension { op: "two_form_to_vector", dim: w.dim() });
    }
    if w.degree() != 2 {
        return Err(Error::InvalidDegree(format!("expected a 2-covector, got degree {}", w.degree())));
    }
    // mu.u = s(u_x dy^dz - u_y dx^dz + u_z dx^dy)
    let s = mu.sign();
    Ok(vec![w.coeff(&[1, 2]) / s, -w.coeff(&[0, 2]) / s, w.coeff(&[0, 1]) / s])
}

/// Max-norm residual of mu.u.v = g.(u x v) over the basis arguments (R^3).
pub fn cross_identity_check(u: &[f64], v: &[f64]) -> f64 {
    let mu = VolumeForm::standard(3);
    let g = Metric::euclidean(3);
    let lhs = mu
        .contract_vector(u, Parity::Even)
        .and_then(|w| w.contract(v))
        .expect("dimension 3 contraction");
    let rhs = g.flat(&linalg::cross3(u, v), Parity::Even).expect("dimension 3 flat");
    lhs.sub(&rhs).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::basis_vector;

    fn dx(dim: usize) -> KCovector {
        KCovector::basis(dim, &[0], Parity::Even)
    }

    fn dy(dim: usize) -> KCovector {
        KCovector::basis(dim, &[1], Parity::Even)
    }

    #[test]
    fn multi_index_tables() {
        assert_eq!(multi_indices(3, 2), &[vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(multi_indices(4, 2).len(), 6);
        assert_eq!(multi_indices(4, 0), &[Vec::<usize>::new()]);
        assert_eq!(multi_index_rank(4, &[1, 3]), 4);
    }

    #[test]
    fn apply_basis_identities() {
        let dxdy = dx(2).wedge(&dy(2)).unwrap();
        let e1 = basis_vector(2, 0);
        let e2 = basis_vector(2, 1);
        assert_eq!(dxdy.apply(&[&e1, &e2]).unwrap(), 1.0);
        assert_eq!(dxdy.apply(&[&e1, &e1]).unwrap(), 0.0);
        // multilinearity: (dx^dy)(e1+e2, e2) = 1
        let v = linalg::add(&e1, &e2);
        assert_eq!(dxdy.apply(&[&v, &e2]).unwrap(), 1.0);
    }

    #[test]
    fn apply_argument_errors() {
        let dxdy = dx(3).wedge(&dy(3)).unwrap();
        let e1 = basis_vector(3, 0);
        assert!(matches!(dxdy.apply(&[&e1]), Err(Error::ArityMismatch { .. })));
        let short = [1.0, 0.0];
        assert!(matches!(dxdy.apply(&[&e1, &short]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn wedge_signs_and_degeneracy() {
        let a = dx(2);
        let b = dy(2);
        let ab = a.wedge(&b).unwrap();
        assert_eq!(ab.coeff(&[0, 1]), 1.0);
        let ba = b.wedge(&a).unwrap();
        assert_eq!(ba.coeff(&[0, 1]), -1.0);
        let aa = a.wedge(&a).unwrap();
        assert_eq!(aa.norm(), 0.0);
        // over-degree wedge must error, not silently vanish
        assert!(dx(2).wedge(&dy(2)).unwrap().wedge(&dx(2)).is_err());
    }

    #[test]
    fn wedge_graded_anticommutativity() {
        // random-ish fixed covectors in R^4, degrees (1,2)
        let a = KCovector::from_coeffs(4, 1, Parity::Even, vec![0.3, -1.0, 2.0, 0.7]).unwrap();
        let b = KCovector::from_coeffs(4, 2, Parity::Odd, vec![1.0, -0.5, 0.25, 2.0, -1.5, 0.125])
            .unwrap();
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        // (-1)^{1*2} = +1
        assert_eq!(ab.coeffs(), ba.coeffs());
        assert_eq!(ab.parity(), Parity::Odd);
        // degrees (1,1): anticommute exactly
        let c = KCovector::from_coeffs(4, 1, Parity::Even, vec![1.5, 0.25, -0.75, 1.0]).unwrap();
        let ac = a.wedge(&c).unwrap();
        let ca = c.wedge(&a).unwrap();
        assert_eq!(ac.coeffs(), ca.scaled(-1.0).coeffs());
    }

    #[test]
    fn contraction_identities() {
        let dxdy = dx(3).wedge(&dy(3)).unwrap();
        let e1 = basis_vector(3, 0);
        let e3 = basis_vector(3, 2);
        let c = dxdy.contract(&e1).unwrap();
        assert_eq!(c.coeffs(), &[0.0, 1.0, 0.0]); // dy
        assert_eq!(dxdy.contract(&e3).unwrap().norm(), 0.0);
        // double insertion of the same vector annihilates
        let w = KCovector::from_coeffs(3, 2, Parity::Even, vec![1.0, -2.0, 0.5]).unwrap();
        let v = [0.3, 1.7, -0.9];
        assert!(w.contract(&v).unwrap().contract(&v).unwrap().norm() < 1e-15);
        assert!(KCovector::scalar(3, 1.0, Parity::Even).contract(&v).is_err());
    }

    #[test]
    fn volume_contraction() {
        let mu = VolumeForm::standard(3);
        let e3 = basis_vector(3, 2);
        let w = mu.contract_vector(&e3, Parity::Even).unwrap();
        // mu.e3 = dx^dy
        assert_eq!(w.coeff(&[0, 1]), 1.0);
        assert_eq!(w.coeff(&[0, 2]), 0.0);
        assert_eq!(w.coeff(&[1, 2]), 0.0);
        let flipped = mu.flipped().contract_vector(&e3, Parity::Even).unwrap();
        assert_eq!(flipped.coeff(&[0, 1]), -1.0);
        assert_eq!(mu.contract_vector(&[0.0; 3], Parity::Even).unwrap().norm(), 0.0);
    }

    #[test]
    fn two_form_vector_roundtrip() {
        let mu = VolumeForm::standard(3);
        let dxdy = dx(3).wedge(&dy(3)).unwrap();
        assert_eq!(two_form_to_vector(&dxdy, &mu).unwrap(), vec![0.0, 0.0, 1.0]);
        assert_eq!(
            two_form_to_vector(&KCovector::zero(3, 2, Parity::Even), &mu).unwrap(),
            vec![0.0; 3]
        );
        for u in [[1.0, 2.0, 3.0], [-0.25, 0.0, 7.5], [0.1, -0.2, 0.3]] {
            let w = mu.contract_vector(&u, Parity::Odd).unwrap();
            let back = two_form_to_vector(&w, &mu).unwrap();
            for i in 0..3 {
                assert!((back[i] - u[i]).abs() < 1e-14);
            }
        }
        let w2 = KCovector::zero(2, 2, Parity::Even);
        assert!(two_form_to_vector(&w2, &VolumeForm::standard(3)).is_err());
    }

    #[test]
    fn cross_identity() {
        // mu.u.v = g.(u x v); u = e3, v = e1 gives dy
        let mu = VolumeForm::standard(3);
        let lhs = mu
            .contract_vector(&basis_vector(3, 2), Parity::Even)
            .unwrap()
            .contract(&basis_vector(3, 0))
            .unwrap();
        assert_eq!(lhs.coeffs(), &[0.0, 1.0, 0.0]);
        assert_eq!(cross_identity_check(&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]), 0.0);
        assert_eq!(cross_identity_check(&[0.4, -0.3, 0.9], &[0.4, -0.3, 0.9]), 0.0);
    }

    #[test]
    fn flat_examples() {
        let g = Metric::euclidean(3);
        assert_eq!(g.flat(&[1.0, 0.0, 0.0], Parity::Even).unwrap().coeffs(), &[1.0, 0.0, 0.0]);
        assert_eq!(g.flat(&[0.0, 2.0, 0.0], Parity::Even).unwrap().coeffs(), &[0.0, 2.0, 0.0]);
        let w = g.flat(&[1.0, 1.0, 0.0], Parity::Even).unwrap();
        assert_eq!(w.apply(&[&[1.0, -1.0, 0.0]]).unwrap(), 0.0);
    }

    #[test]
    fn parity_algebra() {
        assert_eq!(Parity::Even.combine(Parity::Odd), Parity::Odd);
        assert_eq!(Parity::Odd.combine(Parity::Odd), Parity::Even);
        let a = KCovector::basis(3, &[0], Parity::Odd);
        let b = KCovector::basis(3, &[1], Parity::Odd);
        assert_eq!(a.wedge(&b).unwrap().parity(), Parity::Even);
        assert_eq!(a.contract(&[1.0, 0.0, 0.0]).unwrap().parity(), Parity::Odd);
    }
}
