//! Oriented simplicial chains and Riemann-style integration.
//!
//! Two integration rules live here. Inner-oriented integration takes an even
//! form over a chain whose orientation is the vertex order times an explicit
//! sign flag. Outer-oriented integration takes an odd form over a chain whose
//! simplices carry a transversal frame; the per-simplex sign is the sign of
//! the ambient volume form evaluated on (frame, edges), which makes the
//! result independent of vertex order (Def. of flux/winding integrals).
//!
//! The induced outer orientation of a boundary face appends the outward
//! transversal vector after the parent frame, immediately before the face's
//! edge vectors in the volume-form evaluation. This is the convention that
//! makes the Stokes formula hold verbatim for outer chains and fixes the sign
//! of outward flux through closed surfaces.

use crate::error::{Error, Result};
use crate::exterior::{Parity, VolumeForm};
use crate::fields::{exterior_derivative, FormField};
use crate::linalg;

/// Relative degeneracy threshold for squared simplex volumes.
const DEGENERACY_EPS: f64 = 1e-24;

/// An oriented k-simplex embedded in R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    vertices: Vec<Vec<f64>>,
    inner_sign: i8,
    outer_frame: Option<Vec<Vec<f64>>>,
}

impl Simplex {
    pub fn new(vertices: Vec<Vec<f64>>) -> Self {
        assert!(!vertices.is_empty());
        let n = vertices[0].len();
        assert!(vertices.iter().all(|v| v.len() == n));
        assert!(vertices.len() <= n + 1, "a k-simplex needs k <= n");
        Simplex { vertices, inner_sign: 1, outer_frame: None }
    }

    pub fn with_inner_sign(mut self, sign: i8) -> Self {
        assert!(sign == 1 || sign == -1);
        self.inner_sign = sign;
        self
    }

    pub fn with_outer_frame(mut self, frame: Vec<Vec<f64>>) -> Self {
        self.outer_frame = Some(frame);
        self
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn inner_sign(&self) -> i8 {
        self.inner_sign
    }

    pub fn outer_frame(&self) -> Option<&[Vec<f64>]> {
        self.outer_frame.as_deref()
    }

    pub fn degree(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn barycenter(&self) -> Vec<f64> {
        let n = self.dim();
        let mut bc = vec![0.0; n];
        for v in &self.vertices {
            linalg::axpy(&mut bc, 1.0, v);
        }
        linalg::scale(&bc, 1.0 / self.vertices.len() as f64)
    }

    /// Edge vectors v_i - v_0, i = 1..k.
    pub fn edges(&self) -> Vec<Vec<f64>> {
        self.vertices[1..].iter().map(|v| linalg::sub(v, &self.vertices[0])).collect()
    }

    /// A simplex is degenerate when its edges fail to be linearly
    /// independent (squared Gram volume below a relative threshold).
    pub fn is_degenerate(&self) -> bool {
        let k = self.degree();
        if k == 0 {
            return false;
        }
        let edges = self.edges();
        let gram: Vec<Vec<f64>> =
            edges.iter().map(|a| edges.iter().map(|b| linalg::dot(a, b)).collect()).collect();
        let vol2 = linalg::det(&gram);
        let scale2: f64 = edges.iter().map(|e| linalg::dot(e, e)).fold(1.0, |a, b| a * b.max(1e-300));
        vol2 <= DEGENERACY_EPS * scale2.max(1e-300)
    }

    /// Edge-midpoint subdivision into 2^k sub-simplices, inheriting the
    /// orientation data. Signed volume is preserved exactly.
    pub fn subdivide(&self) -> Vec<Simplex> {
        let vs = &self.vertices;
        let mid = |a: usize, b: usize| linalg::scale(&linalg::add(&vs[a], &vs[b]), 0.5);
        let keep = |verts: Vec<Vec<f64>>| Simplex {
            vertices: verts,
            inner_sign: self.inner_sign,
            outer_frame: self.outer_frame.clone(),
        };
        match self.degree() {
            0 => vec![self.clone()],
            1 => {
                let m = mid(0, 1);
                vec![
                    keep(vec![vs[0].clone(), m.clone()]),
                    keep(vec![m, vs[1].clone()]),
                ]
            }
            2 => {
                let (m01, m02, m12) = (mid(0, 1), mid(0, 2), mid(1, 2));
                vec![
                    keep(vec![vs[0].clone(), m01.clone(), m02.clone()]),
                    keep(vec![m01.clone(), vs[1].clone(), m12.clone()]),
                    keep(vec![m02.clone(), m12.clone(), vs[2].clone()]),
                    keep(vec![m01, m12, m02]),
                ]
            }
            3 => {
                let m01 = mid(0, 1);
                let m02 = mid(0, 2);
                let m03 = mid(0, 3);
                let m12 = mid(1, 2);
                let m13 = mid(1, 3);
                let m23 = mid(2, 3);
                // four corner tetrahedra plus the central octahedron split
                // along the m01-m23 diagonal; all inherit the parent sign
                vec![
                    keep(vec![vs[0].clone(), m01.clone(), m02.clone(), m03.clone()]),
                    keep(vec![m01.clone(), vs[1].clone(), m12.clone(), m13.clone()]),
                    keep(vec![m02.clone(), m12.clone(), vs[2].clone(), m23.clone()]),
                    keep(vec![m03.clone(), m13.clone(), m23.clone(), vs[3].clone()]),
                    keep(vec![m01.clone(), m02.clone(), m03.clone(), m23.clone()]),
                    keep(vec![m01.clone(), m03, m13.clone(), m23.clone()]),
                    keep(vec![m01.clone(), m13, m12.clone(), m23.clone()]),
                    keep(vec![m01, m12, m02, m23]),
                ]
            }
            k => panic!("subdivision of degree-{k} simplices is not supported"),
        }
    }

    pub fn map_vertices<F: Fn(&[f64]) -> Vec<f64>>(&self, f: F) -> Simplex {
        Simplex {
            vertices: self.vertices.iter().map(|v| f(v)).collect(),
            inner_sign: self.inner_sign,
            outer_frame: self.outer_frame.clone(),
        }
    }
}

/// Integer-weighted formal sum of oriented k-simplices.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    dim: usize,
    degree: usize,
    terms: Vec<(i64, Simplex)>,
}

impl Chain {
    pub fn empty(dim: usize, degree: usize) -> Self {
        Chain { dim, degree, terms: Vec::new() }
    }

    pub fn from_simplex(s: Simplex) -> Self {
        Chain { dim: s.dim(), degree: s.degree(), terms: vec![(1, s)] }
    }

    pub fn from_terms(dim: usize, degree: usize, terms: Vec<(i64, Simplex)>) -> Result<Self> {
        for (_, s) in &terms {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: s.dim() });
            }
            if s.degree() != degree {
                return Err(Error::InvalidDegree(format!(
                    "chain of degree {degree} contains a degree-{} simplex",
                    s.degree()
                )));
            }
        }
        Ok(Chain { dim, degree, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[(i64, Simplex)] {
        &self.terms
    }

    pub fn push(&mut self, weight: i64, s: Simplex) {
        assert_eq!(s.dim(), self.dim);
        assert_eq!(s.degree(), self.degree);
        self.terms.push((weight, s));
    }

    /// Merge terms with identical simplices and drop zero weights.
    pub fn simplify(mut self) -> Chain {
        let mut out: Vec<(i64, Simplex)> = Vec::new();
        for (w, s) in self.terms.drain(..) {
            if let Some(entry) = out.iter_mut().find(|(_, t)| *t == s) {
                entry.0 += w;
            } else {
                out.push((w, s));
            }
        }
        out.retain(|(w, _)| *w != 0);
        Chain { terms: out, ..self }
    }

    pub fn flip_inner(&self) -> Chain {
        Chain {
            terms: self
                .terms
                .iter()
                .map(|(w, s)| (*w, s.clone().with_inner_sign(-s.inner_sign)))
                .collect(),
            ..*self
        }
    }

    /// Flip the outer orientation by negating the first frame vector of
    /// every simplex.
    pub fn flip_outer(&self) -> Result<Chain> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (w, s) in &self.terms {
            let frame = s.outer_frame().ok_or(Error::MissingOuterFrame)?;
            let mut f = frame.to_vec();
            if f.is_empty() {
                return Err(Error::Configuration(
                    "cannot flip the outer orientation of a top-degree chain through its frame"
                        .into(),
                ));
            }
            f[0] = linalg::scale(&f[0], -1.0);
            terms.push((*w, s.clone().with_outer_frame(f)));
        }
        Ok(Chain { terms, ..*self })
    }

    /// Give every simplex the same constant outer frame.
    pub fn with_uniform_frame(&self, frame: Vec<Vec<f64>>) -> Chain {
        Chain {
            terms: self
                .terms
                .iter()
                .map(|(w, s)| (*w, s.clone().with_outer_frame(frame.clone())))
                .collect(),
            ..*self
        }
    }

    pub fn map_vertices<F: Fn(&[f64]) -> Vec<f64>>(&self, f: F) -> Chain {
        Chain {
            terms: self.terms.iter().map(|(w, s)| (*w, s.map_vertices(&f))).collect(),
            ..*self
        }
    }
}

/// Standard alternating-face boundary of an inner-oriented chain.
/// Interior faces cancel exactly after simplification.
pub fn boundary(c: &Chain) -> Chain {
    if c.degree == 0 {
        return Chain::empty(c.dim, 0);
    }
    let mut out = Chain::empty(c.dim, c.degree - 1);
    for (w, s) in &c.terms {
        for i in 0..s.vertices.len() {
            let verts: Vec<Vec<f64>> = s
                .vertices
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, v)| v.clone())
                .collect();
            let sign = if i % 2 == 0 { 1 } else { -1 };
            out.push(w * sign, Simplex::new(verts).with_inner_sign(s.inner_sign));
        }
    }
    out.simplify()
}

/// Boundary of an outer-oriented chain. Faces keep the parent weight; the
/// orientation information moves entirely into the induced frame, which is
/// the parent frame with the outward transversal vector appended.
pub fn outer_boundary(c: &Chain) -> Result<Chain> {
    if c.degree == 0 {
        return Ok(Chain::empty(c.dim, 0));
    }
    let mut out = Chain::empty(c.dim, c.degree - 1);
    for (w, s) in &c.terms {
        let parent_frame: Vec<Vec<f64>> = match s.outer_frame() {
            Some(f) => f.to_vec(),
            None if s.degree() == s.dim() => Vec::new(),
            None => return Err(Error::MissingOuterFrame),
        };
        let bc = s.barycenter();
        for i in 0..s.vertices.len() {
            let verts: Vec<Vec<f64>> = s
                .vertices
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, v)| v.clone())
                .collect();
            let face = Simplex::new(verts);
            let outward = linalg::sub(&face.barycenter(), &bc);
            let mut frame = parent_frame.clone();
            frame.push(outward);
            out.push(*w, face.with_outer_frame(frame));
        }
    }
    Ok(out)
}

/// Replace each k-simplex by its 2^k edge-midpoint subdivision.
pub fn refine(c: &Chain) -> Chain {
    let mut out = Chain::empty(c.dim, c.degree);
    for (w, s) in &c.terms {
        for sub in s.subdivide() {
            out.push(*w, sub);
        }
    }
    out
}

/// Integral value together with the count of degenerate sub-simplices
/// that were skipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationReport {
    pub value: f64,
    pub degenerate: usize,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Deterministic pairwise-tree summation over the subdivision index.
fn tree_sum(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    while values.len() > 1 {
        let mut next = Vec::with_capacity(values.len().div_ceil(2));
        for pair in values.chunks(2) {
            next.push(pair.iter().sum());
        }
        values = next;
    }
    values[0]
}

fn leaf_values<V: Fn(&Simplex) -> Option<f64>>(
    s: &Simplex,
    depth: usize,
    eval: &V,
    values: &mut Vec<f64>,
    degenerate: &mut usize,
) {
    if depth == 0 || s.degree() == 0 {
        match eval(s) {
            Some(v) => values.push(v),
            None => {
                *degenerate += 1;
                values.push(0.0);
            }
        }
        return;
    }
    for sub in s.subdivide() {
        leaf_values(&sub, depth - 1, eval, values, degenerate);
    }
}

fn integrate_with<V: Fn(&Simplex) -> Option<f64>>(
    c: &Chain,
    depth: usize,
    eval: V,
) -> IntegrationReport {
    let mut total = Vec::with_capacity(c.terms.len());
    let mut degenerate = 0usize;
    for (w, s) in &c.terms {
        let mut values = Vec::new();
        leaf_values(s, depth, &eval, &mut values, &mut degenerate);
        total.push(*w as f64 * tree_sum(values));
    }
    IntegrationReport { value: tree_sum(total), degenerate }
}

fn check_shape(f: &FormField, c: &Chain) -> Result<()> {
    if f.dim() != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), got: f.dim() });
    }
    if f.degree() != c.degree() {
        return Err(Error::InvalidDegree(format!(
            "cannot integrate a degree-{} form over a degree-{} chain",
            f.degree(),
            c.degree()
        )));
    }
    Ok(())
}

/// Midpoint-rule integral of an even form over an inner-oriented chain.
///
/// Per sub-simplex the value is
/// `inner_sign * f(barycenter)(e_1, ..., e_k) / k!`; the sum converges to the
/// Riemann integral as `depth` grows.
pub fn integrate_inner_report(
    f: &FormField,
    c: &Chain,
    t: f64,
    depth: usize,
) -> Result<IntegrationReport> {
    check_shape(f, c)?;
    if f.parity() != Parity::Even {
        return Err(Error::ParityMismatch(
            "integrate_inner takes even forms; odd forms integrate over outer-oriented chains"
                .into(),
        ));
    }
    let inv_fact = 1.0 / factorial(c.degree());
    Ok(integrate_with(c, depth, |s| {
        if s.is_degenerate() {
            return None;
        }
        let w = f.sample(&s.barycenter(), t);
        if s.degree() == 0 {
            return Some(s.inner_sign() as f64 * w.value());
        }
        let edges = s.edges();
        let refs: Vec<&[f64]> = edges.iter().map(|e| e.as_slice()).collect();
        let v = w.apply(&refs).expect("shape checked");
        Some(s.inner_sign() as f64 * v * inv_fact)
    }))
}

pub fn integrate_inner(f: &FormField, c: &Chain, t: f64, depth: usize) -> Result<f64> {
    integrate_inner_report(f, c, t, depth).map(|r| r.value)
}

/// Midpoint-rule integral of an odd form over an outer-oriented chain.
///
/// The per-simplex sign is SIGN(mu(n_1, ..., n_{n-k}, e_1, ..., e_k)); the
/// result depends on the outer frame, never on vertex order or the inner
/// sign flag. Top-degree chains are canonically outer-oriented by the empty
/// frame (density integration).
pub fn integrate_outer_report(
    f: &FormField,
    c: &Chain,
    mu: &VolumeForm,
    t: f64,
    depth: usize,
) -> Result<IntegrationReport> {
    check_shape(f, c)?;
    if f.parity() != Parity::Odd {
        return Err(Error::ParityMismatch(
            "integrate_outer takes odd forms; even forms integrate over inner-oriented chains"
                .into(),
        ));
    }
    if mu.dim() != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), got: mu.dim() });
    }
    for (_, s) in c.terms() {
        match s.outer_frame() {
            Some(frame) => {
                if frame.len() != c.dim() - c.degree() {
                    return Err(Error::Configuration(format!(
                        "outer frame must hold {} vectors, found {}",
                        c.dim() - c.degree(),
                        frame.len()
                    )));
                }
            }
            None if s.degree() == s.dim() => {}
            None => return Err(Error::MissingOuterFrame),
        }
    }
    let mu_cov = mu.as_covector();
    let inv_fact = 1.0 / factorial(c.degree());
    Ok(integrate_with(c, depth, |s| {
        if s.is_degenerate() {
            return None;
        }
        let edges = s.edges();
        let mut args: Vec<&[f64]> = Vec::with_capacity(c.dim());
        if let Some(frame) = s.outer_frame() {
            args.extend(frame.iter().map(|v| v.as_slice()));
        }
        args.extend(edges.iter().map(|e| e.as_slice()));
        let orient = mu_cov.apply(&args).expect("frame plus edges spans");
        if orient == 0.0 {
            return None; // frame not transversal here
        }
        let sign = orient.signum();
        let w = f.sample(&s.barycenter(), t);
        if s.degree() == 0 {
            return Some(sign * w.value());
        }
        let refs: Vec<&[f64]> = edges.iter().map(|e| e.as_slice()).collect();
        Some(sign * w.apply(&refs).expect("shape checked") * inv_fact)
    }))
}

pub fn integrate_outer(
    f: &FormField,
    c: &Chain,
    mu: &VolumeForm,
    t: f64,
    depth: usize,
) -> Result<f64> {
    integrate_outer_report(f, c, mu, t, depth).map(|r| r.value)
}

/// |integral of df over c  -  integral of f over the boundary of c|,
/// with parity routed to the matching oriented integral.
pub fn stokes_residual(
    f: &FormField,
    c: &Chain,
    mu: &VolumeForm,
    t: f64,
    depth: usize,
) -> Result<f64> {
    let df = exterior_derivative(f);
    match f.parity() {
        Parity::Even => {
            let lhs = integrate_inner(&df, c, t, depth)?;
            let rhs = integrate_inner(f, &boundary(c), t, depth)?;
            Ok((lhs - rhs).abs())
        }
        Parity::Odd => {
            let lhs = integrate_outer(&df, c, mu, t, depth)?;
            let rhs = integrate_outer(f, &outer_boundary(c)?, mu, t, depth)?;
            Ok((lhs - rhs).abs())
        }
    }
}

// ---------------------------------------------------------------------------
// Standard chains
// ---------------------------------------------------------------------------

pub fn segment(a: &[f64], b: &[f64]) -> Chain {
    Chain::from_simplex(Simplex::new(vec![a.to_vec(), b.to_vec()]))
}

pub fn triangle(a: &[f64], b: &[f64], c: &[f64]) -> Chain {
    Chain::from_simplex(Simplex::new(vec![a.to_vec(), b.to_vec(), c.to_vec()]))
}

/// The parallelogram spanned by u, v at `origin`, split into two triangles
/// along the diagonal. Vertex order orients it by the (u, v) sense.
pub fn parallelogram(origin: &[f64], u: &[f64], v: &[f64]) -> Chain {
    let o = origin.to_vec();
    let ou = linalg::add(&o, u);
    let ouv = linalg::add(&ou, v);
    let ov = linalg::add(&o, v);
    let mut ch = Chain::empty(o.len(), 2);
    ch.push(1, Simplex::new(vec![o.clone(), ou, ouv.clone()]));
    ch.push(1, Simplex::new(vec![o, ouv, ov]));
    ch
}

/// Unit square [0,1]^2 embedded in the z = z0 plane of R^3, CCW in (x, y).
pub fn unit_square_z(z0: f64) -> Chain {
    parallelogram(&[0.0, 0.0, z0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0])
}

/// Axis-aligned box volume as a chain of positively oriented tetrahedra
/// (Kuhn triangulation: six per box).
pub fn box_volume(origin: &[f64], extents: &[f64]) -> Chain {
    assert_eq!(origin.len(), 3);
    let perms: [[usize; 3]; 6] =
        [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut ch = Chain::empty(3, 3);
    for p in perms {
        let mut verts = vec![origin.to_vec()];
        let mut cur = origin.to_vec();
        for &axis in &p {
            cur[axis] += extents[axis];
            verts.push(cur.clone());
        }
        // keep every tetrahedron positively oriented
        let s = Simplex::new(verts);
        let edges = s.edges();
        if linalg::det(&edges) < 0.0 {
            let mut v = s.vertices().to_vec();
            v.swap(2, 3);
            ch.push(1, Simplex::new(v));
        } else {
            ch.push(1, s);
        }
    }
    ch
}

pub fn unit_cube() -> Chain {
    box_volume(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0])
}

// ---------------------------------------------------------------------------
// Serialization: line-oriented text, one simplex per record
// ---------------------------------------------------------------------------

/// Render a chain in the line-oriented text format:
///
/// ```text
/// chain dim=3 degree=2
/// 1 + | 0 0 0 | 1 0 0 | 1 1 0 ^ | 0 0 1
/// ```
///
/// Floats are printed shortest-round-trip, so decoding is exact.
pub fn write_chain(c: &Chain) -> String {
    let mut out = format!("chain dim={} degree={}\n", c.dim(), c.degree());
    for (w, s) in c.terms() {
        let sign = if s.inner_sign() > 0 { '+' } else { '-' };
        out.push_str(&format!("{w} {sign}"));
        for v in s.vertices() {
            out.push_str(" |");
            for x in v {
                out.push_str(&format!(" {x}"));
            }
        }
        if let Some(frame) = s.outer_frame() {
            out.push_str(" ^");
            for v in frame {
                out.push_str(" |");
                for x in v {
                    out.push_str(&format!(" {x}"));
                }
            }
        }
        out.push('\n');
    }
    out
}

pub fn parse_chain(text: &str) -> Result<Chain> {
    let mut dim = None;
    let mut degree = None;
    let mut terms = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |msg: &str, col: usize| Error::Parse {
            line: lineno + 1,
            col,
            msg: msg.to_string(),
        };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("chain") {
            for tok in rest.split_whitespace() {
                if let Some(v) = tok.strip_prefix("dim=") {
                    dim = Some(v.parse::<usize>().map_err(|_| err("bad dim", 1))?);
                } else if let Some(v) = tok.strip_prefix("degree=") {
                    degree = Some(v.parse::<usize>().map_err(|_| err("bad degree", 1))?);
                } else {
                    return Err(err("unknown chain attribute", 1));
                }
            }
            continue;
        }
        let (dim, degree) = match (dim, degree) {
            (Some(d), Some(k)) => (d, k),
            _ => return Err(err("simplex record before chain header", 1)),
        };
        let (head, frame_part) = match line.split_once('^') {
            Some((h, f)) => (h, Some(f)),
            None => (line, None),
        };
        let mut groups = head.split('|');
        let lead = groups.next().ok_or_else(|| err("empty record", 1))?;
        let mut lead_tokens = lead.split_whitespace();
        let weight: i64 = lead_tokens
            .next()
            .ok_or_else(|| err("missing weight", 1))?
            .parse()
            .map_err(|_| err("bad weight", 1))?;
        let sign = match lead_tokens.next() {
            Some("+") => 1,
            Some("-") => -1,
            _ => return Err(err("inner sign must be '+' or '-'", 1)),
        };
        let parse_vecs = |part: &str, want: usize, what: &str| -> Result<Vec<Vec<f64>>> {
            let mut vs = Vec::new();
            for grp in part.split('|') {
                let grp = grp.trim();
                if grp.is_empty() {
                    continue;
                }
                let v: std::result::Result<Vec<f64>, _> =
                    grp.split_whitespace().map(|t| t.parse::<f64>()).collect();
                let v = v.map_err(|_| err(&format!("bad float in {what}"), 1))?;
                if v.len() != want {
                    return Err(err(&format!("{what} must have {want} coordinates"), 1));
                }
                vs.push(v);
            }
            Ok(vs)
        };
        let rest: String = groups.collect::<Vec<_>>().join("|");
        let vertices = parse_vecs(&rest, dim, "vertex")?;
        if vertices.len() != degree + 1 {
            return Err(err(&format!("expected {} vertices", degree + 1), 1));
        }
        let mut s = Simplex::new(vertices).with_inner_sign(sign);
        if let Some(fp) = frame_part {
            let frame = parse_vecs(fp, dim, "frame vector")?;
            s = s.with_outer_frame(frame);
        }
        terms.push((weight, s));
    }
    match (dim, degree) {
        (Some(d), Some(k)) => Chain::from_terms(d, k, terms),
        _ => Err(Error::Parse { line: 1, col: 1, msg: "missing chain header".into() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{PolyForm, PolyVector};
    use crate::poly::Poly;

    fn area_form() -> FormField {
        PolyForm::new(3, 2, Parity::Even, vec![Poly::constant(1.0), Poly::zero(), Poly::zero()])
            .unwrap()
            .as_field()
    }

    #[test]
    fn boundary_of_triangle() {
        let t = triangle(&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0]);
        let b = boundary(&t);
        assert_eq!(b.terms().len(), 3);
        let weights: Vec<i64> = b.terms().iter().map(|(w, _)| *w).collect();
        assert_eq!(weights, vec![1, -1, 1]);
        assert_eq!(b.terms()[0].1.vertices(), &[vec![1.0, 0.0], vec![1.0, 1.0]]);
    }

    #[test]
    fn boundary_squared_vanishes() {
        let t = Chain::from_simplex(Simplex::new(vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]));
        assert!(boundary(&boundary(&t)).terms().is_empty());
    }

    #[test]
    fn interior_faces_cancel() {
        let sq = unit_square_z(0.0);
        let b = boundary(&sq);
        // no diagonal edge survives
        assert_eq!(b.terms().len(), 4);
        for (_, s) in b.terms() {
            let e = &s.edges()[0];
            assert!(
                e[0].abs() < 1e-15 || e[1].abs() < 1e-15,
                "diagonal edge leaked into the boundary"
            );
        }
    }

    #[test]
    fn constant_area_integral_exact() {
        let sq = unit_square_z(0.0);
        let v = integrate_inner(&area_form(), &sq, 0.0, 0).unwrap();
        assert_eq!(v, 1.0);
        let flipped = integrate_inner(&area_form(), &sq.flip_inner(), 0.0, 0).unwrap();
        assert_eq!(flipped, -1.0);
    }

    #[test]
    fn line_integral_oracle() {
        // x dy around the CCW unit square = enclosed area = 1
        let f = PolyForm::new(3, 1, Parity::Even, vec![Poly::zero(), Poly::var(0), Poly::zero()])
            .unwrap()
            .as_field();
        let b = boundary(&unit_square_z(0.0));
        let v = integrate_inner(&f, &b, 0.0, 6).unwrap();
        assert!((v - 1.0).abs() < 1e-6);
    }

    #[test]
    fn outer_flux_square() {
        // odd flux form mu.B with B = e3, square in z=0 with frame +e3
        let mu = VolumeForm::standard(3);
        let b_flux = PolyForm::new(
            3,
            2,
            Parity::Odd,
            vec![Poly::constant(1.0), Poly::zero(), Poly::zero()],
        )
        .unwrap()
        .as_field();
        let surf = unit_square_z(0.0).with_uniform_frame(vec![vec![0.0, 0.0, 1.0]]);
        assert_eq!(integrate_outer(&b_flux, &surf, &mu, 0.0, 0).unwrap(), 1.0);
        let down = surf.flip_outer().unwrap();
        assert_eq!(integrate_outer(&b_flux, &down, &mu, 0.0, 0).unwrap(), -1.0);
        // ambient flip: odd integrand flips too, value unchanged
        let flipped_mu = mu.flipped();
        let flipped_form = b_flux.scaled(-1.0);
        assert_eq!(integrate_outer(&flipped_form, &surf, &flipped_mu, 0.0, 0).unwrap(), 1.0);
        // vertex order is irrelevant for outer integration
        let reversed = Chain::from_terms(
            3,
            2,
            surf.terms()
                .iter()
                .map(|(w, s)| {
                    let mut v = s.vertices().to_vec();
                    v.swap(0, 1);
                    (*w, Simplex::new(v).with_outer_frame(s.outer_frame().unwrap().to_vec()))
                })
                .collect(),
        )
        .unwrap();
        assert_eq!(integrate_outer(&b_flux, &reversed, &mu, 0.0, 0).unwrap(), 1.0);
    }

    #[test]
    fn outer_parity_gate() {
        let mu = VolumeForm::standard(3);
        let even = area_form();
        let surf = unit_square_z(0.0).with_uniform_frame(vec![vec![0.0, 0.0, 1.0]]);
        assert!(matches!(
            integrate_outer(&even, &surf, &mu, 0.0, 0),
            Err(Error::ParityMismatch(_))
        ));
        let odd = even.with_parity(Parity::Odd);
        assert!(matches!(
            integrate_inner(&odd, &unit_square_z(0.0), 0.0, 0),
            Err(Error::ParityMismatch(_))
        ));
        let frameless = unit_square_z(0.0);
        assert!(matches!(
            integrate_outer(&odd, &frameless, &mu, 0.0, 0),
            Err(Error::MissingOuterFrame)
        ));
    }

    #[test]
    fn refinement_conserves_measure() {
        let t = triangle(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]);
        let r = refine(&t);
        assert_eq!(r.terms().len(), 4);
        let a0 = integrate_inner(&area_form(), &t, 0.0, 0).unwrap();
        let a1 = integrate_inner(&area_form(), &r, 0.0, 0).unwrap();
        assert_eq!(a0, a1);
        assert_eq!(refine(&r).terms().len(), 16);
        let seg = segment(&[0.0, 0.0], &[1.0, 0.0]);
        assert_eq!(refine(&seg).terms().len(), 2);
    }

    #[test]
    fn tetrahedron_subdivision_conserves_volume() {
        let mu_field = FormField::constant(
            VolumeForm::standard(3).as_covector(),
        );
        let cube = unit_cube();
        assert_eq!(integrate_inner(&mu_field, &cube, 0.0, 0).unwrap(), 1.0);
        let refined = refine(&cube);
        assert_eq!(refined.terms().len(), 48);
        let v = integrate_inner(&mu_field, &refined, 0.0, 0).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stokes_examples() {
        let mu = VolumeForm::standard(3);
        // f = x dy over the unit square: both sides equal 1
        let f = PolyForm::new(3, 1, Parity::Even, vec![Poly::zero(), Poly::var(0), Poly::zero()])
            .unwrap()
            .as_field();
        let r = stokes_residual(&f, &unit_square_z(0.0), &mu, 0.0, 6).unwrap();
        assert!(r < 1e-6, "residual {r}");
        // exact form over a closed cycle integrates to zero
        let df0 = PolyForm::scalar(3, Poly::var(0).mul(&Poly::var(1)), Parity::Even).d();
        let cycle = boundary(&unit_square_z(0.0));
        let v = integrate_inner(&df0.as_field(), &cycle, 0.0, 6).unwrap();
        assert!(v.abs() < 1e-6);
    }

    #[test]
    fn outer_stokes_divergence_theorem() {
        // flux of u = (x, y, z) out of the unit cube = 3 * volume
        let mu = VolumeForm::standard(3);
        let u = PolyVector::new(vec![Poly::var(0), Poly::var(1), Poly::var(2)], Parity::Even);
        let mu_form = PolyForm::new(
            3,
            3,
            Parity::Even,
            vec![Poly::constant(1.0)],
        )
        .unwrap();
        let flux = mu_form.contract(u.comps()).with_parity(Parity::Odd).as_field();
        let cube = unit_cube();
        let out_flux = integrate_outer(&flux, &outer_boundary(&cube).unwrap(), &mu, 0.0, 2).unwrap();
        assert!((out_flux - 3.0).abs() < 1e-10, "flux {out_flux}");
        let r = stokes_residual(&flux, &cube, &mu, 0.0, 3).unwrap();
        assert!(r < 1e-10, "residual {r}");
    }

    #[test]
    fn outer_stokes_circulation() {
        // odd one-form x dy over the framed unit square: winding equals flux of d
        let mu = VolumeForm::standard(3);
        let f = PolyForm::new(3, 1, Parity::Odd, vec![Poly::zero(), Poly::var(0), Poly::zero()])
            .unwrap()
            .as_field();
        let surf = unit_square_z(0.0).with_uniform_frame(vec![vec![0.0, 0.0, 1.0]]);
        let lhs = integrate_outer(&exterior_derivative(&f), &surf, &mu, 0.0, 4).unwrap();
        let rhs = integrate_outer(&f, &outer_boundary(&surf).unwrap(), &mu, 0.0, 4).unwrap();
        assert!((lhs - 1.0).abs() < 1e-9, "surface side {lhs}");
        assert!((lhs - rhs).abs() < 1e-9, "boundary side {rhs}");
    }

    #[test]
    fn degenerate_simplices_count_not_crash() {
        let zero_tri = triangle(&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0]);
        let f = PolyForm::new(2, 2, Parity::Even, vec![Poly::constant(1.0)]).unwrap().as_field();
        let rep = integrate_inner_report(&f, &zero_tri, 0.0, 1).unwrap();
        assert_eq!(rep.value, 0.0);
        assert_eq!(rep.degenerate, 4);
    }

    #[test]
    fn serialization_roundtrip() {
        let surf = unit_square_z(0.25).with_uniform_frame(vec![vec![0.0, 0.0, 1.0]]);
        let text = write_chain(&surf);
        let back = parse_chain(&text).unwrap();
        assert_eq!(surf, back);
        // exact decimals survive
        let odd = triangle(&[0.1, 0.2], &[1.0 / 3.0, 0.7], &[-1e-17, 2e8]).flip_inner();
        let back = parse_chain(&write_chain(&odd)).unwrap();
        assert_eq!(odd, back);
        assert!(parse_chain("1 + | 0 0").is_err());
        assert!(parse_chain("chain dim=2 degree=1\n1 ? | 0 0 | 1 1").is_err());
    }
}
