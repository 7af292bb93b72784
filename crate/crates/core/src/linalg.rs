//! Small dense vector/matrix helpers for dimensions up to 4.
//!
//! Everything here works on plain `&[f64]` slices; the ambient dimension is
//! always small (2, 3 or 4) so no external linear-algebra crate is needed.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn cross3(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert!(a.len() == 3 && b.len() == 3);
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn zeros(n: usize) -> Vec<f64> {
    vec![0.0; n]
}

pub fn basis_vector(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

/// Determinant of a k x k matrix given as rows, k <= 4.
pub fn det(rows: &[Vec<f64>]) -> f64 {
    match rows.len() {
        0 => 1.0,
        1 => rows[0][0],
        2 => rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0],
        3 => {
            rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
                - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
                + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0])
        }
        4 => {
            let mut acc = 0.0;
            let mut sign = 1.0;
            for j in 0..4 {
                let minor: Vec<Vec<f64>> = rows[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                acc += sign * rows[0][j] * det(&minor);
                sign = -sign;
            }
            acc
        }
        k => panic!("det: unsupported size {k}"),
    }
}

/// Matrix-vector product; `m` is given as rows.
pub fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let p = b[0].len();
    (0..n)
        .map(|i| (0..p).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| basis_vector(n, i)).collect()
}

/// Inverse by Gauss-Jordan with partial pivoting. Returns `None` if the
/// pivot falls below `1e-12` in magnitude.
pub fn invert(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend(basis_vector(n, i));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        let p = a[col][col];
        for x in a[col].iter_mut() {
            *x /= p;
        }
        for row in 0..n {
            if row != col {
                let f = a[row][col];
                if f != 0.0 {
                    let src = a[col].clone();
                    for (x, s) in a[row].iter_mut().zip(&src) {
                        *x -= f * s;
                    }
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_small() {
        assert_eq!(det(&[vec![2.0]]), 2.0);
        assert_eq!(det(&[vec![1.0, 2.0], vec![3.0, 4.0]]), -2.0);
        assert_eq!(det(&identity(3)), 1.0);
        assert_eq!(det(&identity(4)), 1.0);
        let mut m = identity(4);
        m.swap(0, 1);
        assert_eq!(det(&m), -1.0);
    }

    #[test]
    fn invert_roundtrip() {
        let m = vec![vec![2.0, 1.0, 0.0], vec![0.0, 1.0, -1.0], vec![1.0, 0.0, 3.0]];
        let inv = invert(&m).unwrap();
        let prod = mat_mul(&m, &inv);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((prod[i][j] - expect).abs() < 1e-12);
            }
        }
        assert!(invert(&[vec![1.0, 1.0], vec![1.0, 1.0]]).is_none());
    }

    #[test]
    fn cross_matches_det() {
        let a = [0.3, -1.2, 0.7];
        let b = [2.0, 0.5, -0.1];
        let c = cross3(&a, &b);
        for i in 0..3 {
            let e = basis_vector(3, i);
            let d = det(&[e.clone(), a.to_vec(), b.to_vec()]);
            assert!((c[i] - d).abs() < 1e-14);
        }
    }
}
