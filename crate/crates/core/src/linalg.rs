//! Small dense linear algebra over any [`Scalar`].
//!
//! Matrices are row-major `Vec<Vec<S>>`; dimensions here never exceed a
//! handful, so nothing fancier is warranted.

use crate::scalar::Scalar;

pub type Matrix<S> = Vec<Vec<S>>;

fn row_scale<S: Scalar>(m: &[Vec<S>]) -> f64 {
    m.iter()
        .map(|row| row.iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

fn pivot_row<S: Scalar>(m: &[Vec<S>], col: usize, from: usize) -> usize {
    let mut best = from;
    for r in from + 1..m.len() {
        if m[r][col].abs() > m[best][col].abs() {
            best = r;
        }
    }
    best
}

/// Reduces `m` in place to upper-triangular form, applying the same row
/// operations to `rhs`. Returns the determinant sign flips and whether a
/// singular pivot was met.
fn eliminate<S: Scalar>(m: &mut [Vec<S>], rhs: &mut [Vec<S>]) -> Option<bool> {
    let n = m.len();
    let scale = row_scale(m);
    let mut flipped = false;
    for col in 0..n {
        let p = pivot_row(m, col, col);
        if m[p][col].is_singular_pivot(scale) {
            return None;
        }
        if p != col {
            m.swap(p, col);
            if !rhs.is_empty() {
                rhs.swap(p, col);
            }
            flipped = !flipped;
        }
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone() / m[col][col].clone();
            for c in col..n {
                let t = factor.clone() * m[col][c].clone();
                m[r][c] = m[r][c].clone() - t;
            }
            if !rhs.is_empty() {
                for c in 0..rhs[r].len() {
                    let t = factor.clone() * rhs[col][c].clone();
                    rhs[r][c] = rhs[r][c].clone() - t;
                }
            }
        }
    }
    Some(flipped)
}

/// Whether the square matrix is singular under the field's pivot rule.
pub fn is_singular<S: Scalar>(m: &[Vec<S>]) -> bool {
    let mut work = m.to_vec();
    eliminate(&mut work, &mut []).is_none()
}

/// Determinant by elimination. Returns exact zero for singular rational
/// matrices; float matrices are reduced without a singularity cut-off.
pub fn determinant<S: Scalar>(m: &[Vec<S>]) -> S {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = S::one();
    for col in 0..n {
        let p = pivot_row(&a, col, col);
        if a[p][col].is_zero() {
            return S::zero();
        }
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det = det * a[col][col].clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone() / a[col][col].clone();
            for c in col..n {
                let t = factor.clone() * a[col][c].clone();
                a[r][c] = a[r][c].clone() - t;
            }
        }
    }
    det
}

/// Solves `m x = b`; `None` when `m` is singular.
pub fn solve<S: Scalar>(m: &[Vec<S>], b: &[S]) -> Option<Vec<S>> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut rhs: Vec<Vec<S>> = b.iter().map(|x| vec![x.clone()]).collect();
    eliminate(&mut a, &mut rhs)?;
    let mut x = vec![S::zero(); n];
    for r in (0..n).rev() {
        let mut acc = rhs[r][0].clone();
        for c in r + 1..n {
            acc = acc - a[r][c].clone() * x[c].clone();
        }
        x[r] = acc / a[r][r].clone();
    }
    Some(x)
}

pub fn inverse<S: Scalar>(m: &[Vec<S>]) -> Option<Matrix<S>> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut rhs = identity::<S>(n);
    eliminate(&mut a, &mut rhs)?;
    let mut inv = vec![vec![S::zero(); n]; n];
    for col in 0..n {
        for r in (0..n).rev() {
            let mut acc = rhs[r][col].clone();
            for c in r + 1..n {
                acc = acc - a[r][c].clone() * inv[c][col].clone();
            }
            inv[r][col] = acc / a[r][r].clone();
        }
    }
    Some(inv)
}

pub fn identity<S: Scalar>(n: usize) -> Matrix<S> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
        .collect()
}

pub fn transpose<S: Scalar>(m: &[Vec<S>]) -> Matrix<S> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|c| (0..rows).map(|r| m[r][c].clone()).collect())
        .collect()
}

pub fn mat_vec<S: Scalar>(m: &[Vec<S>], v: &[S]) -> Vec<S> {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn mat_mul<S: Scalar>(a: &[Vec<S>], b: &[Vec<S>]) -> Matrix<S> {
    let bt = transpose(b);
    a.iter()
        .map(|row| bt.iter().map(|col| dot(row, col)).collect())
        .collect()
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn norm_f64<S: Scalar>(v: &[S]) -> f64 {
    v.iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt()
}

/// A vector orthogonal to the `d-1` rows of `rows` (each of length `d`),
/// built from signed maximal minors. Zero when the rows are dependent.
pub fn generalized_cross<S: Scalar>(rows: &[Vec<S>]) -> Vec<S> {
    let d = rows.len() + 1;
    (0..d)
        .map(|skip| {
            let minor: Matrix<S> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != skip)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let det = determinant(&minor);
            if (skip + d + 1) % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect()
}

pub fn factorial(d: usize) -> u64 {
    (1..=d as u64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn determinant_and_inverse_rational() {
        let m = vec![vec![q(2), q(1), q(0)], vec![q(1), q(3), q(1)], vec![q(0), q(1), q(4)]];
        // 2(12-1) - 1(4-0) = 18
        assert_eq!(determinant(&m), q(18));
        let inv = inverse(&m).unwrap();
        assert_eq!(mat_mul(&m, &inv), identity::<Rational>(3));
    }

    #[test]
    fn solve_detects_singular() {
        let m = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert!(solve(&m, &[q(1), q(1)]).is_none());
        assert!(is_singular(&m));
        assert_eq!(determinant(&m), q(0));
        let mf = vec![vec![1.0, 2.0], vec![2.0, 4.0 + 1e-13]];
        assert!(is_singular(&mf));
    }

    #[test]
    fn cross_is_orthogonal() {
        let rows = vec![vec![q(1), q(2), q(3)], vec![q(0), q(1), q(-1)]];
        let n = generalized_cross(&rows);
        for r in &rows {
            assert_eq!(dot(r, &n), q(0));
        }
        assert_ne!(n, vec![q(0); 3]);
        // in R^2 the single row (1,0) gives a normal along y
        let n2 = generalized_cross(&[vec![q(1), q(0)]]);
        assert_eq!(dot(&n2, &[q(1), q(0)]), q(0));
        assert_ne!(n2[1], q(0));
    }
}
