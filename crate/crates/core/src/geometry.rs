//! Points, hyperplanes, arrangements and the simplices they form.

use std::collections::BTreeMap;

use crate::combinatorics::Combinations;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use num::{Signed, Zero};

use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Point<S> {
    pub coords: Vec<S>,
}

impl<S: Scalar> Point<S> {
    pub fn new(coords: Vec<S>) -> Self {
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Self::new(coords.iter().map(|&c| S::from_i64(c)).collect())
    }
}

/// The set `{x : normal . x = offset}`, stored in canonical form.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane<S> {
    normal: Vec<S>,
    offset: S,
    pub label: Option<u32>,
}

impl<S: Scalar> Hyperplane<S> {
    pub fn new(mut normal: Vec<S>, mut offset: S) -> Result<Self> {
        if normal.is_empty() || normal.iter().all(|x| x.is_zero()) {
            return Err(Error::ZeroNormal);
        }
        S::rescale_hyperplane(&mut normal, &mut offset);
        let lead = normal
            .iter()
            .find(|x| x.is_leading())
            .or_else(|| normal.iter().find(|x| !x.is_zero()))
            .cloned()
            .ok_or(Error::ZeroNormal)?;
        if lead.is_negative() {
            for x in &mut normal {
                *x = -x.clone();
            }
            offset = -offset;
        }
        Ok(Self {
            normal,
            offset,
            label: None,
        })
    }

    pub fn from_ints(normal: &[i64], offset: i64) -> Result<Self> {
        Self::new(
            normal.iter().map(|&c| S::from_i64(c)).collect(),
            S::from_i64(offset),
        )
    }

    pub fn with_label(mut self, label: u32) -> Self {
        self.label = Some(label);
        self
    }

    /// The coordinate hyperplane `{x_axis = value}`.
    pub fn coordinate(dim: usize, axis: usize, value: S) -> Self {
        let normal = (0..dim)
            .map(|i| if i == axis { S::one() } else { S::zero() })
            .collect();
        Self::new(normal, value).expect("unit normal")
    }

    pub fn normal(&self) -> &[S] {
        &self.normal
    }

    pub fn offset(&self) -> &S {
        &self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// `normal . p - offset`.
    pub fn residual(&self, p: &Point<S>) -> S {
        linalg::dot(&self.normal, &p.coords) - self.offset.clone()
    }

    /// Magnitude of the terms entering [`Self::residual`], for relative tests.
    pub fn residual_scale(&self, p: &Point<S>) -> f64 {
        linalg::norm_f64(&self.normal) * linalg::norm_f64(&p.coords) + self.offset.to_f64().abs()
    }

    /// Side of `p`: -1, 0 or 1. Float residuals within the relative band count as 0.
    pub fn side(&self, p: &Point<S>) -> i8 {
        let r = self.residual(p);
        if r.is_negligible(self.residual_scale(p)) {
            0
        } else {
            r.sign()
        }
    }

    pub fn contains(&self, p: &Point<S>) -> bool {
        self.side(p) == 0
    }

    /// Same set up to `tol` on the unit-normalized coefficients.
    pub fn approx_same(&self, other: &Self, tol: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let unit = |h: &Self| {
            let n = linalg::norm_f64(&h.normal);
            let mut v: Vec<f64> = h.normal.iter().map(|x| x.to_f64() / n).collect();
            v.push(h.offset.to_f64() / n);
            v
        };
        let (a, b) = (unit(self), unit(other));
        let dist = |sign: f64| {
            a.iter()
                .zip(&b)
                .map(|(x, y)| (x - sign * y).abs())
                .fold(0.0, f64::max)
        };
        dist(1.0).min(dist(-1.0)) <= tol
    }

    /// Canonical coefficients compared exactly, ignoring labels.
    pub fn same_set(&self, other: &Self) -> bool {
        self.normal == other.normal && self.offset == other.offset
    }

    pub fn to_float(&self) -> Hyperplane<f64> {
        let h = Hyperplane::new(
            self.normal.iter().map(Scalar::to_f64).collect(),
            self.offset.to_f64(),
        )
        .expect("nonzero normal stays nonzero");
        Hyperplane { label: self.label, ..h }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arrangement<S> {
    dim: usize,
    hyperplanes: Vec<Hyperplane<S>>,
    index: BTreeMap<u32, usize>,
}

impl<S: Scalar> Arrangement<S> {
    /// Builds an arrangement. Unlabeled hyperplanes receive the smallest
    /// labels not already taken, in order.
    pub fn new(dim: usize, mut hyperplanes: Vec<Hyperplane<S>>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::BadParams(format!("dimension must be at least 2, got {dim}")));
        }
        let mut index = BTreeMap::new();
        for (i, h) in hyperplanes.iter().enumerate() {
            if h.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: h.dim(),
                });
            }
            if let Some(l) = h.label {
                if index.insert(l, i).is_some() {
                    return Err(Error::DuplicateLabel(l));
                }
            }
        }
        let mut next = 0u32;
        for (i, h) in hyperplanes.iter_mut().enumerate() {
            if h.label.is_none() {
                while index.contains_key(&next) {
                    next += 1;
                }
                h.label = Some(next);
                index.insert(next, i);
            }
        }
        for i in 0..hyperplanes.len() {
            for j in i + 1..hyperplanes.len() {
                if hyperplanes[i].same_set(&hyperplanes[j]) {
                    return Err(Error::DuplicateHyperplane(
                        hyperplanes[i].label.unwrap_or_default(),
                        hyperplanes[j].label.unwrap_or_default(),
                    ));
                }
            }
        }
        Ok(Self {
            dim,
            hyperplanes,
            index,
        })
    }

    /// Labels `start, start+1, ...` in the given order.
    pub fn with_labels_from(dim: usize, hyperplanes: Vec<Hyperplane<S>>, start: u32) -> Result<Self> {
        let labeled = hyperplanes
            .into_iter()
            .zip(start..)
            .map(|(h, l)| h.with_label(l))
            .collect();
        Self::new(dim, labeled)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    pub fn hyperplanes(&self) -> &[Hyperplane<S>] {
        &self.hyperplanes
    }

    pub fn label_at(&self, i: usize) -> u32 {
        self.hyperplanes[i].label.expect("arrangement hyperplanes are labeled")
    }

    pub fn labels(&self) -> Vec<u32> {
        (0..self.len()).map(|i| self.label_at(i)).collect()
    }

    pub fn position(&self, label: u32) -> Result<usize> {
        self.index.get(&label).copied().ok_or(Error::UnknownLabel(label))
    }

    pub fn get(&self, label: u32) -> Result<&Hyperplane<S>> {
        Ok(&self.hyperplanes[self.position(label)?])
    }

    /// Sub-arrangement on the given labels, preserving their labels.
    pub fn restrict(&self, labels: &[u32]) -> Result<Self> {
        let hs = labels
            .iter()
            .map(|&l| self.get(l).cloned())
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.dim, hs)
    }

    /// Multiplies every point of space by `factor` (volumes scale by `factor^d`).
    pub fn scaled(&self, factor: S) -> Result<Self> {
        let hs = self
            .hyperplanes
            .iter()
            .map(|h| {
                Hyperplane::new(h.normal.clone(), h.offset.clone() * factor.clone())
                    .map(|n| Hyperplane { label: h.label, ..n })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.dim, hs)
    }

    pub fn to_float(&self) -> Result<Arrangement<f64>> {
        Arrangement::new(self.dim, self.hyperplanes.iter().map(Hyperplane::to_float).collect())
    }

    /// Same hyperplanes in a different storage order.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        Self::new(self.dim, order.iter().map(|&i| self.hyperplanes[i].clone()).collect())
    }
}

/// A simplex cut out by `d+1` hyperplanes. Vertex `k` is the common point of
/// all defining hyperplanes except the `k`-th.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex<S> {
    pub vertices: Vec<Point<S>>,
    pub defining: Vec<u32>,
    pub volume: S,
}

fn check_dims<S: Scalar>(hs: &[&Hyperplane<S>], expected: usize) -> Result<()> {
    for h in hs {
        if h.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: h.dim(),
            });
        }
    }
    Ok(())
}

/// The unique common point of `d` hyperplanes in `R^d`.
pub fn intersect_point<S: Scalar>(hs: &[&Hyperplane<S>]) -> Result<Point<S>> {
    let d = hs.first().map_or(0, |h| h.dim());
    if hs.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: hs.len(),
        });
    }
    check_dims(hs, d)?;
    let m: Matrix<S> = hs.iter().map(|h| h.normal.clone()).collect();
    let b: Vec<S> = hs.iter().map(|h| h.offset.clone()).collect();
    linalg::solve(&m, &b).map(Point::new).ok_or(Error::Degenerate)
}

/// Whether `d+1` hyperplanes pass through a common point, given that every
/// `d` of them meet in a single point.
fn concurrent<S: Scalar>(hs: &[&Hyperplane<S>]) -> bool {
    let augmented: Matrix<S> = hs
        .iter()
        .map(|h| {
            let mut row = h.normal.clone();
            row.push(-h.offset.clone());
            row
        })
        .collect();
    linalg::is_singular(&augmented)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// `d` hyperplanes whose normals are linearly dependent.
    Singular,
    /// `d+1` hyperplanes through one point.
    Concurrent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub kind: WitnessKind,
    pub labels: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralPosition {
    pub holds: bool,
    pub witness: Option<Witness>,
}

pub fn is_general_position<S: Scalar>(a: &Arrangement<S>) -> GeneralPosition {
    let d = a.dim();
    let n = a.len();
    let fail = |kind, idx: &[usize]| GeneralPosition {
        holds: false,
        witness: Some(Witness {
            kind,
            labels: idx.iter().map(|&i| a.label_at(i)).collect(),
        }),
    };
    for idx in Combinations::new(n, d) {
        let m: Matrix<S> = idx.iter().map(|&i| a.hyperplanes[i].normal.clone()).collect();
        if linalg::is_singular(&m) {
            return fail(WitnessKind::Singular, &idx);
        }
    }
    for idx in Combinations::new(n, d + 1) {
        let hs: Vec<_> = idx.iter().map(|&i| &a.hyperplanes[i]).collect();
        if concurrent(&hs) {
            return fail(WitnessKind::Concurrent, &idx);
        }
    }
    GeneralPosition {
        holds: true,
        witness: None,
    }
}

/// `|det(v_1 - v_0, ..., v_d - v_0)| / d!`.
pub fn simplex_volume<S: Scalar>(vertices: &[Point<S>]) -> S {
    let v0 = &vertices[0];
    let edges: Matrix<S> = vertices[1..]
        .iter()
        .map(|v| {
            v.coords
                .iter()
                .zip(&v0.coords)
                .map(|(a, b)| a.clone() - b.clone())
                .collect()
        })
        .collect();
    let d = edges.len();
    linalg::determinant(&edges).abs() / S::from_i64(linalg::factorial(d) as i64)
}

/// Simplex of `d+1` hyperplanes given by index into some storage. Shared by
/// the enumeration code, which works on positions rather than labels.
pub(crate) fn simplex_of_hyperplanes<S: Scalar>(hs: &[&Hyperplane<S>]) -> Option<(Vec<Point<S>>, S)> {
    let mut vertices = Vec::with_capacity(hs.len());
    for k in 0..hs.len() {
        let rest: Vec<&Hyperplane<S>> = hs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, h)| *h)
            .collect();
        vertices.push(intersect_point(&rest).ok()?);
    }
    if concurrent(hs) {
        return None;
    }
    let volume = simplex_volume(&vertices);
    if volume.is_zero() {
        return None;
    }
    Some((vertices, volume))
}

pub fn simplex_of_subset<S: Scalar>(a: &Arrangement<S>, labels: &[u32]) -> Result<Simplex<S>> {
    let d = a.dim();
    if labels.len() != d + 1 {
        return Err(Error::DimensionMismatch {
            expected: d + 1,
            found: labels.len(),
        });
    }
    let mut defining = labels.to_vec();
    defining.sort_unstable();
    let hs = defining
        .iter()
        .map(|&l| a.get(l))
        .collect::<Result<Vec<_>>>()?;
    let (vertices, volume) = simplex_of_hyperplanes(&hs).ok_or(Error::Degenerate)?;
    Ok(Simplex {
        vertices,
        defining,
        volume,
    })
}

/// Closed-form simplex volume straight from the hyperplane coefficients:
/// `|det [a_i, -b_i]|^d / (d! * prod_k |det A_k|)` with `A_k` the normal
/// matrix missing row `k`. Used as an independent cross-check of the
/// vertex route.
pub fn volume_from_coefficients(hs: &[&Hyperplane<Rational>]) -> Option<Rational> {
    let d = hs.len() - 1;
    let augmented: Matrix<Rational> = hs
        .iter()
        .map(|h| {
            let mut row = h.normal.clone();
            row.push(-h.offset.clone());
            row
        })
        .collect();
    let top = linalg::determinant(&augmented).abs();
    let mut denom = Rational::from_i64(linalg::factorial(d) as i64);
    for k in 0..=d {
        let minor: Matrix<Rational> = hs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, h)| h.normal.clone())
            .collect();
        let m = linalg::determinant(&minor);
        if m.is_zero() {
            return None;
        }
        denom = denom * m.abs();
    }
    if top.is_zero() {
        return None;
    }
    let mut num = Rational::from_i64(1);
    for _ in 0..d {
        num = num * top.clone();
    }
    Some(num / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = Rational;

    fn hq(n: &[i64], b: i64) -> Hyperplane<Q> {
        Hyperplane::from_ints(n, b).unwrap()
    }

    fn arr(d: usize, hs: Vec<Hyperplane<Q>>) -> Arrangement<Q> {
        Arrangement::new(d, hs).unwrap()
    }

    #[test]
    fn canonical_form_rational() {
        let h = Hyperplane::<Q>::new(
            vec![Q::from_ratio(-2, 3), Q::from_ratio(4, 3)],
            Q::from_ratio(2, 1),
        )
        .unwrap();
        assert_eq!(h.normal(), &[Q::from_i64(1), Q::from_i64(-2)]);
        assert_eq!(h.offset(), &Q::from_i64(-3));
        assert!(Hyperplane::<Q>::from_ints(&[0, 0], 1).is_err());
    }

    #[test]
    fn canonical_form_float() {
        let h = Hyperplane::<f64>::new(vec![0.0, -3.0, 4.0], 10.0).unwrap();
        assert_eq!(h.normal(), &[0.0, 0.6, -0.8]);
        assert_eq!(*h.offset(), -2.0);
    }

    #[test]
    fn intersect_examples() {
        let x0 = hq(&[1, 0], 0);
        let y0 = hq(&[0, 1], 0);
        let x1 = hq(&[1, 0], 1);
        assert_eq!(intersect_point(&[&x0, &y0]).unwrap(), Point::from_ints(&[0, 0]));
        assert_eq!(intersect_point(&[&x0, &x1]), Err(Error::Degenerate));
        let p = intersect_point(&[&hq(&[1, 0, 0], 0), &hq(&[0, 1, 0], 0), &hq(&[1, 1, 1], 3)]).unwrap();
        assert_eq!(p, Point::from_ints(&[0, 0, 3]));
        assert!(matches!(
            intersect_point(&[&x0]),
            Err(Error::DimensionMismatch { .. })
        ));
        let z = hq(&[0, 0, 1], 0);
        assert!(matches!(
            intersect_point(&[&x0, &z]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn general_position_examples() {
        let a = arr(2, vec![hq(&[1, 0], 0), hq(&[0, 1], 0), hq(&[1, 1], 1)]);
        assert!(is_general_position(&a).holds);
        let b = arr(2, vec![hq(&[1, 0], 0), hq(&[1, 0], 1), hq(&[0, 1], 0)]);
        let gp = is_general_position(&b);
        assert!(!gp.holds);
        let w = gp.witness.unwrap();
        assert_eq!(w.kind, WitnessKind::Singular);
        assert_eq!(w.labels, vec![0, 1]);
        let c = arr(2, vec![hq(&[1, 0], 0), hq(&[0, 1], 0), hq(&[1, -1], 0)]);
        let gp = is_general_position(&c);
        assert_eq!(gp.witness.unwrap().kind, WitnessKind::Concurrent);
    }

    #[test]
    fn simplex_examples() {
        let a = arr(2, vec![hq(&[1, 0], 0), hq(&[0, 1], 0), hq(&[1, 1], 1)]);
        let s = simplex_of_subset(&a, &[0, 1, 2]).unwrap();
        assert_eq!(s.volume, Q::from_ratio(1, 2));
        // vertex k misses hyperplane k
        assert_eq!(s.vertices[0], Point::from_ints(&[1, 0]));
        assert_eq!(s.vertices[1], Point::from_ints(&[0, 1]));
        assert_eq!(s.vertices[2], Point::from_ints(&[0, 0]));

        let t = arr(
            3,
            vec![hq(&[1, 0, 0], 0), hq(&[0, 1, 0], 0), hq(&[0, 0, 1], 0), hq(&[1, 1, 1], 3)],
        );
        assert_eq!(simplex_of_subset(&t, &[0, 1, 2, 3]).unwrap().volume, Q::from_ratio(27, 6));

        let c = arr(2, vec![hq(&[1, 0], 0), hq(&[0, 1], 0), hq(&[1, -1], 0)]);
        assert_eq!(simplex_of_subset(&c, &[0, 1, 2]), Err(Error::Degenerate));
        assert_eq!(simplex_of_subset(&c, &[0, 1, 7]), Err(Error::UnknownLabel(7)));
    }

    #[test]
    fn volumes_of_vertex_lists() {
        let unit: Vec<Point<Q>> = vec![
            Point::from_ints(&[0, 0, 0]),
            Point::from_ints(&[1, 0, 0]),
            Point::from_ints(&[0, 1, 0]),
            Point::from_ints(&[0, 0, 1]),
        ];
        assert_eq!(simplex_volume(&unit), Q::from_ratio(1, 6));
        let big: Vec<Point<Q>> = vec![
            Point::from_ints(&[0, 0, 0]),
            Point::from_ints(&[3, 0, 0]),
            Point::from_ints(&[0, 3, 0]),
            Point::from_ints(&[0, 0, 3]),
        ];
        assert_eq!(simplex_volume(&big), Q::from_ratio(9, 2));
        // a CFK cell: 0, e1, e1+e3, e1+e2+e3
        let cfk: Vec<Point<Q>> = vec![
            Point::from_ints(&[0, 0, 0]),
            Point::from_ints(&[1, 0, 0]),
            Point::from_ints(&[1, 0, 1]),
            Point::from_ints(&[1, 1, 1]),
        ];
        assert_eq!(simplex_volume(&cfk), Q::from_ratio(1, 6));
    }

    #[test]
    fn coefficient_formula_agrees() {
        let hs = [hq(&[1, 0, 0], 0), hq(&[0, 1, 0], 0), hq(&[0, 0, 1], 0), hq(&[1, 1, 1], 3)];
        let refs: Vec<_> = hs.iter().collect();
        assert_eq!(volume_from_coefficients(&refs), Some(Q::from_ratio(9, 2)));
    }

    #[test]
    fn arrangement_rejects_duplicates_and_assigns_labels() {
        let dup = Arrangement::new(2, vec![hq(&[1, 0], 1), hq(&[2, 0], 2)]);
        assert_eq!(dup, Err(Error::DuplicateHyperplane(0, 1)));
        let a = arr(2, vec![hq(&[1, 0], 0).with_label(1), hq(&[0, 1], 0), hq(&[1, 1], 1)]);
        assert_eq!(a.labels(), vec![1, 0, 2]);
        let clash = Arrangement::new(2, vec![hq(&[1, 0], 0).with_label(3), hq(&[0, 1], 0).with_label(3)]);
        assert_eq!(clash, Err(Error::DuplicateLabel(3)));
    }
}
