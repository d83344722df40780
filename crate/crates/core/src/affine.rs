//! Affine maps `x -> Lx + t`, corner frames and point/hyperplane duality.

use crate::error::{Error, Result};
use crate::geometry::{Arrangement, Hyperplane, Point, Simplex};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap<S> {
    linear: Matrix<S>,
    translation: Vec<S>,
    det: S,
}

impl<S: Scalar> AffineMap<S> {
    pub fn new(linear: Matrix<S>, translation: Vec<S>) -> Result<Self> {
        let d = linear.len();
        for row in &linear {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
        }
        if translation.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: translation.len(),
            });
        }
        let det = linalg::determinant(&linear);
        Ok(Self {
            linear,
            translation,
            det,
        })
    }

    pub fn identity(d: usize) -> Self {
        Self::new(linalg::identity(d), vec![S::zero(); d]).expect("square")
    }

    pub fn scaling(d: usize, factor: S) -> Self {
        let linear = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| if i == j { factor.clone() } else { S::zero() })
                    .collect()
            })
            .collect();
        Self::new(linear, vec![S::zero(); d]).expect("square")
    }

    pub fn translation_by(t: Vec<S>) -> Self {
        Self::new(linalg::identity(t.len()), t).expect("square")
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn linear(&self) -> &Matrix<S> {
        &self.linear
    }

    pub fn translation(&self) -> &[S] {
        &self.translation
    }

    pub fn det(&self) -> &S {
        &self.det
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if self.dim() != inner.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: inner.dim(),
            });
        }
        let linear = linalg::mat_mul(&self.linear, &inner.linear);
        let translation = linalg::mat_vec(&self.linear, &inner.translation)
            .into_iter()
            .zip(&self.translation)
            .map(|(a, b)| a + b.clone())
            .collect();
        Self::new(linear, translation)
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = linalg::inverse(&self.linear).ok_or(Error::SingularMap)?;
        let t = linalg::mat_vec(&inv, &self.translation)
            .into_iter()
            .map(|x| -x)
            .collect();
        Self::new(inv, t)
    }

    pub fn apply_point(&self, p: &Point<S>) -> Result<Point<S>> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: p.dim(),
            });
        }
        let coords = linalg::mat_vec(&self.linear, &p.coords)
            .into_iter()
            .zip(&self.translation)
            .map(|(a, b)| a + b.clone())
            .collect();
        Ok(Point::new(coords))
    }

    /// Image of `{n.x = b}`: normal `L^{-T} n`, offset `b + (L^{-T} n).t`.
    pub fn apply_hyperplane(&self, h: &Hyperplane<S>) -> Result<Hyperplane<S>> {
        if h.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: h.dim(),
            });
        }
        let inv = linalg::inverse(&self.linear).ok_or(Error::SingularMap)?;
        let normal = linalg::mat_vec(&linalg::transpose(&inv), h.normal());
        let offset = h.offset().clone() + linalg::dot(&normal, &self.translation);
        let mut image = Hyperplane::new(normal, offset)?;
        image.label = h.label;
        Ok(image)
    }
}

/// Things an invertible affine map can be applied to.
pub trait AffineImage<S: Scalar>: Sized {
    fn mapped(&self, t: &AffineMap<S>) -> Result<Self>;
}

impl<S: Scalar> AffineImage<S> for Point<S> {
    fn mapped(&self, t: &AffineMap<S>) -> Result<Self> {
        if t.det.is_zero() {
            return Err(Error::SingularMap);
        }
        t.apply_point(self)
    }
}

impl<S: Scalar> AffineImage<S> for Hyperplane<S> {
    fn mapped(&self, t: &AffineMap<S>) -> Result<Self> {
        t.apply_hyperplane(self)
    }
}

impl<S: Scalar> AffineImage<S> for Arrangement<S> {
    fn mapped(&self, t: &AffineMap<S>) -> Result<Self> {
        let hs = self
            .hyperplanes()
            .iter()
            .map(|h| t.apply_hyperplane(h))
            .collect::<Result<Vec<_>>>()?;
        Arrangement::new(self.dim(), hs)
    }
}

impl<S: Scalar> AffineImage<S> for Simplex<S> {
    fn mapped(&self, t: &AffineMap<S>) -> Result<Self> {
        if t.det.is_zero() {
            return Err(Error::SingularMap);
        }
        let vertices = self
            .vertices
            .iter()
            .map(|v| t.apply_point(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(Simplex {
            vertices,
            defining: self.defining.clone(),
            volume: self.volume.clone() * t.det.abs(),
        })
    }
}

pub fn apply_affine_map<S: Scalar, X: AffineImage<S>>(t: &AffineMap<S>, x: &X) -> Result<X> {
    x.mapped(t)
}

/// An affine map sending `hs[i]` to the coordinate hyperplane `{x_i = 0}`:
/// `x -> A x - b` where row `i` of `A` is the normal of `hs[i]`.
pub fn corner_frame<S: Scalar>(hs: &[&Hyperplane<S>]) -> Result<AffineMap<S>> {
    let d = hs.first().map_or(0, |h| h.dim());
    if hs.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: hs.len(),
        });
    }
    let linear: Matrix<S> = hs.iter().map(|h| h.normal().to_vec()).collect();
    if linear.iter().any(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: linear.iter().map(Vec::len).find(|&l| l != d).unwrap_or(0),
        });
    }
    if linalg::is_singular(&linear) {
        return Err(Error::Degenerate);
    }
    let translation = hs.iter().map(|h| -h.offset().clone()).collect();
    AffineMap::new(linear, translation)
}

/// Point `p` to the hyperplane `x_d = p_1 x_1 + ... + p_{d-1} x_{d-1} + p_d`.
pub fn dual_of_point<S: Scalar>(p: &Point<S>) -> Result<Hyperplane<S>> {
    let d = p.dim();
    let mut normal: Vec<S> = p.coords[..d - 1].iter().map(|c| -c.clone()).collect();
    normal.push(S::one());
    Hyperplane::new(normal, p.coords[d - 1].clone())
}

/// Inverse of [`dual_of_point`]; fails on hyperplanes with no `x_d` term.
pub fn dual_of_hyperplane<S: Scalar>(h: &Hyperplane<S>) -> Result<Point<S>> {
    let d = h.dim();
    let last = h.normal()[d - 1].clone();
    if last.is_zero() {
        return Err(Error::VerticalHyperplane);
    }
    let mut coords: Vec<S> = h.normal()[..d - 1]
        .iter()
        .map(|a| -a.clone() / last.clone())
        .collect();
    coords.push(h.offset().clone() / last);
    Ok(Point::new(coords))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dual<S> {
    Point(Point<S>),
    Hyperplane(Hyperplane<S>),
}

pub fn dual_transform<S: Scalar>(x: &Dual<S>) -> Result<Dual<S>> {
    match x {
        Dual::Point(p) => dual_of_point(p).map(Dual::Hyperplane),
        Dual::Hyperplane(h) => dual_of_hyperplane(h).map(Dual::Point),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{simplex_of_subset, Arrangement};
    use crate::scalar::Rational;

    type Q = Rational;

    fn hq(n: &[i64], b: i64) -> Hyperplane<Q> {
        Hyperplane::from_ints(n, b).unwrap()
    }

    #[test]
    fn scaling_multiplies_area() {
        let a = Arrangement::new(2, vec![hq(&[1, 0], 0), hq(&[0, 1], 0), hq(&[1, 1], 1)]).unwrap();
        let s = simplex_of_subset(&a, &[0, 1, 2]).unwrap();
        let t = AffineMap::scaling(2, Q::from_i64(2));
        assert_eq!(*t.det(), Q::from_i64(4));
        let image = apply_affine_map(&t, &s).unwrap();
        assert_eq!(image.volume, Q::from_i64(2));
        // recomputing from the mapped arrangement agrees
        let mapped = apply_affine_map(&t, &a).unwrap();
        assert_eq!(simplex_of_subset(&mapped, &[0, 1, 2]).unwrap().volume, Q::from_i64(2));
        let id = AffineMap::<Q>::identity(2);
        assert_eq!(apply_affine_map(&id, &s).unwrap().volume, s.volume);
    }

    #[test]
    fn singular_map_rejected() {
        let t = AffineMap::new(vec![vec![Q::from_i64(1), Q::from_i64(2)], vec![Q::from_i64(2), Q::from_i64(4)]], vec![Q::from_i64(0); 2]).unwrap();
        assert_eq!(t.inverse(), Err(Error::SingularMap));
        assert_eq!(apply_affine_map(&t, &hq(&[1, 0], 0)), Err(Error::SingularMap));
        assert_eq!(apply_affine_map(&t, &Point::<Q>::from_ints(&[1, 1])), Err(Error::SingularMap));
    }

    #[test]
    fn compose_and_inverse() {
        let t = AffineMap::new(
            vec![vec![Q::from_i64(2), Q::from_i64(1)], vec![Q::from_i64(1), Q::from_i64(1)]],
            vec![Q::from_i64(3), Q::from_i64(-1)],
        )
        .unwrap();
        let id = t.compose(&t.inverse().unwrap()).unwrap();
        assert_eq!(id, AffineMap::identity(2));
        let p = Point::from_ints(&[5, 7]);
        let tp = t.apply_point(&p).unwrap();
        assert_eq!(tp, Point::from_ints(&[20, 11]));
        let h = hq(&[1, -2], 4);
        // incidence is preserved
        let q = Point::from_ints(&[6, 1]);
        assert!(h.contains(&q));
        assert!(t.apply_hyperplane(&h).unwrap().contains(&t.apply_point(&q).unwrap()));
    }

    #[test]
    fn corner_frame_examples() {
        let x = hq(&[1, 0], 0);
        let y = hq(&[0, 1], 0);
        assert_eq!(corner_frame(&[&x, &y]).unwrap(), AffineMap::identity(2));

        let a = hq(&[1, 1], 0);
        let b = hq(&[1, -1], 0);
        let f = corner_frame(&[&a, &b]).unwrap();
        assert_eq!(f.apply_hyperplane(&a).unwrap(), Hyperplane::coordinate(2, 0, Q::from_i64(0)));
        assert_eq!(f.apply_hyperplane(&b).unwrap(), Hyperplane::coordinate(2, 1, Q::from_i64(0)));
        let back = f.inverse().unwrap();
        for h in [&a, &b] {
            let round = back.apply_hyperplane(&f.apply_hyperplane(h).unwrap()).unwrap();
            assert_eq!(&round, h);
        }
        let x1 = hq(&[1, 0], 1);
        assert_eq!(corner_frame(&[&x, &x1]), Err(Error::Degenerate));
    }

    #[test]
    fn duality_examples() {
        let p = Point::<Q>::from_ints(&[1, 2]);
        let h = dual_of_point(&p).unwrap();
        // y = x + 2  <=>  -x + y = 2, canonical: x - y = -2
        assert_eq!(h, hq(&[1, -1], -2));
        assert_eq!(dual_of_hyperplane(&hq(&[0, 1], 0)).unwrap(), Point::from_ints(&[0, 0]));
        let p3 = Point::<Q>::from_ints(&[1, 0, 5]);
        let h3 = dual_of_point(&p3).unwrap();
        assert_eq!(h3, hq(&[-1, 0, 1], 5));
        assert_eq!(dual_of_hyperplane(&h3).unwrap(), p3);
        assert_eq!(dual_of_hyperplane(&hq(&[1, 0], 3)), Err(Error::VerticalHyperplane));
        let back = dual_transform(&dual_transform(&Dual::Point(p.clone())).unwrap()).unwrap();
        assert_eq!(back, Dual::Point(p));
    }
}
