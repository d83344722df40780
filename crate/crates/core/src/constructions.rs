//! Generators for the explicit arrangements: the CFK grid, regular-polygon
//! chords, rotation and helix families with their shift maps, and tangent
//! hyperplanes to corner surfaces `prod x_i = c`.

use std::f64::consts::{FRAC_PI_4, PI};

use num::{BigInt, One, Signed};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::affine::AffineMap;
use crate::error::{Error, Result};
use crate::geometry::{
    is_general_position, simplex_of_hyperplanes, simplex_of_subset, Arrangement, Hyperplane, Point,
};
use crate::linalg::{self, Matrix};
use crate::scalar::{Rational, Scalar};

/// The CFK arrangement: `x_i = k` for `0 <= k <= n` and
/// `x_p - x_q = t` for `p < q`, `|t| <= n-1`. Labels count from 0.
pub fn gen_cfk(d: usize, n: usize) -> Result<Arrangement<Rational>> {
    if d < 2 || n < 1 {
        return Err(Error::BadParams(format!("cfk needs d >= 2 and n >= 1, got d={d}, n={n}")));
    }
    let mut hs = Vec::with_capacity(cfk_size(d, n));
    for axis in 0..d {
        for k in 0..=n {
            hs.push(Hyperplane::coordinate(d, axis, Rational::from_i64(k as i64)));
        }
    }
    let span = n as i64 - 1;
    for p in 0..d {
        for q in p + 1..d {
            for t in -span..=span {
                let mut normal = vec![0i64; d];
                normal[p] = 1;
                normal[q] = -1;
                hs.push(Hyperplane::from_ints(&normal, t)?);
            }
        }
    }
    Arrangement::with_labels_from(d, hs, 0)
}

/// `d(n+1) + C(d,2)(2n-1)`.
pub fn cfk_size(d: usize, n: usize) -> usize {
    d * (n + 1) + d * (d - 1) / 2 * (2 * n - 1)
}

/// Rotation angles and step of a shift map `T_D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftParams {
    pub d: usize,
    /// One angle per rotation block, `floor(d/2)` in total.
    pub thetas: Vec<f64>,
    pub step: i64,
}

impl ShiftParams {
    pub fn new(d: usize, thetas: Vec<f64>, step: i64) -> Result<Self> {
        let p = Self { d, thetas, step };
        p.validate()?;
        Ok(p)
    }

    pub fn with_step(&self, step: i64) -> Self {
        Self { step, ..self.clone() }
    }

    fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::BadParams("shift maps need d >= 2".into()));
        }
        if self.thetas.len() != self.d / 2 {
            return Err(Error::BadParams(format!(
                "d={} needs {} angles, got {}",
                self.d,
                self.d / 2,
                self.thetas.len()
            )));
        }
        if self.thetas.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::BadParams("angles must be positive".into()));
        }
        for (i, a) in self.thetas.iter().enumerate() {
            if self.thetas[i + 1..].contains(a) {
                return Err(Error::BadParams("angles must be pairwise distinct".into()));
            }
        }
        Ok(())
    }
}

/// An arrangement from one of the shift-covariant families, together with
/// the angles it was built from. Labels run `1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftFamily {
    pub arrangement: Arrangement<f64>,
    pub params: ShiftParams,
}

pub fn default_ngon_sides(n: usize) -> usize {
    (4 * n).max(12)
}

/// Lines through consecutive vertices of the regular `big_n`-gon inscribed
/// in the unit circle: line `i` joins the vertices at angles `2pi(i-1)/N`
/// and `2pi i/N`.
pub fn gen_ngon_edges(n: usize, big_n: usize) -> Result<ShiftFamily> {
    if n < 3 || big_n < 4 * n {
        return Err(Error::BadParams(format!("ngon needs n >= 3 and N >= 4n, got n={n}, N={big_n}")));
    }
    let step = 2.0 * PI / big_n as f64;
    let hs = (1..=n)
        .map(|i| {
            let mid = (i as f64 - 0.5) * step;
            Hyperplane::new(vec![mid.cos(), mid.sin()], (step / 2.0).cos()).map(|h| h.with_label(i as u32))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShiftFamily {
        arrangement: Arrangement::new(2, hs)?,
        params: ShiftParams::new(2, vec![step], 1)?,
    })
}

/// Default angles `j*0.03 + 0.01`, shrunk when needed so `n*theta_j < pi/4`.
pub fn default_thetas(d: usize, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (1..=d / 2).map(|j| j as f64 * 0.03 + 0.01).collect();
    let top = raw.iter().cloned().fold(0.0, f64::max) * n as f64;
    let limit = 0.9 * FRAC_PI_4;
    if top < limit {
        raw
    } else {
        raw.iter().map(|t| t * limit / top).collect()
    }
}

pub const GENERAL_POSITION_RETRIES: usize = 16;

/// The hyperplane through `d` points in `R^d`.
fn hyperplane_through(points: &[Vec<f64>]) -> Option<Hyperplane<f64>> {
    let p0 = &points[0];
    let rows: Matrix<f64> = points[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let normal = linalg::generalized_cross(&rows);
    let scale = rows.iter().map(|r| linalg::norm_f64(r)).product::<f64>().max(f64::MIN_POSITIVE);
    if linalg::norm_f64(&normal) <= 1e-10 * scale {
        return None;
    }
    let offset = linalg::dot(&normal, p0);
    Hyperplane::new(normal, offset).ok()
}

fn family_points(d: usize, i: i64, thetas: &[f64]) -> Vec<Vec<f64>> {
    let helix = d % 2 == 1;
    let mut pts = Vec::with_capacity(d);
    for (j, t) in thetas.iter().enumerate() {
        for k in [i - 1, i] {
            let mut p = vec![0.0; d];
            let a = k as f64 * t;
            p[2 * j] = a.cos();
            p[2 * j + 1] = a.sin();
            if helix {
                p[d - 1] = k as f64;
            }
            pts.push(p);
        }
    }
    if helix {
        let mut q = vec![0.0; d];
        q[d - 1] = i as f64;
        pts.push(q);
    }
    pts
}

fn build_family(d: usize, n: usize, thetas: &[f64]) -> Option<Arrangement<f64>> {
    let hs = (1..=n as i64)
        .map(|i| hyperplane_through(&family_points(d, i, thetas)).map(|h| h.with_label(i as u32)))
        .collect::<Option<Vec<_>>>()?;
    let a = Arrangement::new(d, hs).ok()?;
    is_general_position(&a).holds.then_some(a)
}

fn gen_family(d: usize, n: usize, thetas: Vec<f64>, seed: u64) -> Result<ShiftFamily> {
    if n < d + 2 {
        return Err(Error::BadParams(format!("need n >= d+2, got d={d}, n={n}")));
    }
    let params = ShiftParams::new(d, thetas, 1)?;
    if d % 2 == 0 && params.thetas.iter().any(|t| n as f64 * t >= FRAC_PI_4) {
        return Err(Error::BadParams("rotation angles need n*theta < pi/4".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut thetas = params.thetas.clone();
    for attempt in 0..=GENERAL_POSITION_RETRIES {
        if attempt > 0 {
            thetas = params
                .thetas
                .iter()
                .map(|t| t * (1.0 + 0.1 * rng.gen_range(-1.0..1.0)))
                .collect();
            if d % 2 == 0 && thetas.iter().any(|t| n as f64 * t >= FRAC_PI_4) {
                continue;
            }
            if ShiftParams::new(d, thetas.clone(), 1).is_err() {
                continue;
            }
        }
        if let Some(arrangement) = build_family(d, n, &thetas) {
            return Ok(ShiftFamily {
                arrangement,
                params: ShiftParams::new(d, thetas, 1)?,
            });
        }
    }
    Err(Error::GeneralPositionFailure(GENERAL_POSITION_RETRIES))
}

/// Even `d`: `H_i` is the affine hull of `P_{i-1,j}, P_{i,j}` over the
/// rotation blocks `j`, with `P_{i,j} = (cos i theta_j, sin i theta_j)` in
/// block `j`. Angles are jittered (seeded) if general position fails.
pub fn gen_even_rotation(d: usize, n: usize, thetas: Vec<f64>, seed: u64) -> Result<ShiftFamily> {
    if d % 2 != 0 {
        return Err(Error::BadParams(format!("rotation family needs even d, got {d}")));
    }
    gen_family(d, n, thetas, seed)
}

/// Odd `d`: the rotation points get height `i` in the last coordinate and
/// each `H_i` also passes through `Q_i = (0, ..., 0, i)`.
pub fn gen_odd_helix(d: usize, n: usize, thetas: Vec<f64>, seed: u64) -> Result<ShiftFamily> {
    if d % 2 != 1 || d < 3 {
        return Err(Error::BadParams(format!("helix family needs odd d >= 3, got {d}")));
    }
    gen_family(d, n, thetas, seed)
}

/// Block rotations by `D theta_j`, plus translation by `D` along the last
/// axis when `d` is odd.
pub fn shift_map(params: &ShiftParams) -> Result<AffineMap<f64>> {
    params.validate()?;
    let d = params.d;
    let mut linear = linalg::identity::<f64>(d);
    for (j, t) in params.thetas.iter().enumerate() {
        let (s, c) = (params.step as f64 * t).sin_cos();
        linear[2 * j][2 * j] = c;
        linear[2 * j][2 * j + 1] = -s;
        linear[2 * j + 1][2 * j] = s;
        linear[2 * j + 1][2 * j + 1] = c;
    }
    let mut translation = vec![0.0; d];
    if d % 2 == 1 {
        translation[d - 1] = params.step as f64;
    }
    AffineMap::new(linear, translation)
}

/// Largest coefficient discrepancy between `T_D(H_i)` and `H_{i+D}` over all
/// `i` with both labels present, comparing unit-normalized coefficients up
/// to sign.
pub fn shift_covariance_residual(a: &Arrangement<f64>, params: &ShiftParams) -> Result<f64> {
    if a.dim() != params.d {
        return Err(Error::ParamMismatch(format!(
            "arrangement has d={}, parameters d={}",
            a.dim(),
            params.d
        )));
    }
    let n = a.len() as i64;
    for l in 1..=n {
        a.get(l as u32)
            .map_err(|_| Error::ParamMismatch(format!("expected labels 1..={n}, missing {l}")))?;
    }
    let t = shift_map(params)?;
    let mut worst: f64 = 0.0;
    for i in 1..=n {
        let j = i + params.step;
        if !(1..=n).contains(&j) {
            continue;
        }
        let image = t.apply_hyperplane(a.get(i as u32)?)?;
        worst = worst.max(coefficient_distance(&image, a.get(j as u32)?));
    }
    Ok(worst)
}

fn coefficient_distance(x: &Hyperplane<f64>, y: &Hyperplane<f64>) -> f64 {
    let unit = |h: &Hyperplane<f64>| {
        let s = linalg::norm_f64(h.normal());
        let mut v: Vec<f64> = h.normal().iter().map(|c| c / s).collect();
        v.push(h.offset() / s);
        v
    };
    let (u, v) = (unit(x), unit(y));
    let dist = |sign: f64| u.iter().zip(&v).map(|(a, b)| (a - sign * b).abs()).fold(0.0, f64::max);
    dist(1.0).min(dist(-1.0))
}

pub const COVARIANCE_TOL: f64 = 1e-9;

pub fn verify_shift_covariance(a: &Arrangement<f64>, params: &ShiftParams) -> Result<bool> {
    Ok(shift_covariance_residual(a, params)? <= COVARIANCE_TOL)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApWitness {
    pub progression: Vec<u32>,
    pub first: Vec<u32>,
    pub second: Vec<u32>,
    pub first_volume: f64,
    pub second_volume: f64,
}

/// Number of `k`-term progressions in `1..=n`.
pub fn ap_count(n: usize, k: usize) -> usize {
    (1..n.max(1))
        .map(|l| n.saturating_sub((k - 1) * l))
        .take_while(|&c| c > 0)
        .sum()
}

/// For every `(d+2)`-term progression of labels, the simplices of its first
/// and last `d+1` terms, with volumes computed directly. Covariance under
/// the unit shift is checked first; it implies covariance under every step.
pub fn ap_equal_volume_witnesses(a: &Arrangement<f64>, params: &ShiftParams, eps_vol: f64) -> Result<Vec<ApWitness>> {
    let unit = params.with_step(1);
    let residual = shift_covariance_residual(a, &unit)?;
    if residual > COVARIANCE_TOL {
        return Err(Error::CovarianceFailure(format!("unit shift residual {residual:e}")));
    }
    let n = a.len() as u32;
    let k = a.dim() as u32 + 2;
    let mut out = Vec::new();
    for step in 1..n {
        if 1 + (k - 1) * step > n {
            break;
        }
        for start in 1..=n - (k - 1) * step {
            let progression: Vec<u32> = (0..k).map(|t| start + t * step).collect();
            let first = progression[..k as usize - 1].to_vec();
            let second = progression[1..].to_vec();
            let v1 = simplex_of_subset(a, &first)
                .map_err(|_| Error::CovarianceFailure(format!("{first:?} is degenerate")))?
                .volume;
            let v2 = simplex_of_subset(a, &second)
                .map_err(|_| Error::CovarianceFailure(format!("{second:?} is degenerate")))?
                .volume;
            if !v1.approx_eq(&v2, eps_vol) {
                return Err(Error::CovarianceFailure(format!(
                    "{first:?} and {second:?} have volumes {v1:e} and {v2:e}"
                )));
            }
            out.push(ApWitness {
                progression,
                first,
                second,
                first_volume: v1,
                second_volume: v2,
            });
        }
    }
    Ok(out)
}

/// Level `c = V d! / d^d` of the corner surface whose tangent simplices
/// have volume `V`.
pub fn corner_constant<S: Scalar>(volume: &S, d: usize) -> Result<S> {
    if !volume.is_positive() {
        return Err(Error::BadParams("corner volume must be positive".into()));
    }
    Ok(volume.clone() * S::from_i64(linalg::factorial(d) as i64) / S::from_i64((d as i64).pow(d as u32)))
}

/// `d^d |c| / d!`.
pub fn corner_volume<S: Scalar>(c: &S, d: usize) -> S {
    c.abs() * S::from_i64((d as i64).pow(d as u32)) / S::from_i64(linalg::factorial(d) as i64)
}

/// Sign vectors of the open orthants met by `prod x_i = c`.
pub fn corner_branches(d: usize, c_sign: i8) -> Vec<Vec<i8>> {
    (0u32..1 << d)
        .map(|mask| (0..d).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect::<Vec<i8>>())
        .filter(|s| s.iter().map(|&x| x as i32).product::<i32>() == c_sign as i32)
        .collect()
}

/// One branch of the affine image of `prod x_i = c`. `frame` maps world
/// coordinates to corner coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerSurface<S> {
    pub frame: AffineMap<S>,
    pub c: S,
    pub orthant_signs: Vec<i8>,
}

impl<S: Scalar> CornerSurface<S> {
    pub fn new(frame: AffineMap<S>, c: S, orthant_signs: Vec<i8>) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::BadParams("corner constant must be nonzero".into()));
        }
        if orthant_signs.len() != frame.dim() {
            return Err(Error::DimensionMismatch {
                expected: frame.dim(),
                found: orthant_signs.len(),
            });
        }
        if frame.det().is_zero() {
            return Err(Error::SingularMap);
        }
        let prod: i32 = orthant_signs.iter().map(|&s| s as i32).product();
        if orthant_signs.iter().any(|s| s.abs() != 1) || prod != c.sign() as i32 {
            return Err(Error::BadParams("orthant signs must multiply to the sign of c".into()));
        }
        Ok(Self { frame, c, orthant_signs })
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    /// The `d` hyperplanes mapped to `{x_i = 0}` by the frame.
    pub fn corner_hyperplanes(&self) -> Result<Vec<Hyperplane<S>>> {
        let back = self.frame.inverse()?;
        (0..self.dim())
            .map(|i| back.apply_hyperplane(&Hyperplane::coordinate(self.dim(), i, S::zero())))
            .collect()
    }

    /// Tangent at `p`, given in corner coordinates: `sum x_i / p_i = d`
    /// pulled back to world coordinates.
    pub fn tangent_hyperplane_at(&self, p: &Point<S>) -> Result<Hyperplane<S>> {
        let d = self.dim();
        if p.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: p.dim() });
        }
        let on_branch = p.coords.iter().zip(&self.orthant_signs).all(|(x, &s)| x.sign() == s);
        let product = p.coords.iter().fold(S::one(), |acc, x| acc * x.clone());
        if !on_branch || !product.approx_eq(&self.c, 0.0) {
            return Err(Error::PointOffSurface);
        }
        let normal = p.coords.iter().map(|x| S::one() / x.clone()).collect();
        let local = Hyperplane::new(normal, S::from_i64(d as i64))?;
        self.frame.inverse()?.apply_hyperplane(&local)
    }

    /// Volume every tangent simplex should have: `d^d |c| / (d! |det frame|)`.
    pub fn expected_volume(&self) -> S {
        corner_volume(&self.c, self.dim()) / self.frame.det().abs()
    }

    /// Volume of the simplex cut by the corner hyperplanes and the tangent at `p`.
    pub fn corner_simplex_volume(&self, p: &Point<S>) -> Result<S> {
        let mut hs = self.corner_hyperplanes()?;
        hs.push(self.tangent_hyperplane_at(p)?);
        let refs: Vec<&Hyperplane<S>> = hs.iter().collect();
        simplex_of_hyperplanes(&refs).map(|(_, v)| v).ok_or(Error::Degenerate)
    }
}

impl CornerSurface<Rational> {
    /// A rational point of the branch: `d-1` coordinates from the grid
    /// `{k/q : 1 <= k <= 12, 1 <= q <= 6}` and the last solved exactly.
    pub fn sample_point(&self, rng: &mut impl Rng) -> Point<Rational> {
        let d = self.dim();
        let mut coords: Vec<Rational> = (0..d - 1)
            .map(|i| {
                let mag = Rational::new(BigInt::from(rng.gen_range(1..=12)), BigInt::from(rng.gen_range(1..=6)));
                if self.orthant_signs[i] < 0 { -mag } else { mag }
            })
            .collect();
        let prod = coords.iter().fold(Rational::one(), |acc, x| acc * x);
        coords.push(self.c.clone() / prod);
        Point::new(coords)
    }
}

/// `n` hyperplanes with integer coefficients in `-range..=range`, redrawn
/// until the arrangement is in general position.
pub fn random_general_position(d: usize, n: usize, range: i64, rng: &mut impl Rng) -> Result<Arrangement<Rational>> {
    if n < d + 1 || range < 1 {
        return Err(Error::BadParams(format!("need n >= d+1 and a positive range, got n={n}")));
    }
    for _ in 0..10_000 {
        let hs = (0..n)
            .map(|_| {
                let normal: Vec<i64> = (0..d).map(|_| rng.gen_range(-range..=range)).collect();
                Hyperplane::from_ints(&normal, rng.gen_range(-range..=range))
            })
            .collect::<Result<Vec<_>>>();
        let Ok(hs) = hs else { continue };
        let Ok(a) = Arrangement::with_labels_from(d, hs, 0) else { continue };
        if is_general_position(&a).holds {
            return Ok(a);
        }
    }
    Err(Error::GeneralPositionFailure(10_000))
}

/// The corner hyperplanes plus one tangent per point.
pub fn gen_corner_tangents<S: Scalar>(cs: &CornerSurface<S>, points: &[Point<S>]) -> Result<Arrangement<S>> {
    let mut hs = cs.corner_hyperplanes()?;
    for p in points {
        hs.push(cs.tangent_hyperplane_at(p)?);
    }
    Arrangement::with_labels_from(cs.dim(), hs, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::corner_frame;
    use crate::geometry::simplex_of_subset;

    type Q = Rational;

    #[test]
    fn cfk_small_instances() {
        let a = gen_cfk(2, 1).unwrap();
        let expected = [
            Hyperplane::<Q>::from_ints(&[1, 0], 0).unwrap(),
            Hyperplane::from_ints(&[1, 0], 1).unwrap(),
            Hyperplane::from_ints(&[0, 1], 0).unwrap(),
            Hyperplane::from_ints(&[0, 1], 1).unwrap(),
            Hyperplane::from_ints(&[1, -1], 0).unwrap(),
        ];
        assert_eq!(a.len(), 5);
        for (h, e) in a.hyperplanes().iter().zip(&expected) {
            assert!(h.same_set(e));
        }
        assert_eq!(gen_cfk(3, 2).unwrap().len(), 18);
        assert_eq!(gen_cfk(4, 1).unwrap().len(), 14);
        assert!(gen_cfk(1, 3).is_err());
        for d in 2..=5 {
            for n in 1..=4 {
                assert_eq!(cfk_size(d, n) as i64, (d * d * n) as i64 + (d as i64 * (3 - d as i64)) / 2);
            }
        }
    }

    #[test]
    fn ngon_lines_sit_at_chord_distance() {
        let f = gen_ngon_edges(6, 24).unwrap();
        let expected = (PI / 24.0).cos();
        for h in f.arrangement.hyperplanes() {
            assert!((h.offset().abs() - expected).abs() < 1e-12);
        }
        assert!(gen_ngon_edges(3, 11).is_err());
        assert!(is_general_position(&gen_ngon_edges(3, 12).unwrap().arrangement).holds);
    }

    #[test]
    fn ngon_ap_triangles_congruent() {
        // the 4-term progression 1,3,5,7 gives congruent triangles {1,3,5} and {3,5,7}
        let f = gen_ngon_edges(7, 28).unwrap();
        let a = simplex_of_subset(&f.arrangement, &[1, 3, 5]).unwrap().volume;
        let b = simplex_of_subset(&f.arrangement, &[3, 5, 7]).unwrap().volume;
        assert!(a.approx_eq(&b, 1e-9));
    }

    #[test]
    fn rotation_family_contains_its_points() {
        let thetas = vec![0.05, 0.08];
        let f = gen_even_rotation(4, 7, thetas.clone(), 0).unwrap();
        assert!(is_general_position(&f.arrangement).holds);
        for i in 1..=7i64 {
            let h = f.arrangement.get(i as u32).unwrap();
            for p in family_points(4, i, &f.params.thetas) {
                assert!(h.residual(&Point::new(p)).abs() <= 1e-9);
            }
        }
        assert!(gen_even_rotation(3, 7, thetas, 0).is_err());
        assert!(gen_even_rotation(4, 20, vec![0.05, 0.08], 0).is_err());
    }

    #[test]
    fn helix_contains_axis_points() {
        let f = gen_odd_helix(3, 6, vec![0.3], 0).unwrap();
        assert!(is_general_position(&f.arrangement).holds);
        for i in 1..=6i64 {
            let q = Point::new(vec![0.0, 0.0, i as f64]);
            assert!(f.arrangement.get(i as u32).unwrap().residual(&q).abs() <= 1e-9);
        }
    }

    #[test]
    fn shift_maps_compose_and_preserve_volume() {
        let p = ShiftParams::new(5, vec![0.11, 0.23], 0).unwrap();
        let id = shift_map(&p).unwrap();
        assert_eq!(id, AffineMap::identity(5));
        let t2 = shift_map(&p.with_step(2)).unwrap();
        let t3 = shift_map(&p.with_step(3)).unwrap();
        let t5 = shift_map(&p.with_step(5)).unwrap();
        let composed = t2.compose(&t3).unwrap();
        for (r, s) in composed.linear().iter().zip(t5.linear()) {
            for (x, y) in r.iter().zip(s) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        assert!((t5.det() - 1.0).abs() <= 1e-12);
        assert!(ShiftParams::new(4, vec![0.1, 0.1], 1).is_err());
    }

    #[test]
    fn covariance_of_generated_families() {
        let ngon = gen_ngon_edges(5, 20).unwrap();
        assert!(verify_shift_covariance(&ngon.arrangement, &ngon.params).unwrap());
        let helix = gen_odd_helix(3, 6, vec![0.3], 0).unwrap();
        assert!(verify_shift_covariance(&helix.arrangement, &helix.params.with_step(2)).unwrap());
        assert!(verify_shift_covariance(&helix.arrangement, &helix.params.with_step(0)).unwrap());
        let wrong = ShiftParams::new(3, vec![0.31], 1).unwrap();
        assert!(!verify_shift_covariance(&helix.arrangement, &wrong).unwrap());
        assert!(shift_covariance_residual(&helix.arrangement, &ngon.params).is_err());
    }

    #[test]
    fn ap_witness_counts() {
        assert_eq!(ap_count(4, 4), 1);
        assert_eq!(ap_count(9, 4), 6 + 3);
        assert_eq!(ap_count(2, 4), 0);
        let helix = gen_odd_helix(3, 6, vec![0.3], 0).unwrap();
        let w = ap_equal_volume_witnesses(&helix.arrangement, &helix.params, 1e-9).unwrap();
        assert_eq!(w.len(), ap_count(6, 5));
        assert_eq!(w[0].first, vec![1, 2, 3, 4]);
        assert_eq!(w[0].second, vec![2, 3, 4, 5]);
    }

    #[test]
    fn corner_constants() {
        assert_eq!(corner_constant(&Q::from_i64(1), 3).unwrap(), Q::from_ratio(2, 9));
        assert_eq!(corner_constant(&Q::from_i64(2), 2).unwrap(), Q::from_i64(1));
        let c = corner_constant(&Q::from_ratio(7, 5), 4).unwrap();
        assert_eq!(corner_volume(&c, 4), Q::from_ratio(7, 5));
        assert!(corner_constant(&Q::from_i64(0), 2).is_err());
    }

    #[test]
    fn tangent_planes_at_known_points() {
        let cs = CornerSurface::new(AffineMap::<Q>::identity(3), Q::from_i64(1), vec![1, 1, 1]).unwrap();
        let p = Point::from_ints(&[1, 1, 1]);
        let h = cs.tangent_hyperplane_at(&p).unwrap();
        assert!(h.same_set(&Hyperplane::from_ints(&[1, 1, 1], 3).unwrap()));
        assert_eq!(cs.corner_simplex_volume(&p).unwrap(), Q::from_ratio(9, 2));

        let cs2 = CornerSurface::new(AffineMap::<Q>::identity(2), Q::from_i64(1), vec![1, 1]).unwrap();
        let p2 = Point::new(vec![Q::from_i64(2), Q::from_ratio(1, 2)]);
        let h2 = cs2.tangent_hyperplane_at(&p2).unwrap();
        // x/2 + 2y = 2, i.e. x + 4y = 4
        assert!(h2.same_set(&Hyperplane::from_ints(&[1, 4], 4).unwrap()));
        assert_eq!(cs2.corner_simplex_volume(&p2).unwrap(), Q::from_i64(2));
        assert_eq!(cs2.tangent_hyperplane_at(&Point::from_ints(&[2, 1])), Err(Error::PointOffSurface));
    }

    #[test]
    fn branches_per_sign() {
        for d in 2..=5 {
            assert_eq!(corner_branches(d, 1).len(), 1 << (d - 1));
            assert_eq!(corner_branches(d, -1).len(), 1 << (d - 1));
        }
    }

    #[test]
    fn framed_corner_volume() {
        let hs = [
            Hyperplane::<Q>::from_ints(&[1, 1], 0).unwrap(),
            Hyperplane::from_ints(&[1, -1], 2).unwrap(),
        ];
        let frame = corner_frame(&[&hs[0], &hs[1]]).unwrap();
        let cs = CornerSurface::new(frame, Q::from_i64(-1), vec![1, -1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = cs.sample_point(&mut rng);
            assert_eq!(cs.corner_simplex_volume(&p).unwrap(), cs.expected_volume());
        }
        for (h, e) in cs.corner_hyperplanes().unwrap().iter().zip(&hs) {
            assert!(h.same_set(e));
        }
    }
}
