//! Scalar fields the kernel runs over.
//!
//! Two fields are supported: exact rationals ([`Rational`]) for integer
//! constructions, and `f64` for trigonometric ones. Everything numeric in the
//! crate is generic over [`Scalar`], so the same enumeration code serves both.

use std::fmt::Debug;
use std::str::FromStr;

use num::{BigInt, BigRational, Integer, Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Relative pivot threshold below which a float system counts as singular.
pub const SINGULAR_REL_TOL: f64 = 1e-10;

/// Default relative tolerance for float volume equality.
pub const DEFAULT_EPS_VOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldMode {
    Rational,
    Float,
}

impl FieldMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldMode::Rational => "rational",
            FieldMode::Float => "float",
        }
    }
}

impl FromStr for FieldMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(FieldMode::Rational),
            "float" => Ok(FieldMode::Float),
            other => Err(Error::Parse(format!("unknown field mode {other:?}"))),
        }
    }
}

pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + Send + Sync + 'static {
    const MODE: FieldMode;

    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Pivot test used by elimination. `scale` is the largest row norm of the
    /// system being reduced.
    fn is_singular_pivot(&self, scale: f64) -> bool;

    /// Whether a residual counts as zero. `scale` is the magnitude of the
    /// terms that produced it.
    fn is_negligible(&self, scale: f64) -> bool;

    /// Volume equality: exact for rationals, `|a-b| <= eps*max(|a|,|b|,1)` for floats.
    fn approx_eq(&self, other: &Self, eps: f64) -> bool;

    fn to_json(&self) -> Value;

    fn from_json(v: &Value) -> Result<Self>;

    fn render(&self) -> String;

    /// Rescales `normal . x = offset` to the field's canonical scale: coprime
    /// integers for rationals, unit normal for floats. Sign is handled by the
    /// caller.
    fn rescale_hyperplane(normal: &mut [Self], offset: &mut Self);

    /// Whether a coordinate of a rescaled normal decides the sign convention.
    fn is_leading(&self) -> bool;

    fn cmp_total(&self, other: &Self) -> std::cmp::Ordering {
        self.partial_cmp(other).unwrap_or(std::cmp::Ordering::Equal)
    }

    fn sign(&self) -> i8 {
        if self.is_zero() {
            0
        } else if self.is_positive() {
            1
        } else {
            -1
        }
    }
}

impl Scalar for Rational {
    const MODE: FieldMode = FieldMode::Rational;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_singular_pivot(&self, _scale: f64) -> bool {
        self.is_zero()
    }

    fn is_negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }

    fn approx_eq(&self, other: &Self, _eps: f64) -> bool {
        self == other
    }

    fn to_json(&self) -> Value {
        Value::String(self.render())
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(Self::from_i64(i)),
                None => Err(Error::Parse(format!("rational must be a \"p/q\" string, got {n}"))),
            },
            other => Err(Error::Parse(format!("expected rational, got {other}"))),
        }
    }

    fn render(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn rescale_hyperplane(normal: &mut [Self], offset: &mut Self) {
        let mut lcm = BigInt::one();
        for x in normal.iter().chain(std::iter::once(&*offset)) {
            lcm = lcm.lcm(x.denom());
        }
        let mut gcd = BigInt::zero();
        for x in normal.iter().chain(std::iter::once(&*offset)) {
            gcd = gcd.gcd(&(x.numer() * (&lcm / x.denom())));
        }
        if gcd.is_zero() {
            return;
        }
        let factor = Rational::new(lcm, gcd);
        for x in normal.iter_mut() {
            *x = &*x * &factor;
        }
        *offset = &*offset * &factor;
    }

    fn is_leading(&self) -> bool {
        !self.is_zero()
    }
}

impl Scalar for f64 {
    const MODE: FieldMode = FieldMode::Float;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_singular_pivot(&self, scale: f64) -> bool {
        self.abs() < SINGULAR_REL_TOL * scale
    }

    fn is_negligible(&self, scale: f64) -> bool {
        self.abs() <= SINGULAR_REL_TOL * scale.max(f64::MIN_POSITIVE)
    }

    fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        (self - other).abs() <= eps * self.abs().max(other.abs()).max(1.0)
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("bad float {n}"))),
            Value::String(s) => s
                .parse::<f64>()
                .or_else(|_| parse_rational(s).map(|r| Scalar::to_f64(&r)))
                .map_err(|_| Error::Parse(format!("bad float {s:?}"))),
            other => Err(Error::Parse(format!("expected float, got {other}"))),
        }
    }

    fn render(&self) -> String {
        format!("{self:?}")
    }

    fn rescale_hyperplane(normal: &mut [Self], offset: &mut Self) {
        let norm = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
        // already unit up to rounding: leave the bits alone so reloading a
        // canonical hyperplane reproduces it exactly
        if norm == 0.0 || (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
            return;
        }
        for x in normal.iter_mut() {
            *x /= norm;
        }
        *offset /= norm;
    }

    fn is_leading(&self) -> bool {
        self.abs() > 1e-12
    }
}

/// Parses `"p/q"` or `"p"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render_round_trip() {
        let r = parse_rational("6/-4").unwrap();
        assert_eq!(r.render(), "-3/2");
        assert_eq!(parse_rational("7").unwrap().render(), "7");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn float_equality_is_relative() {
        assert!(1e6_f64.approx_eq(&(1e6 + 1e-4), 1e-9));
        assert!(!1e6_f64.approx_eq(&(1e6 + 1e-2), 1e-9));
        // absolute floor of 1 near zero
        assert!(0.0_f64.approx_eq(&1e-10, 1e-9));
    }

    #[test]
    fn json_scalars() {
        let r = Rational::from_json(&Value::String("2/3".into())).unwrap();
        assert_eq!(r, Rational::from_ratio(2, 3));
        assert_eq!(r.to_json(), Value::String("2/3".into()));
        let f = f64::from_json(&serde_json::json!(0.1)).unwrap();
        assert_eq!(f, 0.1);
    }
}
