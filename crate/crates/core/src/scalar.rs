//! Exact scalars over ℚ, ℚ(i) and GF(p), parameterized by an involution.
//!
//! A [`Scalar`] carries its field with it. Mixing scalars from different
//! fields in one arithmetic expression is a programming error and panics;
//! every matrix routine in this crate builds its scalars from the field of
//! its inputs, so that never happens through the public API.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Field {
    Rational,
    GaussianRational,
    /// GF(p) for a prime p < 2^31.
    PrimeField(u32),
}

impl Field {
    /// GF(p), checking that `p` is a prime below 2^31.
    pub fn prime(p: u32) -> Result<Field> {
        if p >= 1 << 31 || !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not a prime below 2^31")));
        }
        Ok(Field::PrimeField(p))
    }

    pub fn name(&self) -> String {
        match self {
            Field::Rational => "rational".to_string(),
            Field::GaussianRational => "gaussian-rational".to_string(),
            Field::PrimeField(p) => format!("prime:{p}"),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Field> {
        match s {
            "rational" | "q" => Ok(Field::Rational),
            "gaussian-rational" | "gaussian" | "qi" => Ok(Field::GaussianRational),
            _ => {
                let p = s
                    .strip_prefix("prime:")
                    .or_else(|| s.strip_prefix("gf"))
                    .ok_or_else(|| Error::InvalidField(s.to_string()))?;
                let p: u32 = p.parse().map_err(|_| Error::InvalidField(s.to_string()))?;
                Field::prime(p)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Involution {
    Identity,
    /// a + bi ↦ a − bi; only meaningful over ℚ(i).
    Conjugation,
}

impl FromStr for Involution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Involution> {
        match s {
            "identity" => Ok(Involution::Identity),
            "conjugate" | "conjugation" => Ok(Involution::Conjugation),
            _ => Err(Error::InvalidField(format!("unknown involution {s:?}"))),
        }
    }
}

/// The field in force together with its involution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub field: Field,
    pub involution: Involution,
}

impl FieldSpec {
    pub fn new(field: Field, involution: Involution) -> Result<FieldSpec> {
        if let Field::PrimeField(p) = field {
            Field::prime(p)?;
        }
        if involution == Involution::Conjugation && field != Field::GaussianRational {
            return Err(Error::InvalidField(format!(
                "conjugation requires the gaussian-rational field, not {field}"
            )));
        }
        Ok(FieldSpec { field, involution })
    }

    pub fn rational() -> FieldSpec {
        FieldSpec { field: Field::Rational, involution: Involution::Identity }
    }

    pub fn gaussian(involution: Involution) -> FieldSpec {
        FieldSpec { field: Field::GaussianRational, involution }
    }
}

/// A Gaussian rational `(a + b·i)/d`, kept with `d > 0` and
/// `gcd(a, b, d) = 1` so that equal values have equal fields.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gaussian {
    a: BigInt,
    b: BigInt,
    d: BigInt,
}

impl Gaussian {
    pub fn new(re: BigRational, im: BigRational) -> Gaussian {
        use num_integer::Integer;
        let d = re.denom().lcm(im.denom());
        let a = re.numer() * (&d / re.denom());
        let b = im.numer() * (&d / im.denom());
        Gaussian::reduced(a, b, d)
    }

    fn reduced(mut a: BigInt, mut b: BigInt, mut d: BigInt) -> Gaussian {
        use num_integer::Integer;
        if d.is_negative() {
            a = -a;
            b = -b;
            d = -d;
        }
        if !d.is_one() {
            let g = a.gcd(&b).gcd(&d);
            if !g.is_one() {
                a /= &g;
                b /= &g;
                d /= &g;
            }
        }
        Gaussian { a, b, d }
    }

    pub fn re(&self) -> BigRational {
        BigRational::new(self.a.clone(), self.d.clone())
    }

    pub fn im(&self) -> BigRational {
        BigRational::new(self.b.clone(), self.d.clone())
    }

    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn is_one(&self) -> bool {
        self.b.is_zero() && self.a.is_one() && self.d.is_one()
    }

    fn add(&self, o: &Gaussian) -> Gaussian {
        if self.d == o.d {
            return Gaussian::reduced(&self.a + &o.a, &self.b + &o.b, self.d.clone());
        }
        Gaussian::reduced(
            &self.a * &o.d + &o.a * &self.d,
            &self.b * &o.d + &o.b * &self.d,
            &self.d * &o.d,
        )
    }

    fn mul(&self, o: &Gaussian) -> Gaussian {
        let d = &self.d * &o.d;
        if self.b.is_zero() && o.b.is_zero() {
            return Gaussian::reduced(&self.a * &o.a, BigInt::zero(), d);
        }
        Gaussian::reduced(&self.a * &o.a - &self.b * &o.b, &self.a * &o.b + &self.b * &o.a, d)
    }

    fn neg(&self) -> Gaussian {
        Gaussian { a: -&self.a, b: -&self.b, d: self.d.clone() }
    }

    fn conj(&self) -> Gaussian {
        Gaussian { a: self.a.clone(), b: -&self.b, d: self.d.clone() }
    }

    fn inv(&self) -> Gaussian {
        let norm = &self.a * &self.a + &self.b * &self.b;
        Gaussian::reduced(&self.d * &self.a, -(&self.d * &self.b), norm)
    }
}

/// Positive rational `c` such that `c·v` has integer (Gaussian integer)
/// entries with no common integer factor; `None` over a prime field or for
/// the zero vector.
pub fn primitive_scale(v: &[Scalar]) -> Option<BigRational> {
    use num_integer::Integer;
    // (numerators, common denominator) of each nonzero entry
    let mut parts: Vec<(Vec<&BigInt>, &BigInt)> = Vec::new();
    for x in v {
        match x {
            Scalar::Rational(q) if !q.is_zero() => parts.push((vec![q.numer()], q.denom())),
            Scalar::Gaussian(g) if !g.is_zero() => parts.push((vec![&g.a, &g.b], &g.d)),
            Scalar::Modular { .. } => return None,
            _ => {}
        }
    }
    if parts.is_empty() {
        return None;
    }
    let den = parts.iter().fold(BigInt::one(), |l, (_, d)| l.lcm(d));
    let num = parts.iter().fold(BigInt::zero(), |g, (nums, d)| {
        let factor = &den / *d;
        nums.iter().fold(g, |g, n| g.gcd(&(*n * &factor)))
    });
    Some(BigRational::new(den, num))
}

/// An exact field element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Gaussian(Gaussian),
    /// Residue in `[0, modulus)`.
    Modular { value: u32, modulus: u32 },
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let p = p as u64;
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Scalar {
    pub fn zero(field: Field) -> Scalar {
        Scalar::from_i64(field, 0)
    }

    pub fn one(field: Field) -> Scalar {
        Scalar::from_i64(field, 1)
    }

    pub fn from_i64(field: Field, n: i64) -> Scalar {
        match field {
            Field::Rational => Scalar::Rational(rat(n)),
            Field::GaussianRational => Scalar::Gaussian(Gaussian { a: BigInt::from(n), b: BigInt::zero(), d: BigInt::one() }),
            Field::PrimeField(p) => Scalar::Modular {
                value: n.rem_euclid(p as i64) as u32,
                modulus: p,
            },
        }
    }

    /// `num/den` mapped into `field`. Panics if `den` is zero.
    pub fn from_ratio(field: Field, num: i64, den: i64) -> Scalar {
        assert!(den != 0, "zero denominator");
        match field {
            Field::PrimeField(_) => {
                let n = Scalar::from_i64(field, num);
                let d = Scalar::from_i64(field, den);
                &n * &d.inv().expect("denominator divisible by the characteristic")
            }
            _ => Scalar::from_rational(field, BigRational::new(BigInt::from(num), BigInt::from(den))),
        }
    }

    /// Embeds a rational into ℚ or ℚ(i). Panics for prime fields.
    pub fn from_rational(field: Field, q: BigRational) -> Scalar {
        match field {
            Field::Rational => Scalar::Rational(q),
            Field::GaussianRational => Scalar::gaussian(q, rat(0)),
            Field::PrimeField(_) => panic!("rationals do not embed in a prime field"),
        }
    }

    pub fn gaussian(re: BigRational, im: BigRational) -> Scalar {
        Scalar::Gaussian(Gaussian::new(re, im))
    }

    /// `re + im·i` with integer parts.
    pub fn gaussian_int(re: i64, im: i64) -> Scalar {
        Scalar::Gaussian(Gaussian { a: BigInt::from(re), b: BigInt::from(im), d: BigInt::one() })
    }

    /// The imaginary unit of ℚ(i).
    pub fn i() -> Scalar {
        Scalar::gaussian_int(0, 1)
    }

    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rational,
            Scalar::Gaussian(_) => Field::GaussianRational,
            Scalar::Modular { modulus, .. } => Field::PrimeField(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Gaussian(g) => g.is_zero(),
            Scalar::Modular { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Gaussian(g) => g.is_one(),
            Scalar::Modular { value, .. } => *value == 1,
        }
    }

    /// The image under `involution`.
    pub fn conjugate(&self, involution: Involution) -> Scalar {
        match (self, involution) {
            (Scalar::Gaussian(g), Involution::Conjugation) => Scalar::Gaussian(g.conj()),
            _ => self.clone(),
        }
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rational(q) => Scalar::Rational(q.recip()),
            Scalar::Gaussian(g) => Scalar::Gaussian(g.inv()),
            Scalar::Modular { value, modulus } => Scalar::Modular {
                value: pow_mod(*value as u64, *modulus as u64 - 2, *modulus as u64) as u32,
                modulus: *modulus,
            },
        })
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(self * &other.inv()?)
    }

    /// Parses the text grammar used by the matrix file format.
    pub fn parse(field: Field, s: &str) -> Result<Scalar> {
        parse_scalar(field, s).map_err(|msg| Error::Parse { line: 1, col: 1, msg })
    }

    fn mismatch(&self, other: &Scalar) -> ! {
        panic!("field mismatch in scalar arithmetic: {} vs {}", self.field(), other.field())
    }

    fn add_ref(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Gaussian(a), Scalar::Gaussian(b)) => Scalar::Gaussian(a.add(b)),
            (Scalar::Modular { value: a, modulus: p }, Scalar::Modular { value: b, modulus: q })
                if p == q =>
            {
                Scalar::Modular { value: ((*a as u64 + *b as u64) % *p as u64) as u32, modulus: *p }
            }
            _ => self.mismatch(other),
        }
    }

    fn mul_ref(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Gaussian(a), Scalar::Gaussian(b)) => Scalar::Gaussian(a.mul(b)),
            (Scalar::Modular { value: a, modulus: p }, Scalar::Modular { value: b, modulus: q })
                if p == q =>
            {
                Scalar::Modular { value: ((*a as u64 * *b as u64) % *p as u64) as u32, modulus: *p }
            }
            _ => self.mismatch(other),
        }
    }

    fn neg_ref(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Gaussian(a) => Scalar::Gaussian(a.neg()),
            Scalar::Modular { value, modulus } => Scalar::Modular {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
        }
    }

    /// Real and imaginary parts as floats (prime-field residues map to themselves).
    pub fn to_f64_pair(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        match self {
            Scalar::Rational(q) => (q.to_f64().unwrap_or(f64::NAN), 0.0),
            Scalar::Gaussian(g) => (
                g.re().to_f64().unwrap_or(f64::NAN),
                g.im().to_f64().unwrap_or(f64::NAN),
            ),
            Scalar::Modular { value, .. } => (*value as f64, 0.0),
        }
    }
}

fn render_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => f.write_str(&render_rational(q)),
            Scalar::Gaussian(g) => {
                let sign = if g.b.is_negative() { '-' } else { '+' };
                write!(f, "{}{}{}*i", render_rational(&g.re()), sign, render_rational(&g.im().abs()))
            }
            Scalar::Modular { value, .. } => write!(f, "{value}"),
        }
    }
}

fn parse_rational(s: &str) -> std::result::Result<BigRational, String> {
    let bad = || format!("malformed rational {s:?}");
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let digits_ok = |t: &str, signed: bool| {
        let t = if signed { t.strip_prefix(['-', '+']).unwrap_or(t) } else { t };
        !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
    };
    if !digits_ok(num, true) {
        return Err(bad());
    }
    let n: BigInt = num.trim_start_matches('+').parse().map_err(|_| bad())?;
    let d: BigInt = match den {
        Some(d) if digits_ok(d, false) => d.parse().map_err(|_| bad())?,
        Some(_) => return Err(bad()),
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(n, d))
}

// Coefficient of `i`: "", "+" and "-" stand for ±1.
fn parse_imag_coefficient(s: &str) -> std::result::Result<BigRational, String> {
    match s {
        "" | "+" => Ok(rat(1)),
        "-" => Ok(rat(-1)),
        _ => parse_rational(s),
    }
}

fn parse_gaussian(s: &str) -> std::result::Result<Scalar, String> {
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Scalar::gaussian(parse_rational(s)?, rat(0)));
    };
    let body = body.strip_suffix('*').unwrap_or(body);
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(_, c)| c == '+' || c == '-')
        .map(|(k, _)| k)
        .last();
    match split {
        Some(k) => {
            let re = parse_rational(&body[..k])?;
            let im = parse_imag_coefficient(&body[k..])?;
            Ok(Scalar::gaussian(re, im))
        }
        None => Ok(Scalar::gaussian(rat(0), parse_imag_coefficient(body)?)),
    }
}

fn parse_scalar(field: Field, s: &str) -> std::result::Result<Scalar, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty scalar".to_string());
    }
    match field {
        Field::Rational => parse_rational(s).map(Scalar::Rational),
        Field::GaussianRational => parse_gaussian(s),
        Field::PrimeField(p) => {
            let v: BigInt = s
                .trim_start_matches('+')
                .parse()
                .map_err(|_| format!("malformed residue {s:?}"))?;
            let r = ((v % BigInt::from(p)) + BigInt::from(p)) % BigInt::from(p);
            let value = u32::try_from(&r).map_err(|_| format!("residue out of range {s:?}"))?;
            Ok(Scalar::Modular { value, modulus: p })
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                let f: fn(&Scalar, &Scalar) -> Scalar = $body;
                f(self, rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.add_ref(b));
forward_binop!(Sub, sub, |a, b| a.add_ref(&b.neg_ref()));
forward_binop!(Mul, mul, |a, b| a.mul_ref(b));

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}
