//! Exact points of `R/Z` of the form `q + Σ c_r √r`, with `r` ranging over
//! distinct squarefree integers `> 1`. Square roots of distinct squarefree
//! integers are linearly independent over `Q`, so two points with different
//! symbolic forms are different reals and enclosure refinement separates them.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("PrecisionExhausted: enclosures at {bits} bits do not separate the points")]
pub struct PrecisionExhausted {
    pub bits: u32,
}

pub const DEFAULT_BUDGET_BITS: u32 = 256;
const START_BITS: u32 = 32;

pub fn is_squarefree(r: u64) -> bool {
    if r < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= r {
        if r.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `[⌊√r·2^b⌋, ⌊√r·2^b⌋ + 1] / 2^b`.
fn sqrt_enclosure(r: u64, bits: u32) -> (BigRational, BigRational) {
    let scale = BigInt::one() << bits;
    let s = (BigInt::from(r) * &scale * &scale).sqrt();
    (BigRational::new(s.clone(), scale.clone()), BigRational::new(s + 1, scale))
}

/// A real number `q + Σ c_r √r` (not reduced mod 1).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Real {
    pub q: BigRational,
    pub coeffs: BTreeMap<u64, BigRational>,
}

impl Real {
    pub fn rational(q: BigRational) -> Self {
        Real { q, coeffs: BTreeMap::new() }
    }

    pub fn zero() -> Self {
        Real::rational(BigRational::zero())
    }

    /// `c·√r`.
    pub fn sqrt(r: u64, c: BigRational) -> Self {
        assert!(is_squarefree(r), "symbol radicands must be squarefree");
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(r, c);
        }
        Real { q: BigRational::zero(), coeffs }
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Real) -> Real {
        let mut coeffs = self.coeffs.clone();
        for (r, c) in &other.coeffs {
            let v = coeffs.entry(*r).or_insert_with(BigRational::zero);
            *v += c;
            if v.is_zero() {
                coeffs.remove(r);
            }
        }
        Real { q: &self.q + &other.q, coeffs }
    }

    pub fn neg(&self) -> Real {
        self.scale(&-BigRational::one())
    }

    pub fn sub(&self, other: &Real) -> Real {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigRational) -> Real {
        if k.is_zero() {
            return Real::zero();
        }
        Real { q: &self.q * k, coeffs: self.coeffs.iter().map(|(r, c)| (*r, c * k)).collect() }
    }

    pub fn enclosure(&self, bits: u32) -> (BigRational, BigRational) {
        let (mut lo, mut hi) = (self.q.clone(), self.q.clone());
        for (r, c) in &self.coeffs {
            let (a, b) = sqrt_enclosure(*r, bits);
            if c.is_positive() {
                lo += c * a;
                hi += c * b;
            } else {
                lo += c * b;
                hi += c * a;
            }
        }
        (lo, hi)
    }

    pub fn signum(&self, budget: u32) -> Result<i8, PrecisionExhausted> {
        if self.is_rational() {
            return Ok(match self.q.cmp(&BigRational::zero()) {
                Ordering::Less => -1,
                Ordering::Equal => 0,
                Ordering::Greater => 1,
            });
        }
        let mut bits = START_BITS;
        loop {
            let (lo, hi) = self.enclosure(bits);
            if lo.is_positive() {
                return Ok(1);
            }
            if hi.is_negative() {
                return Ok(-1);
            }
            if bits >= budget {
                return Err(PrecisionExhausted { bits });
            }
            bits = (bits * 2).min(budget);
        }
    }

    pub fn floor(&self, budget: u32) -> Result<BigInt, PrecisionExhausted> {
        if self.is_rational() {
            return Ok(self.q.floor().to_integer());
        }
        let mut bits = START_BITS;
        loop {
            let (lo, hi) = self.enclosure(bits);
            let (fl, fh) = (lo.floor().to_integer(), hi.floor().to_integer());
            if fl == fh {
                return Ok(fl);
            }
            if bits >= budget {
                return Err(PrecisionExhausted { bits });
            }
            bits = (bits * 2).min(budget);
        }
    }

    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.enclosure(64);
        ((lo + hi) / rat(2, 1)).to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.q.is_zero() || self.coeffs.is_empty() {
            write!(f, "{}", self.q)?;
            first = false;
        }
        for (r, c) in &self.coeffs {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag.is_one() {
                write!(f, "sqrt({r})")?;
            } else {
                write!(f, "{mag}*sqrt({r})")?;
            }
            first = false;
        }
        Ok(())
    }
}

/// A point of `S^1 = R/Z`, stored with its rational part reduced to `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CirclePoint(Real);

impl CirclePoint {
    pub fn new(x: Real) -> Self {
        let q = &x.q - x.q.floor();
        CirclePoint(Real { q, coeffs: x.coeffs })
    }

    pub fn zero() -> Self {
        CirclePoint(Real::zero())
    }

    pub fn rational(n: i64, d: i64) -> Self {
        CirclePoint::new(Real::rational(rat(n, d)))
    }

    pub fn real(&self) -> &Real {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_rational() && self.0.q.is_zero()
    }

    pub fn add(&self, other: &CirclePoint) -> CirclePoint {
        CirclePoint::new(self.0.add(&other.0))
    }

    pub fn neg(&self) -> CirclePoint {
        CirclePoint::new(self.0.neg())
    }

    pub fn sub(&self, other: &CirclePoint) -> CirclePoint {
        CirclePoint::new(self.0.sub(&other.0))
    }

    pub fn times(&self, k: i64) -> CirclePoint {
        CirclePoint::new(self.0.scale(&rat(k, 1)))
    }

    /// The representative in `[0, 1)`.
    pub fn frac(&self, budget: u32) -> Result<Real, PrecisionExhausted> {
        let fl = self.0.floor(budget)?;
        Ok(self.0.sub(&Real::rational(BigRational::from_integer(fl))))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().rem_euclid(1.0)
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Compare representatives in `[0, 1)`.
pub fn frac_cmp(a: &CirclePoint, b: &CirclePoint, budget: u32) -> Result<Ordering, PrecisionExhausted> {
    if a == b {
        return Ok(Ordering::Equal);
    }
    let d = a.frac(budget)?.sub(&b.frac(budget)?);
    Ok(match d.signum(budget)? {
        -1 => Ordering::Less,
        0 => Ordering::Equal,
        _ => Ordering::Greater,
    })
}

/// The clockwise circular order of three points.
pub fn ord_with(x: &CirclePoint, y: &CirclePoint, z: &CirclePoint, budget: u32) -> Result<i8, PrecisionExhausted> {
    if x == y || y == z || x == z {
        return Ok(0);
    }
    let (d1, d2) = (y.sub(x), z.sub(x));
    Ok(match frac_cmp(&d1, &d2, budget)? {
        Ordering::Less => 1,
        Ordering::Greater => -1,
        Ordering::Equal => 0,
    })
}

pub fn ord(x: &CirclePoint, y: &CirclePoint, z: &CirclePoint) -> Result<i8, PrecisionExhausted> {
    ord_with(x, y, z, DEFAULT_BUDGET_BITS)
}

/// Parse `q`, `q + c*name`, `c*name - name + …` against named symbols.
pub fn parse_real(src: &str, symbols: &BTreeMap<String, u64>) -> Result<Real, String> {
    let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty expression".into());
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        if (ch == '+' || ch == '-') && i > start {
            terms.push(&s[start..i]);
            start = i;
        }
    }
    terms.push(&s[start..]);
    let mut out = Real::zero();
    for t in terms {
        let (neg, body) = match t.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (coef, sym) = match body.split_once('*') {
            Some((c, n)) => (parse_rational(c)?, Some(n)),
            None if body.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) => (BigRational::one(), Some(body)),
            None => (parse_rational(body)?, None),
        };
        let coef = if neg { -coef } else { coef };
        let term = match sym {
            None => Real::rational(coef),
            Some(name) => {
                let r = symbols.get(name).ok_or_else(|| format!("unknown symbol `{name}`"))?;
                Real::sqrt(*r, coef)
            }
        };
        out = out.add(&term);
    }
    Ok(out)
}

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let bad = || format!("bad rational `{s}`");
    match s.split_once('/') {
        Some((n, d)) => {
            let (n, d): (BigInt, BigInt) = (n.parse().map_err(|_| bad())?, d.parse().map_err(|_| bad())?);
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// `(p-part, rest)` of a rational point, so that `x = x_p + x_rest mod 1`
/// with the denominator of `x_p` a power of `p` and that of `x_rest` prime to `p`.
pub fn p_component(x: &BigRational, p: u64) -> (BigRational, BigRational) {
    let p = BigInt::from(p);
    let mut pe = BigInt::one();
    let mut rest = x.denom().clone();
    while rest.is_multiple_of(&p) {
        rest /= &p;
        pe *= &p;
    }
    // x = a/(pe·rest) = u/pe + v/rest with u·rest + v·pe = a.
    let a = x.numer();
    let g = rest.extended_gcd(&pe);
    let u = (a * &g.x).mod_floor(&pe);
    let xp = BigRational::new(u, pe);
    let xr = x - &xp;
    (xp, xr)
}
