use crate::error::{Error, Result};
use crate::rational::{rationalize, C64};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

/// Exact scalars: Gaussian rationals or a prime field.
pub trait Field:
    Clone
    + PartialEq
    + Eq
    + Hash
    + Ord
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;
    /// Complex conjugation; the identity on prime fields.
    fn conj(&self) -> Self;
    fn from_i64(n: i64) -> Self;
    /// Every element, for finite fields.
    fn elements() -> Option<Vec<Self>>;
    fn parse(s: &str) -> Result<Self>;
    fn name() -> String;
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    pub fn new(v: i64) -> Self {
        Fp(v.rem_euclid(P as i64) as u64)
    }

    pub fn value(&self) -> u64 {
        self.0
    }
}

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Fp((self.0 + o.0) % P)
    }
}

impl<const P: u64> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Fp((self.0 + P - o.0) % P)
    }
}

impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Fp(self.0 * o.0 % P)
    }
}

impl<const P: u64> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp((P - self.0) % P)
    }
}

impl<const P: u64> Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.0, P)
    }
}

impl<const P: u64> FromStr for Fp<P> {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (v, m) = match s.split_once("mod") {
            Some((v, m)) => (v.trim(), Some(m.trim())),
            None => (s, None),
        };
        if let Some(m) = m {
            let m: u64 = m.parse().map_err(|_| Error::Parse(format!("bad modulus in {s:?}")))?;
            if m != P {
                return Err(Error::Parse(format!("{s:?} is not an element of F_{P}")));
            }
        }
        let v: i64 = v.parse().map_err(|_| Error::Parse(format!("bad field element {s:?}")))?;
        Ok(Fp::new(v))
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

impl<const P: u64> Field for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1 % P)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn inv(&self) -> Option<Self> {
        (self.0 != 0).then(|| Fp(pow_mod(self.0, P - 2, P)))
    }
    fn conj(&self) -> Self {
        *self
    }
    fn from_i64(n: i64) -> Self {
        Fp::new(n)
    }
    fn elements() -> Option<Vec<Self>> {
        Some((0..P).map(Fp).collect())
    }
    fn parse(s: &str) -> Result<Self> {
        s.parse()
    }
    fn name() -> String {
        format!("F{P}")
    }
}

/// `re + im i` with exact rational parts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussRat::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    pub fn from_ratios(re: (i64, i64), im: (i64, i64)) -> Self {
        GaussRat::new(
            BigRational::new(re.0.into(), re.1.into()),
            BigRational::new(im.0.into(), im.1.into()),
        )
    }

    pub fn i() -> Self {
        GaussRat::from_ints(0, 1)
    }

    /// Nearest Gaussian rational with denominators up to 10^6.
    pub fn from_c64(z: C64) -> Result<Self> {
        let part = |x: f64| -> Result<BigRational> {
            let r = rationalize(x, 1_000_000, 1e-12)
                .ok_or_else(|| Error::NotRepresentable(format!("{x} has no small rational form")))?;
            Ok(BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom())))
        };
        Ok(GaussRat::new(part(z.re)?, part(z.im)?))
    }

    pub fn to_c64(&self) -> C64 {
        let f = |r: &BigRational| -> f64 {
            use num_traits::ToPrimitive;
            r.to_f64().unwrap_or(f64::NAN)
        };
        C64::new(f(&self.re), f(&self.im))
    }
}

impl Add for GaussRat {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        GaussRat::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for GaussRat {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        GaussRat::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for GaussRat {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        GaussRat::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for GaussRat {
    type Output = Self;
    fn neg(self) -> Self {
        GaussRat::new(-self.re, -self.im)
    }
}

impl Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) if self.im.is_negative() => write!(f, "{}-{}i", self.re, -&self.im),
            (false, false) => write!(f, "{}+{}i", self.re, self.im),
        }
    }
}

fn parse_big(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl FromStr for GaussRat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        let Some(body) = t.strip_suffix('i') else {
            return Ok(GaussRat::new(parse_big(&t)?, BigRational::zero()));
        };
        let split = body.char_indices().filter(|&(i, c)| i > 0 && (c == '+' || c == '-')).map(|(i, _)| i).next_back();
        let (re, im) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("", body),
        };
        let im = match im {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            s => parse_big(s.strip_prefix('+').unwrap_or(s))?,
        };
        let re = if re.is_empty() { BigRational::zero() } else { parse_big(re)? };
        Ok(GaussRat::new(re, im))
    }
}

impl Field for GaussRat {
    fn zero() -> Self {
        GaussRat::from_ints(0, 0)
    }
    fn one() -> Self {
        GaussRat::from_ints(1, 0)
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn inv(&self) -> Option<Self> {
        let d = &self.re * &self.re + &self.im * &self.im;
        (!d.is_zero()).then(|| GaussRat::new(&self.re / &d, -(&self.im / &d)))
    }
    fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }
    fn from_i64(n: i64) -> Self {
        GaussRat::from_ints(n, 0)
    }
    fn elements() -> Option<Vec<Self>> {
        None
    }
    fn parse(s: &str) -> Result<Self> {
        s.parse()
    }
    fn name() -> String {
        "Q(i)".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn prime_field_arithmetic() {
        let a = Fp::<5>::new(3);
        assert_eq!((a * a.inv().unwrap()).value(), 1);
        assert_eq!((-a).value(), 2);
        assert_eq!(Fp::<5>::new(-1).value(), 4);
        assert_eq!("2 mod 5".parse::<Fp<5>>().unwrap(), Fp::new(2));
        assert!("2 mod 7".parse::<Fp<5>>().is_err());
        assert_eq!(Fp::<3>::elements().unwrap().len(), 3);
        assert_eq!(a.to_string(), "3 mod 5");
    }

    #[test]
    fn gaussian_parse_and_print() {
        for s in ["3/4+1/2i", "1/2i", "-3", "2-i", "i", "-i", "0"] {
            let g: GaussRat = s.parse().unwrap();
            let back: GaussRat = g.to_string().parse().unwrap();
            assert_eq!(g, back, "{s}");
        }
        assert_eq!("3/4+1/2i".parse::<GaussRat>().unwrap(), GaussRat::from_ratios((3, 4), (1, 2)));
        assert_eq!("2-i".parse::<GaussRat>().unwrap().to_string(), "2-1i");
        assert!("1/0".parse::<GaussRat>().is_err());
        assert!("x".parse::<GaussRat>().is_err());
    }

    #[test]
    fn from_float() {
        let g = GaussRat::from_c64(C64::new(0.5, -0.25)).unwrap();
        assert_eq!(g, GaussRat::from_ratios((1, 2), (-1, 4)));
    }

    proptest! {
        #[test]
        fn gaussian_inverse(a in -20i64..20, b in -20i64..20, d in 1i64..9) {
            let g = GaussRat::from_ratios((a, d), (b, 1));
            prop_assume!(!g.is_zero());
            prop_assert_eq!(g.clone() * g.inv().unwrap(), GaussRat::one());
            prop_assert_eq!((g.clone() * g.conj()).im, BigRational::zero());
        }

        #[test]
        fn f7_distributes(a in 0i64..7, b in 0i64..7, c in 0i64..7) {
            let (a, b, c) = (Fp::<7>::new(a), Fp::<7>::new(b), Fp::<7>::new(c));
            prop_assert_eq!(a * (b + c), a * b + a * c);
        }
    }
}
