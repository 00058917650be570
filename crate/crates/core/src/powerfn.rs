//! Shifted power sums `sum c (x - a)_+^beta` on [0,1] with exact shifts and exponents.

use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, to_f64, Q, C64};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};
use std::collections::BTreeMap;

/// Relative magnitude below which combined coefficients are dropped.
pub const DROP_TOL: f64 = 1e-12;
/// Relative tolerance for "exact" equality of coefficient data.
pub const EQ_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerTerm {
    pub coeff: C64,
    pub shift: Q,
    pub exponent: Q,
}

impl PowerTerm {
    pub fn new(coeff: C64, shift: Q, exponent: Q) -> Self {
        PowerTerm { coeff, shift, exponent }
    }
}

/// Normalized shifted power sum. Terms are sorted by (shift, exponent) and unique.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "PowerFnRepr", into = "PowerFnRepr")]
pub struct PowerFn {
    terms: Vec<PowerTerm>,
}

/// Derivatives `f^(i)(0)` for `i < k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub values: Vec<C64>,
}

impl Jet {
    pub fn order(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.norm() == 0.0)
    }
}

/// Verdict of [`sobolev_membership`]; `reason` names the first offending term.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub member: bool,
    pub reason: Option<String>,
}

pub fn gamma_ratio(a: f64, b: f64) -> f64 {
    if a < 170.0 && b < 170.0 {
        gamma(a) / gamma(b)
    } else {
        (ln_gamma(a) - ln_gamma(b)).exp()
    }
}

pub fn beta_fn(x: f64, y: f64) -> f64 {
    if x + y < 170.0 {
        gamma(x) * gamma(y) / gamma(x + y)
    } else {
        (ln_gamma(x) + ln_gamma(y) - ln_gamma(x + y)).exp()
    }
}

fn check_term(t: &PowerTerm) -> Result<()> {
    if t.shift.is_negative() || t.shift > Q::one() {
        return Err(Error::Domain(format!("shift {} outside [0,1]", t.shift)));
    }
    if t.exponent.is_negative() {
        return Err(Error::Domain(format!("negative exponent {}", t.exponent)));
    }
    if !t.coeff.re.is_finite() || !t.coeff.im.is_finite() {
        return Err(Error::Domain("non-finite coefficient".into()));
    }
    Ok(())
}

/// Combines like terms, sorts, and drops negligible coefficients and terms living at shift 1.
pub fn normalize(terms: Vec<PowerTerm>) -> Result<PowerFn> {
    let mut scale = 0.0f64;
    let mut acc: BTreeMap<(Q, Q), C64> = BTreeMap::new();
    for t in terms {
        check_term(&t)?;
        scale = scale.max(t.coeff.norm());
        *acc.entry((t.shift, t.exponent)).or_insert(C64::zero()) += t.coeff;
    }
    let cut = DROP_TOL * scale;
    let terms = acc
        .into_iter()
        .filter(|((s, _), c)| *s < Q::one() && c.norm() > cut && c.norm() != 0.0)
        .map(|((shift, exponent), coeff)| PowerTerm { coeff, shift, exponent })
        .collect();
    Ok(PowerFn { terms })
}

impl PowerFn {
    pub fn zero() -> Self {
        PowerFn { terms: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(c, Q::zero())
    }

    /// `c x^exponent`.
    pub fn monomial(c: C64, exponent: Q) -> Self {
        normalize(vec![PowerTerm::new(c, Q::zero(), exponent)]).expect("valid monomial")
    }

    /// `c x^d / d!`, the Taylor basis element.
    pub fn taylor(c: C64, d: u32) -> Self {
        let fact: f64 = (1..=d).map(|i| i as f64).product();
        Self::monomial(c / fact, Q::from_integer(d as i64))
    }

    pub fn term(c: C64, shift: Q, exponent: Q) -> Result<Self> {
        normalize(vec![PowerTerm::new(c, shift, exponent)])
    }

    pub fn from_terms(terms: Vec<PowerTerm>) -> Result<Self> {
        normalize(terms)
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: C64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| PowerTerm::new(t.coeff * c, t.shift, t.exponent))
            .collect();
        normalize(terms).expect("scaling keeps the domain")
    }

    pub fn add(&self, other: &PowerFn) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        normalize(terms).expect("sum keeps the domain")
    }

    pub fn sub(&self, other: &PowerFn) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Sum of coefficient magnitudes.
    pub fn l1_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).fold(0.0, f64::max)
    }

    /// Same (shift, exponent) data and coefficients within `rel` relative.
    pub fn approx_eq(&self, other: &PowerFn, rel: f64) -> bool {
        self.terms.len() == other.terms.len()
            && self.terms.iter().zip(&other.terms).all(|(a, b)| {
                a.shift == b.shift
                    && a.exponent == b.exponent
                    && (a.coeff - b.coeff).norm() <= rel * a.coeff.norm().max(b.coeff.norm())
            })
    }

    pub fn max_exponent(&self) -> Option<Q> {
        self.terms.iter().map(|t| t.exponent).max()
    }
}

pub fn linear_combine(coeffs: &[C64], fns: &[PowerFn]) -> Result<PowerFn> {
    if coeffs.len() != fns.len() {
        return Err(Error::LengthMismatch { expected: coeffs.len(), got: fns.len() });
    }
    let terms = coeffs
        .iter()
        .zip(fns)
        .flat_map(|(c, f)| f.terms.iter().map(move |t| PowerTerm::new(t.coeff * c, t.shift, t.exponent)))
        .collect();
    normalize(terms)
}

/// `(f*g)(x) = int_0^x f(x-t) g(t) dt`.
pub fn convolve(f: &PowerFn, g: &PowerFn) -> PowerFn {
    let mut out = Vec::with_capacity(f.terms.len() * g.terms.len());
    for a in &f.terms {
        for b in &g.terms {
            let shift = a.shift + b.shift;
            if shift >= Q::one() {
                continue;
            }
            let (b1, b2) = (to_f64(&a.exponent), to_f64(&b.exponent));
            let c = a.coeff * b.coeff * beta_fn(b1 + 1.0, b2 + 1.0);
            out.push(PowerTerm::new(c, shift, a.exponent + b.exponent + Q::one()));
        }
    }
    normalize(out).expect("convolution stays in the domain")
}

/// Riemann-Liouville integral of order `alpha`.
pub fn fractional_integrate(alpha: Q, f: &PowerFn) -> Result<PowerFn> {
    if alpha <= Q::zero() {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let al = to_f64(&alpha);
    let terms = f
        .terms
        .iter()
        .map(|t| {
            let b = to_f64(&t.exponent);
            PowerTerm::new(t.coeff * gamma_ratio(b + 1.0, b + al + 1.0), t.shift, t.exponent + alpha)
        })
        .collect();
    normalize(terms)
}

pub fn differentiate(f: &PowerFn) -> Result<PowerFn> {
    let mut out = Vec::with_capacity(f.terms.len());
    for t in &f.terms {
        if t.exponent.is_zero() {
            if t.shift.is_zero() {
                continue;
            }
            return Err(Error::NotRepresentable(format!("jump at {} has no derivative in the class", t.shift)));
        }
        if t.exponent < Q::one() {
            return Err(Error::NotRepresentable(format!(
                "derivative of exponent {} leaves the non-negative exponent class",
                t.exponent
            )));
        }
        out.push(PowerTerm::new(t.coeff * to_f64(&t.exponent), t.shift, t.exponent - Q::one()));
    }
    normalize(out)
}

pub fn differentiate_n(f: &PowerFn, n: usize) -> Result<PowerFn> {
    let mut g = f.clone();
    for _ in 0..n {
        g = differentiate(&g)?;
    }
    Ok(g)
}

pub fn jet(f: &PowerFn, k: usize) -> Result<Jet> {
    let mut values = vec![C64::zero(); k];
    let km1 = Q::from_integer(k as i64 - 1);
    for t in f.terms.iter().filter(|t| t.shift.is_zero()) {
        if t.exponent.is_integer() {
            let i = t.exponent.to_integer() as usize;
            if i < k {
                let fact: f64 = (1..=i).map(|j| j as f64).product();
                values[i] = t.coeff * fact;
            }
        } else if t.exponent < km1 {
            return Err(Error::JetUndefined(format!(
                "exponent {} has no derivative of order {} at 0",
                t.exponent,
                k - 1
            )));
        }
    }
    Ok(Jet { values })
}

/// Least shift of a nonzero term; 1 for the zero function.
pub fn support_start(f: &PowerFn) -> Q {
    f.terms.iter().map(|t| t.shift).min().unwrap_or_else(Q::one)
}

/// `f(ax)` for `a <= 1`, `f(ax - a + 1)` (zero below `1 - 1/a`) for `a > 1`.
pub fn compose_la(a: Q, f: &PowerFn) -> Result<PowerFn> {
    if a <= Q::zero() {
        return Err(Error::Domain(format!("L_a needs a > 0, got {a}")));
    }
    let af = to_f64(&a);
    let mut out = Vec::with_capacity(f.terms.len());
    for t in &f.terms {
        let shift = if a <= Q::one() { t.shift / a } else { (t.shift + a - Q::one()) / a };
        if shift >= Q::one() {
            continue;
        }
        out.push(PowerTerm::new(t.coeff * af.powf(to_f64(&t.exponent)), shift, t.exponent));
    }
    normalize(out)
}

/// `f(sx)` extended past `x = 1/s` by the same formula; only its germ at 0 is meaningful when `s > 1`.
pub fn dilate(s: Q, f: &PowerFn) -> Result<PowerFn> {
    if s <= Q::zero() {
        return Err(Error::Domain(format!("dilation needs s > 0, got {s}")));
    }
    let sf = to_f64(&s);
    let mut out = Vec::with_capacity(f.terms.len());
    for t in &f.terms {
        let shift = t.shift / s;
        if shift >= Q::one() {
            continue;
        }
        out.push(PowerTerm::new(t.coeff * sf.powf(to_f64(&t.exponent)), shift, t.exponent));
    }
    normalize(out)
}

fn term_value(t: &PowerTerm, dx: f64, above: bool) -> C64 {
    if t.shift.is_zero() {
        if t.exponent.is_zero() {
            return t.coeff;
        }
        return t.coeff * dx.max(0.0).powf(to_f64(&t.exponent));
    }
    if !above {
        return C64::zero();
    }
    if t.exponent.is_zero() {
        t.coeff
    } else {
        t.coeff * dx.powf(to_f64(&t.exponent))
    }
}

/// Pointwise value; shifted Heavisides are 0 at their jump, shift-0 terms are plain powers.
pub fn evaluate(f: &PowerFn, x: Q) -> C64 {
    f.terms
        .iter()
        .map(|t| term_value(t, to_f64(&(x - t.shift)), x > t.shift))
        .sum()
}

pub fn evaluate_f64(f: &PowerFn, x: f64) -> C64 {
    f.terms
        .iter()
        .map(|t| {
            let s = to_f64(&t.shift);
            term_value(t, x - s, x > s)
        })
        .sum()
}

pub fn sobolev_membership(f: &PowerFn, k: usize, p: f64) -> Membership {
    if k == 0 {
        return Membership { member: true, reason: None };
    }
    let kf = k as f64;
    for t in &f.terms {
        let b = to_f64(&t.exponent);
        let fine_power = b > kf - 1.0 / p;
        let ok = if t.shift.is_zero() {
            t.exponent.is_integer() || fine_power
        } else {
            (t.exponent.is_integer() && t.exponent >= Q::from_integer(k as i64)) || fine_power
        };
        if !ok {
            return Membership {
                member: false,
                reason: Some(format!(
                    "term (x-{})_+^{} is not in W^{}_{}",
                    fmt_q(&t.shift),
                    fmt_q(&t.exponent),
                    k,
                    p
                )),
            };
        }
    }
    Membership { member: true, reason: None }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    re: f64,
    im: f64,
    shift: String,
    power: String,
}

#[derive(Serialize, Deserialize)]
struct PowerFnRepr {
    terms: Vec<TermRepr>,
}

impl TryFrom<PowerFnRepr> for PowerFn {
    type Error = Error;

    fn try_from(r: PowerFnRepr) -> Result<Self> {
        let terms = r
            .terms
            .into_iter()
            .map(|t| Ok(PowerTerm::new(C64::new(t.re, t.im), parse_q(&t.shift)?, parse_q(&t.power)?)))
            .collect::<Result<Vec<_>>>()?;
        normalize(terms)
    }
}

impl From<PowerFn> for PowerFnRepr {
    fn from(f: PowerFn) -> Self {
        PowerFnRepr {
            terms: f
                .terms
                .into_iter()
                .map(|t| TermRepr {
                    re: t.coeff.re,
                    im: t.coeff.im,
                    shift: fmt_q(&t.shift),
                    power: fmt_q(&t.exponent),
                })
                .collect(),
        }
    }
}

impl std::fmt::Display for PowerFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i)", t.coeff.re, t.coeff.im)?;
            if t.shift.is_zero() {
                write!(f, "x^{}", t.exponent)?;
            } else {
                write!(f, "(x-{})_+^{}", t.shift, t.exponent)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn x() -> PowerFn {
        PowerFn::monomial(c(1.0), qi(1))
    }

    fn one() -> PowerFn {
        PowerFn::constant(c(1.0))
    }

    fn t(co: f64, s: Q, b: Q) -> PowerFn {
        PowerFn::term(c(co), s, b).unwrap()
    }

    #[test]
    fn normalize_combines_and_sorts() {
        let f = normalize(vec![PowerTerm::new(c(1.0), qi(0), qi(1)), PowerTerm::new(c(1.0), qi(0), qi(1))]).unwrap();
        assert_eq!(f.terms(), &[PowerTerm::new(c(2.0), qi(0), qi(1))]);
        let z = normalize(vec![PowerTerm::new(c(1.0), qi(0), qi(1)), PowerTerm::new(c(-1.0), qi(0), qi(1))]).unwrap();
        assert!(z.is_zero());
        let s = normalize(vec![PowerTerm::new(c(1.0), q(1, 2), qi(2)), PowerTerm::new(c(3.0), qi(0), qi(0))]).unwrap();
        assert_eq!(s.terms()[0].coeff, c(3.0));
        assert_eq!(s.terms()[1].shift, q(1, 2));
    }

    #[test]
    fn normalize_rejects_domain() {
        assert!(normalize(vec![PowerTerm::new(c(1.0), q(3, 2), qi(0))]).is_err());
        assert!(normalize(vec![PowerTerm::new(c(1.0), qi(0), qi(-1))]).is_err());
    }

    #[test]
    fn linear_combinations() {
        assert_eq!(linear_combine(&[c(2.0)], &[x()]).unwrap(), x().scale(c(2.0)));
        assert!(linear_combine(&[c(1.0), c(-1.0)], &[x(), x()]).unwrap().is_zero());
        let h = linear_combine(&[c(1.0), c(1.0)], &[one(), t(1.0, q(1, 2), qi(1))]).unwrap();
        assert_eq!(h.terms().len(), 2);
        assert!(linear_combine(&[c(1.0)], &[]).is_err());
    }

    #[test]
    fn convolution_examples() {
        assert!(convolve(&one(), &one()).approx_eq(&x(), 1e-14));
        let r = t(1.0, qi(0), q(1, 2));
        let want = PowerFn::monomial(c(std::f64::consts::PI / 8.0), qi(2));
        assert!(convolve(&r, &r).approx_eq(&want, 1e-12));
        let a = t(1.0, q(1, 4), qi(1));
        let b = t(1.0, q(1, 2), qi(1));
        assert!(convolve(&a, &b).approx_eq(&t(1.0 / 6.0, q(3, 4), qi(3)), 1e-12));
        assert!(convolve(&t(1.0, q(1, 2), qi(0)), &t(1.0, q(1, 2), qi(0))).is_zero());
    }

    #[test]
    fn fractional_integration_examples() {
        assert!(fractional_integrate(qi(1), &one()).unwrap().approx_eq(&x(), 1e-14));
        let h = fractional_integrate(q(1, 2), &one()).unwrap();
        let want = PowerFn::monomial(c(2.0 / std::f64::consts::PI.sqrt()), q(1, 2));
        assert!(h.approx_eq(&want, 1e-12));
        let hh = fractional_integrate(q(1, 2), &h).unwrap();
        assert!(hh.approx_eq(&x(), 1e-12));
        assert!(fractional_integrate(qi(0), &one()).is_err());
    }

    #[test]
    fn differentiation_examples() {
        let x2 = PowerFn::monomial(c(1.0), qi(2));
        assert!(differentiate(&x2).unwrap().approx_eq(&x().scale(c(2.0)), 1e-14));
        let f = PowerFn::monomial(c(1.0), q(3, 2));
        assert!(differentiate(&convolve(&one(), &f)).unwrap().approx_eq(&f, 1e-12));
        assert!(differentiate(&t(1.0, q(1, 2), qi(0))).is_err());
        assert!(differentiate(&one()).unwrap().is_zero());
    }

    #[test]
    fn jet_examples() {
        let f = one().scale(c(3.0)).add(&PowerFn::monomial(c(2.0), qi(2)));
        assert_eq!(jet(&f, 3).unwrap().values, vec![c(3.0), c(0.0), c(4.0)]);
        assert!(jet(&t(1.0, q(1, 2), qi(2)), 3).unwrap().is_zero());
        let f52 = PowerFn::monomial(c(1.0), q(5, 2));
        assert!(jet(&f52, 4).is_err());
        assert!(jet(&f52, 3).unwrap().is_zero());
    }

    #[test]
    fn support_examples() {
        assert_eq!(support_start(&t(2.0, q(3, 10), qi(2))), q(3, 10));
        assert_eq!(support_start(&x().sub(&x())), qi(1));
        let s = convolve(&t(1.0, q(1, 5), qi(1)), &t(1.0, q(3, 10), qi(1)));
        assert_eq!(support_start(&s), q(1, 2));
    }

    #[test]
    fn composition_examples() {
        assert!(compose_la(q(1, 2), &x()).unwrap().approx_eq(&x().scale(c(0.5)), 1e-14));
        assert!(compose_la(qi(2), &x()).unwrap().approx_eq(&t(2.0, q(1, 2), qi(1)), 1e-14));
        let lhs = compose_la(q(1, 2), &fractional_integrate(qi(1), &x()).unwrap()).unwrap();
        let rhs = fractional_integrate(qi(1), &compose_la(q(1, 2), &x()).unwrap()).unwrap().scale(c(0.5));
        assert!(lhs.approx_eq(&rhs, 1e-12));
        assert!(compose_la(qi(0), &x()).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let x2 = PowerFn::monomial(c(1.0), qi(2));
        assert_eq!(evaluate(&x2, q(1, 2)), c(0.25));
        assert_eq!(evaluate(&t(1.0, q(1, 2), qi(1)), q(1, 4)), c(0.0));
        assert_eq!(evaluate(&t(1.0, q(1, 2), qi(0)), q(1, 2)), c(0.0));
        assert_eq!(evaluate(&t(1.0, q(1, 2), qi(0)), q(3, 4)), c(1.0));
        assert_eq!(evaluate(&one(), qi(0)), c(1.0));
    }

    #[test]
    fn sobolev_examples() {
        assert!(sobolev_membership(&PowerFn::monomial(c(1.0), q(5, 2)), 2, 2.0).member);
        assert!(!sobolev_membership(&t(1.0, q(1, 2), qi(1)), 2, 2.0).member);
        let x3 = PowerFn::monomial(c(1.0), qi(3));
        for k in 0..=3 {
            assert!(sobolev_membership(&x3, k, 2.0).member);
        }
        assert!(!sobolev_membership(&PowerFn::monomial(c(1.0), q(1, 2)), 1, 2.0).member);
    }

    #[test]
    fn json_roundtrip() {
        let f = one().add(&t(-2.5, q(1, 3), q(3, 2)));
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"shift\":\"1/3\""));
        let g: PowerFn = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
        assert!(serde_json::from_str::<PowerFn>(r#"{"terms":[{"re":1,"im":0,"shift":"1/0","power":"1"}]}"#).is_err());
    }

    fn arb_fn() -> impl Strategy<Value = PowerFn> {
        prop::collection::vec((0.5f64..2.0, -2.0f64..2.0, 0i64..8, 0i64..12, 1i64..4), 1..4).prop_map(|v| {
            let terms = v
                .into_iter()
                .map(|(m, ph, s, b, d)| PowerTerm::new(C64::from_polar(m, ph), q(s, 10), q(b, d)))
                .collect();
            normalize(terms).unwrap()
        })
    }

    proptest! {
        #[test]
        fn convolution_commutes(f in arb_fn(), g in arb_fn()) {
            prop_assert!(convolve(&f, &g).approx_eq(&convolve(&g, &f), EQ_TOL));
        }

        #[test]
        fn convolution_associates(f in arb_fn(), g in arb_fn(), h in arb_fn()) {
            let a = convolve(&convolve(&f, &g), &h);
            let b = convolve(&f, &convolve(&g, &h));
            prop_assert!(a.approx_eq(&b, EQ_TOL));
        }

        #[test]
        fn convolution_is_bilinear(f in arb_fn(), g in arb_fn(), h in arb_fn(), re in -2.0f64..2.0) {
            let z = C64::new(re, 0.5);
            let lhs = convolve(&f.scale(z).add(&g), &h);
            let rhs = convolve(&f, &h).scale(z).add(&convolve(&g, &h));
            prop_assert!(lhs.sub(&rhs).l1_norm() <= 1e-10 * (lhs.l1_norm() + rhs.l1_norm()).max(1e-300));
        }

        #[test]
        fn semigroup(f in arb_fn(), a in 1i64..16, b in 1i64..16) {
            let (a, b) = (q(a, 4), q(b, 4));
            let lhs = fractional_integrate(a, &fractional_integrate(b, &f).unwrap()).unwrap();
            let rhs = fractional_integrate(a + b, &f).unwrap();
            prop_assert!(lhs.approx_eq(&rhs, EQ_TOL));
        }

        #[test]
        fn titchmarsh(f in arb_fn(), g in arb_fn()) {
            let want = (support_start(&f) + support_start(&g)).min(Q::one());
            prop_assert_eq!(support_start(&convolve(&f, &g)), want);
        }

        #[test]
        fn intertwining(f in arb_fn(), a in 1i64..=8, al in 1i64..=12) {
            let (a, al) = (q(a, 8), q(al, 4));
            let lhs = compose_la(a, &fractional_integrate(al, &f).unwrap()).unwrap();
            let rhs = fractional_integrate(al, &compose_la(a, &f).unwrap()).unwrap()
                .scale(C64::new(to_f64(&a).powf(to_f64(&al)), 0.0));
            prop_assert!(lhs.approx_eq(&rhs, EQ_TOL));
        }

        #[test]
        fn derivative_inverts_unit_convolution(f in arb_fn()) {
            let g = differentiate(&convolve(&PowerFn::constant(C64::new(1.0, 0.0)), &f)).unwrap();
            prop_assert!(g.approx_eq(&f, EQ_TOL));
        }

        #[test]
        fn fractional_jet_vanishes(f in arb_fn(), k in 1usize..4) {
            // alpha non-integer above k - 1/2
            let alpha = Q::from_integer(k as i64) - q(1, 2) + q(1, 7);
            let g = fractional_integrate(alpha, &f).unwrap();
            let sob = f.terms().iter().all(|t| t.exponent.is_integer());
            if sob {
                prop_assert!(jet(&g, k).unwrap().is_zero());
            }
        }
    }
}
