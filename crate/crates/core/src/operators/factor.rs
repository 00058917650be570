use super::spec::{BlockSpec, Flavor};
use crate::error::{Error, Result};
use crate::powerfn::{compose_la, differentiate_n, dilate, evaluate, fractional_integrate, normalize, PowerFn, PowerTerm};
use crate::rational::{to_f64, Q, C64};
use num_traits::One;

/// The pair `M f = f(x/s)` and its right inverse `N` for one block of an argument class.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub s: Q,
    pub sobolev: Option<usize>,
}

pub fn build_m_n(spec: &BlockSpec, i: usize) -> Result<Factorization> {
    if i >= spec.n() {
        return Err(Error::Domain(format!("block index {i} out of range")));
    }
    let b = spec.block(i);
    let sobolev = match b.flavor {
        Flavor::Lp => None,
        Flavor::W | Flavor::W0 => Some(b.k),
    };
    Ok(Factorization { s: spec.s(i)?, sobolev })
}

fn binom(n: i64, k: i64) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

impl Factorization {
    pub fn apply_m(&self, f: &PowerFn) -> Result<PowerFn> {
        compose_la(Q::one() / self.s, f)
    }

    /// `f(sx)` on `[0, 1/s]`; beyond it zero (`L_p`) or the Taylor extension from `x = 1`.
    pub fn apply_n(&self, f: &PowerFn) -> Result<PowerFn> {
        if self.s == Q::one() {
            return Ok(f.clone());
        }
        let b = Q::one() / self.s;
        let g = dilate(self.s, f)?;
        let mut terms: Vec<PowerTerm> = g.terms().to_vec();
        // subtract the part of each term living on (b, 1], expanded around b
        for t in g.terms() {
            if !t.exponent.is_integer() {
                return Err(Error::NotRepresentable(format!(
                    "cutting (x-{})^{} at {b} needs an integer exponent",
                    t.shift, t.exponent
                )));
            }
            let beta = t.exponent.to_integer();
            let d = to_f64(&(b - t.shift));
            for m in 0..=beta {
                let c = t.coeff * binom(beta, m) * d.powi((beta - m) as i32);
                terms.push(PowerTerm::new(-c, b, Q::from_integer(m)));
            }
        }
        if let Some(k) = self.sobolev {
            let sf = to_f64(&self.s);
            let mut fact = 1.0;
            for m in 0..k {
                if m > 0 {
                    fact *= m as f64;
                }
                let dm = differentiate_n(f, m).map_err(|e| {
                    Error::NotRepresentable(format!("derivative {m} at 1 for the Taylor extension: {e}"))
                })?;
                let v = evaluate(&dm, Q::one());
                terms.push(PowerTerm::new(v * sf.powi(m as i32) / fact, b, Q::from_integer(m as i64)));
            }
        }
        normalize(terms)
    }

    /// Both sides of `(lambda_i J^a)^m f = M_i (lambda_1 J^a)^m N_i f`.
    pub fn identity_sides(&self, spec: &BlockSpec, i: usize, m: usize, f: &PowerFn) -> Result<(PowerFn, PowerFn)> {
        let cls = &spec.classes()[spec.class_of(i)];
        let lam_i = spec.block(i).lambda;
        let lam_1 = spec.block(cls.reference).lambda;
        let al = spec.alpha();
        let pow = |lam: C64, g: &PowerFn| -> Result<PowerFn> {
            if m == 0 {
                return Ok(g.clone());
            }
            Ok(fractional_integrate(al * Q::from_integer(m as i64), g)?.scale(lam.powi(m as i32)))
        };
        let lhs = pow(lam_i, f)?;
        let rhs = self.apply_m(&pow(lam_1, &self.apply_n(f)?)?)?;
        Ok((lhs, rhs))
    }
}
