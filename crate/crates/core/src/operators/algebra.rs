use super::conv::ConvOperator;
use super::spec::BlockSpec;
use crate::error::{Error, Result};
use crate::powerfn::{compose_la, jet, sobolev_membership, PowerFn, EQ_TOL};
use crate::rational::{floor_i, fmt_q, to_f64, Q, C64};
use crate::report::{Check, Certificate};
use num_traits::{One, Zero};

const SCALAR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `k = 1`: no jet data, Alg and the bicommutant differ only in the constants.
    Order1,
    /// `1 <= alpha <= k - 1`: jets of `r` vanish except at orders `m alpha - 1`.
    Jets,
    /// `2 <= k <= alpha + 1/p`: `r` has a zero jet of order `k - 1`.
    Flat,
}

pub fn regime(alpha: Q, k: usize, p: f64) -> Result<Regime> {
    let kq = Q::from_integer(k as i64);
    if k == 1 {
        Ok(Regime::Order1)
    } else if alpha >= Q::one() && alpha <= kq - Q::one() {
        Ok(Regime::Jets)
    } else if k >= 2 && (k as f64) <= to_f64(&alpha) + 1.0 / p {
        Ok(Regime::Flat)
    } else {
        Err(Error::UnsupportedRegime(format!(
            "alpha = {}, k = {k}, p = {p} lies outside 1 <= alpha <= k-1 and 2 <= k <= alpha + 1/p",
            fmt_q(&alpha)
        )))
    }
}

fn close(a: C64, b: C64) -> bool {
    (a - b).norm() <= SCALAR_TOL * a.norm().max(b.norm()).max(1.0)
}

struct Prepared {
    k: usize,
    c: Vec<C64>,
    r: Vec<PowerFn>,
    jets: Vec<Vec<C64>>,
}

fn prepare(ops: &[ConvOperator], spec: &BlockSpec, checks: &mut Vec<Check>) -> Result<Prepared> {
    let k = spec.sobolev_k()?;
    if ops.len() != spec.n() {
        return Err(Error::LengthMismatch { expected: spec.n(), got: ops.len() });
    }
    let mut c = Vec::new();
    let mut r = Vec::new();
    for op in ops {
        let (ci, ri) = op.multiplier_form()?;
        c.push(ci);
        r.push(ri);
    }
    let mut jets = Vec::new();
    for (j, rj) in r.iter().enumerate() {
        let m = sobolev_membership(rj, k - 1, spec.p());
        checks.push(Check::new(
            format!("r_{j} in W^{}", k - 1),
            m.member,
            m.reason.unwrap_or_else(|| "ok".into()),
        ));
        jets.push(if m.member && k >= 2 { jet(rj, k - 1)?.values } else { vec![C64::zero(); k.saturating_sub(1)] });
    }
    Ok(Prepared { k, c, r, jets })
}

fn scaling_checks(spec: &BlockSpec, r: &[PowerFn], checks: &mut Vec<Check>) -> Result<()> {
    for cl in spec.classes() {
        let rho = cl.reference;
        for &b in &cl.members {
            if b == rho {
                continue;
            }
            let s = spec.s(b)?;
            let want = compose_la(Q::one() / s, &r[rho])?.scale(C64::new(1.0 / to_f64(&s), 0.0));
            let ok = want.approx_eq(&r[b], EQ_TOL);
            checks.push(Check::new(
                format!("r_{b}(x) = r_{rho}(x/s)/s"),
                ok,
                format!("s = {}", fmt_q(&s)),
            ));
        }
    }
    Ok(())
}

/// Membership of `diag(R_j)` in the weakly closed algebra generated by an all-W spec.
pub fn alg_membership(ops: &[ConvOperator], spec: &BlockSpec) -> Result<Certificate> {
    let k = spec.sobolev_k()?;
    let reg = regime(spec.alpha(), k, spec.p())?;
    let mut checks = Vec::new();
    let pr = prepare(ops, spec, &mut checks)?;
    let c0 = pr.c[0];
    let common = pr.c.iter().all(|&c| close(c, c0));
    checks.push(Check::new("common constant", common, format!("c = {:?}", pr.c)));
    scaling_checks(spec, &pr.r, &mut checks)?;
    match reg {
        Regime::Order1 => {}
        Regime::Flat => {
            for (j, jt) in pr.jets.iter().enumerate() {
                let ok = jt.iter().all(|v| v.norm() <= SCALAR_TOL);
                checks.push(Check::new(format!("r_{j} has zero jet of order {}", pr.k - 1), ok, format!("{jt:?}")));
            }
        }
        Regime::Jets => {
            let al = spec.alpha().to_integer() as usize;
            let free: Vec<usize> = (1..).map(|m| m * al - 1).take_while(|&l| l < k - 1).collect();
            for (j, jt) in pr.jets.iter().enumerate() {
                for (l, v) in jt.iter().enumerate() {
                    if !free.contains(&l) {
                        checks.push(Check::new(format!("r_{j}^({l})(0) = 0"), v.norm() <= SCALAR_TOL, format!("{v}")));
                    }
                }
            }
            let lam0 = spec.block(0).lambda;
            for (mi, &l) in free.iter().enumerate() {
                let m = mi as i32 + 1;
                for j in 1..spec.n() {
                    let want = (spec.block(j).lambda / lam0).powi(m) * pr.jets[0][l];
                    let got = pr.jets[j][l];
                    checks.push(Check::new(
                        format!("r_{j}^({l})(0) = (lambda_{j}/lambda_0)^{m} r_0^({l})(0)"),
                        close(got, want),
                        format!("{got} vs {want}"),
                    ));
                }
            }
        }
    }
    Ok(Certificate::from_checks(checks))
}

/// Membership of `diag(R_j)` in the bicommutant: constants agree inside each argument class only.
pub fn bicommutant_membership(ops: &[ConvOperator], spec: &BlockSpec) -> Result<Certificate> {
    let k = spec.sobolev_k()?;
    regime(spec.alpha(), k, spec.p())?;
    let mut checks = Vec::new();
    let pr = prepare(ops, spec, &mut checks)?;
    for (ci, cl) in spec.classes().iter().enumerate() {
        let c0 = pr.c[cl.reference];
        let ok = cl.members.iter().all(|&b| close(pr.c[b], c0));
        checks.push(Check::new(format!("common constant in class {ci}"), ok, format!("reference c = {c0}")));
    }
    scaling_checks(spec, &pr.r, &mut checks)?;
    Ok(Certificate::from_checks(checks))
}

/// `r k - 1 - floor((k-1)/alpha)` for `r` argument classes.
pub fn quotient_dimension(spec: &BlockSpec) -> Result<usize> {
    let k = spec.sobolev_k()?;
    let r = spec.classes().len();
    let fl = floor_i(&(Q::from_integer(k as i64 - 1) / spec.alpha())) as usize;
    Ok(r * k - 1 - fl)
}
