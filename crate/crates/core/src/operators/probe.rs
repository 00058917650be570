use super::conv::ConvOperator;
use crate::error::{Error, Result};
use crate::powerfn::{compose_la, evaluate_f64, fractional_integrate, PowerFn};
use crate::rational::{q, qi, rationalize, to_f64, Q, C64};
use nalgebra::DMatrix;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

const CUTOFF: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassResidual {
    #[serde(with = "crate::rational::serde_q")]
    pub a: Q,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    #[serde(with = "crate::rational::serde_q")]
    pub alpha: Q,
    #[serde(with = "crate::rational::serde_c64")]
    pub c: C64,
    pub n: usize,
    pub classes: Vec<ClassResidual>,
    pub min_residual: f64,
    #[serde(with = "crate::rational::serde_q")]
    pub best_a: Q,
    #[serde(with = "crate::rational::serde_c64")]
    pub control_c: C64,
    pub control_residual: f64,
    /// `None` when the control residual is exactly zero.
    pub ratio: Option<f64>,
}

fn kernels() -> Vec<PowerFn> {
    let mut out = Vec::with_capacity(16);
    for j in 0..8 {
        out.push(PowerFn::monomial(C64::one(), qi(j)));
        out.push(PowerFn::monomial(C64::one(), q(2 * j + 1, 2)));
    }
    out
}

fn test_functions() -> Vec<PowerFn> {
    let mut out: Vec<PowerFn> = (0..5).map(|d| PowerFn::monomial(C64::one(), qi(d))).collect();
    out.push(PowerFn::monomial(C64::one(), q(1, 2)));
    out
}

/// Columns: one per kernel. Rows: samples of `X J^a f - c J^a X f` and of `X f`.
fn class_matrices(alpha: Q, c: C64, a: Q, n: usize) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    let ks = kernels();
    let fs = test_functions();
    let nodes: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let rows = fs.len() * n;
    let mut res = DMatrix::zeros(rows, ks.len());
    let mut img = DMatrix::zeros(rows, ks.len());
    let norm = 1.0 / (n as f64).sqrt();
    for (col, k) in ks.iter().enumerate() {
        let op = ConvOperator::VolterraDerivative { k: k.clone() };
        let x = |g: &PowerFn| -> Result<PowerFn> { compose_la(a, &op.apply(g)?) };
        for (fi, f) in fs.iter().enumerate() {
            let xf = x(f)?;
            let lhs = x(&fractional_integrate(alpha, f)?)?;
            let rhs = fractional_integrate(alpha, &xf)?.scale(c);
            let d = lhs.sub(&rhs);
            for (i, &t) in nodes.iter().enumerate() {
                res[(fi * n + i, col)] = evaluate_f64(&d, t) * norm;
                img[(fi * n + i, col)] = evaluate_f64(&xf, t) * norm;
            }
        }
    }
    Ok((res, img))
}

/// `min |R theta| / |B theta|` over `theta` outside the numerical kernel of `B`.
fn min_ratio(r: DMatrix<C64>, b: DMatrix<C64>) -> f64 {
    let cols = b.ncols();
    let svd = b.svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > CUTOFF * smax)
        .collect();
    // W = V_r S_r^{-1}
    let mut w = DMatrix::<C64>::zeros(cols, keep.len());
    for (j, &i) in keep.iter().enumerate() {
        let s = svd.singular_values[i];
        for row in 0..cols {
            w[(row, j)] = vt[(i, row)].conj() / s;
        }
    }
    let rw = r * w;
    rw.singular_values().iter().cloned().fold(f64::INFINITY, f64::min)
}

pub fn class_residual(alpha: Q, c: C64, a: Q, n: usize) -> Result<f64> {
    let (r, b) = class_matrices(alpha, c, a, n)?;
    Ok(min_ratio(r, b))
}

/// Smallest relative intertwining defect `|X J^a - c J^a X| / |X|` over `X = L_a K`.
pub fn extended_eigen_probe(alpha: Q, c: C64, n: usize) -> Result<ProbeReport> {
    if n < 32 {
        return Err(Error::Domain(format!("probe grid needs n >= 32, got {n}")));
    }
    if alpha <= Q::zero() {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let mut classes: Vec<Q> = vec![q(1, 4), q(1, 2), qi(1), qi(2), qi(4)];
    if c.norm() > 0.0 {
        if let Some(a) = rationalize(c.norm().powf(1.0 / to_f64(&alpha)), 10000, 1e-9) {
            if a > Q::zero() && !classes.contains(&a) {
                classes.push(a);
            }
        }
    }
    classes.sort();
    let mut out = Vec::with_capacity(classes.len());
    for a in classes {
        out.push(ClassResidual { a, residual: class_residual(alpha, c, a, n)? });
    }
    let best = out
        .iter()
        .min_by(|x, y| x.residual.total_cmp(&y.residual))
        .expect("nonempty class list")
        .clone();
    let control_c = C64::new(to_f64(&best.a).powf(to_f64(&alpha)), 0.0);
    let control_residual = class_residual(alpha, control_c, best.a, n)?;
    let ratio = (control_residual > 0.0).then(|| best.residual / control_residual);
    Ok(ProbeReport {
        alpha,
        c,
        n,
        classes: out,
        min_residual: best.residual,
        best_a: best.a,
        control_c,
        control_residual,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_scaling_intertwines() {
        let r = class_residual(qi(1), C64::new(0.5, 0.0), q(1, 2), 64).unwrap();
        assert!(r < 1e-10, "{r}");
    }

    #[test]
    fn identity_commutes() {
        let p = extended_eigen_probe(qi(1), C64::one(), 64).unwrap();
        assert!(p.min_residual < 1e-10);
        assert_eq!(p.best_a, qi(1));
    }

    #[test]
    fn negative_c_separates() {
        let p = extended_eigen_probe(qi(1), C64::new(-1.0, 0.0), 64).unwrap();
        assert!(p.control_residual <= 1e-8);
        assert!(p.min_residual >= 1e3 * p.control_residual, "{p:?}");
        assert!(p.min_residual > 1e-6, "{p:?}");
    }

    #[test]
    fn residual_bounded_below_across_grids() {
        let c = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        let rs: Vec<f64> = [32, 64, 128]
            .iter()
            .map(|&n| extended_eigen_probe(qi(2), c, n).unwrap().min_residual)
            .collect();
        // J^a is compact, so the infimum over a finite kernel family is small but must not collapse with n
        assert!(rs[2] >= 0.5 * rs[0], "{rs:?}");
        assert!(rs.iter().all(|&r| r > 1e-8), "{rs:?}");
    }

    #[test]
    fn small_grid_rejected() {
        assert!(extended_eigen_probe(qi(1), C64::one(), 16).is_err());
    }
}
