use super::spec::{apply_block, BlockSpec, Flavor, VectorFn};
use crate::error::{Error, Result};
use crate::powerfn::{compose_la, convolve, differentiate, jet, linear_combine, sobolev_membership, PowerFn};
use crate::rational::{serde_c64, serde_q, to_f64, Q, C64};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

/// Operators commuting with every `J^alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form")]
pub enum ConvOperator {
    /// `f -> c f + r * f`
    #[serde(rename = "MULTIPLIER_PLUS_CONV")]
    MultiplierPlusConv {
        #[serde(with = "serde_c64")]
        c: C64,
        r: PowerFn,
    },
    /// `f -> d/dx (k * f)`
    #[serde(rename = "VOLTERRA_DERIVATIVE")]
    VolterraDerivative { k: PowerFn },
}

impl ConvOperator {
    pub fn identity() -> Self {
        ConvOperator::MultiplierPlusConv { c: C64::one(), r: PowerFn::zero() }
    }

    pub fn conv(r: PowerFn) -> Self {
        ConvOperator::MultiplierPlusConv { c: C64::zero(), r }
    }

    pub fn apply(&self, f: &PowerFn) -> Result<PowerFn> {
        apply_conv_operator(self, f)
    }

    /// Rewrites the operator as `c + r*`; `d/dx (k * .)` becomes `k(0) + k' *`.
    pub fn multiplier_form(&self) -> Result<(C64, PowerFn)> {
        match self {
            ConvOperator::MultiplierPlusConv { c, r } => Ok((*c, r.clone())),
            ConvOperator::VolterraDerivative { k } => {
                let c = k
                    .terms()
                    .iter()
                    .find(|t| t.shift.is_zero() && t.exponent.is_zero())
                    .map(|t| t.coeff)
                    .unwrap_or_else(C64::zero);
                Ok((c, differentiate(k)?))
            }
        }
    }
}

pub fn apply_conv_operator(op: &ConvOperator, f: &PowerFn) -> Result<PowerFn> {
    match op {
        ConvOperator::MultiplierPlusConv { c, r } => Ok(f.scale(*c).add(&convolve(r, f))),
        ConvOperator::VolterraDerivative { k } => differentiate(&convolve(k, f)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockEntry {
    #[serde(with = "serde_q")]
    pub a: Q,
    pub op: ConvOperator,
}

/// `n x n` array of `L_a o K` entries; `None` is the zero operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockOperatorMatrix {
    pub n: usize,
    pub entries: Vec<Vec<Option<BlockEntry>>>,
}

impl BlockOperatorMatrix {
    pub fn zeros(n: usize) -> Self {
        BlockOperatorMatrix { n, entries: vec![vec![None; n]; n] }
    }

    pub fn diagonal(ops: Vec<ConvOperator>) -> Self {
        let mut m = Self::zeros(ops.len());
        for (i, op) in ops.into_iter().enumerate() {
            m.entries[i][i] = Some(BlockEntry { a: Q::one(), op });
        }
        m
    }

    pub fn set(&mut self, i: usize, j: usize, a: Q, op: ConvOperator) {
        self.entries[i][j] = Some(BlockEntry { a, op });
    }

    fn check_shape(&self) -> Result<()> {
        if self.entries.len() != self.n || self.entries.iter().any(|r| r.len() != self.n) {
            return Err(Error::Invalid(format!("block matrix must be {0}x{0}", self.n)));
        }
        if let Some(e) = self.entries.iter().flatten().flatten().find(|e| e.a <= Q::zero()) {
            return Err(Error::Domain(format!("entry scale a = {} must be positive", e.a)));
        }
        Ok(())
    }

    pub fn apply(&self, f: &[PowerFn]) -> Result<VectorFn> {
        self.check_shape()?;
        if f.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: f.len() });
        }
        let mut out = Vec::with_capacity(self.n);
        for row in &self.entries {
            let mut acc = PowerFn::zero();
            for (e, g) in row.iter().zip(f) {
                if let Some(e) = e {
                    acc = acc.add(&compose_la(e.a, &e.op.apply(g)?)?);
                }
            }
            out.push(acc);
        }
        Ok(out)
    }

    pub fn diagonal_ops(&self) -> Option<Vec<ConvOperator>> {
        let mut ops = Vec::with_capacity(self.n);
        for (i, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if i != j && e.is_some() {
                    return None;
                }
            }
            match &row[i] {
                Some(e) if e.a == Q::one() => ops.push(e.op.clone()),
                Some(_) => return None,
                None => ops.push(ConvOperator::conv(PowerFn::zero())),
            }
        }
        Some(ops)
    }
}

/// `p(A) = sum_m coeffs[m] A^m` as a diagonal of `d/dx (k_j * .)` operators.
pub fn polynomial_in_a(spec: &BlockSpec, coeffs: &[C64]) -> BlockOperatorMatrix {
    let al = spec.alpha();
    let ops = spec
        .blocks()
        .iter()
        .map(|b| {
            let mut k = PowerFn::constant(coeffs.first().copied().unwrap_or_else(C64::zero));
            let mut lm = C64::one();
            for (m, cm) in coeffs.iter().enumerate().skip(1) {
                lm *= b.lambda;
                let e = al * Q::from_integer(m as i64);
                let g = gamma(to_f64(&e) + 1.0);
                k = k.add(&PowerFn::monomial(cm * lm / g, e));
            }
            ConvOperator::VolterraDerivative { k }
        })
        .collect();
    BlockOperatorMatrix::diagonal(ops)
}

/// `R_ij = L_{a_ij} o d/dx(k_ij * .)` for a single argument class, after the kernel class check.
pub fn commutant_candidate(spec: &BlockSpec, kernels: &[Vec<PowerFn>]) -> Result<BlockOperatorMatrix> {
    if !spec.single_class() {
        return Err(Error::Unsupported("commutant candidates need a single argument class".into()));
    }
    let n = spec.n();
    if kernels.len() != n || kernels.iter().any(|r| r.len() != n) {
        return Err(Error::LengthMismatch { expected: n, got: kernels.len() });
    }
    let flavor = spec.block(0).flavor;
    let k = spec.block(0).k;
    if spec.blocks().iter().any(|b| b.flavor != flavor || b.k != k) {
        return Err(Error::Unsupported("commutant candidates need a common flavor and order".into()));
    }
    let mut m = BlockOperatorMatrix::zeros(n);
    for (i, row) in kernels.iter().enumerate() {
        for (j, kij) in row.iter().enumerate() {
            if kij.is_zero() {
                continue;
            }
            let a = spec.a(i, j)?;
            if flavor == Flavor::W {
                let mem = sobolev_membership(kij, k, spec.p());
                if !mem.member {
                    return Err(Error::KernelClass { i, j, reason: mem.reason.unwrap_or_default() });
                }
                if a > Q::one() && !jet(kij, k).map_err(|e| Error::KernelClass { i, j, reason: e.to_string() })?.is_zero() {
                    return Err(Error::KernelClass {
                        i,
                        j,
                        reason: format!("a = {a} > 1 requires a kernel with zero jet of order {k}"),
                    });
                }
            }
            m.set(i, j, a, ConvOperator::VolterraDerivative { k: kij.clone() });
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub residuals: Vec<f64>,
}

impl ResidualReport {
    pub fn exact(&self) -> bool {
        self.max_residual == 0.0
    }
}

/// Term-l1 norm of `(RA - AR) f` for each test vector.
pub fn verify_commutation(r: &BlockOperatorMatrix, spec: &BlockSpec, testset: &[VectorFn]) -> Result<ResidualReport> {
    if r.n != spec.n() {
        return Err(Error::LengthMismatch { expected: spec.n(), got: r.n });
    }
    let mut residuals = Vec::with_capacity(testset.len());
    for f in testset {
        let ra = r.apply(&apply_block(spec, f)?)?;
        let ar = apply_block(spec, &r.apply(f)?)?;
        let mut tot = 0.0;
        for (x, y) in ra.iter().zip(&ar) {
            tot += linear_combine(&[C64::one(), -C64::one()], &[x.clone(), y.clone()])?.l1_norm();
        }
        residuals.push(tot);
    }
    Ok(ResidualReport { max_residual: residuals.iter().copied().fold(0.0, f64::max), residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::spec::monomial_testset;
    use crate::rational::{q, qi};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn one() -> PowerFn {
        PowerFn::constant(c(1.0, 0.0))
    }

    fn x() -> PowerFn {
        PowerFn::monomial(c(1.0, 0.0), qi(1))
    }

    #[test]
    fn conv_operator_examples() {
        let m = ConvOperator::MultiplierPlusConv { c: c(2.0, 0.0), r: PowerFn::zero() };
        assert!(m.apply(&x()).unwrap().approx_eq(&x().scale(c(2.0, 0.0)), 1e-14));
        let id = ConvOperator::VolterraDerivative { k: one() };
        let f = PowerFn::term(c(1.0, 2.0), q(1, 3), q(5, 2)).unwrap().add(&x());
        assert!(id.apply(&f).unwrap().approx_eq(&f, 1e-12));
        let r = ConvOperator::conv(x());
        assert!(r.apply(&one()).unwrap().approx_eq(&PowerFn::monomial(c(0.5, 0.0), qi(2)), 1e-14));
    }

    #[test]
    fn multiplier_form_of_volterra() {
        let k = one().scale(c(3.0, 0.0)).add(&PowerFn::monomial(c(1.0, 0.0), qi(2)));
        let (c0, r) = ConvOperator::VolterraDerivative { k: k.clone() }.multiplier_form().unwrap();
        assert_eq!(c0, c(3.0, 0.0));
        let f = PowerFn::monomial(c(1.0, 0.0), q(3, 2));
        let a = ConvOperator::VolterraDerivative { k }.apply(&f).unwrap();
        let b = ConvOperator::MultiplierPlusConv { c: c0, r }.apply(&f).unwrap();
        assert!(a.approx_eq(&b, 1e-12));
    }

    #[test]
    fn identity_candidate_commutes() {
        let spec = BlockSpec::uniform(q(3, 2), 2.0, &[c(1.0, 0.0)], 0, Flavor::Lp).unwrap();
        let r = commutant_candidate(&spec, &[vec![one()]]).unwrap();
        assert!(verify_commutation(&r, &spec, &monomial_testset(&spec, 6)).unwrap().exact());
    }

    #[test]
    fn scaled_pair_candidates() {
        for flavor in [Flavor::Lp, Flavor::W] {
            let k = if flavor == Flavor::W { 2 } else { 0 };
            let spec = BlockSpec::uniform(qi(1), 2.0, &[c(1.0, 0.0), c(0.5, 0.0)], k, flavor).unwrap();
            let mut ker = vec![vec![PowerFn::zero(); 2]; 2];
            ker[1][0] = one();
            let r = commutant_candidate(&spec, &ker).unwrap();
            assert_eq!(r.entries[1][0].as_ref().unwrap().a, q(1, 2));
            assert!(verify_commutation(&r, &spec, &monomial_testset(&spec, 6)).unwrap().exact());
            // a_12 = 2 > 1: the kernel needs a zero jet in W
            let mut ker = vec![vec![PowerFn::zero(); 2]; 2];
            ker[0][1] = one();
            let res = commutant_candidate(&spec, &ker);
            if flavor == Flavor::W {
                assert!(matches!(res, Err(Error::KernelClass { i: 0, j: 1, .. })));
                ker[0][1] = PowerFn::monomial(c(1.0, 0.0), qi(3));
                let r = commutant_candidate(&spec, &ker).unwrap();
                assert!(verify_commutation(&r, &spec, &monomial_testset(&spec, 6)).unwrap().exact());
            } else {
                let r = res.unwrap();
                assert!(verify_commutation(&r, &spec, &monomial_testset(&spec, 6)).unwrap().exact());
            }
        }
    }

    #[test]
    fn cross_class_coupling_fails() {
        let spec = BlockSpec::uniform(qi(1), 2.0, &[c(1.0, 0.0), c(0.0, 1.0)], 0, Flavor::Lp).unwrap();
        let mut r = BlockOperatorMatrix::zeros(2);
        r.set(0, 1, qi(1), ConvOperator::identity());
        assert!(verify_commutation(&r, &spec, &monomial_testset(&spec, 3)).unwrap().max_residual > 0.1);
    }

    #[test]
    fn polynomials_commute() {
        let spec = BlockSpec::uniform(q(1, 2), 2.0, &[c(1.0, 0.0), c(0.0, 2.0), c(0.25, 0.0)], 0, Flavor::Lp).unwrap();
        let p = polynomial_in_a(&spec, &[c(1.0, 0.0), c(-2.0, 1.0), c(0.5, 0.0), c(0.0, 3.0)]);
        assert!(verify_commutation(&p, &spec, &monomial_testset(&spec, 6)).unwrap().exact());
        let f = vec![one(), x(), one()];
        let direct = {
            let a1 = apply_block(&spec, &f).unwrap();
            let a2 = apply_block(&spec, &a1).unwrap();
            let a3 = apply_block(&spec, &a2).unwrap();
            (0..3)
                .map(|j| {
                    linear_combine(
                        &[c(1.0, 0.0), c(-2.0, 1.0), c(0.5, 0.0), c(0.0, 3.0)],
                        &[f[j].clone(), a1[j].clone(), a2[j].clone(), a3[j].clone()],
                    )
                    .unwrap()
                })
                .collect::<Vec<_>>()
        };
        let via = p.apply(&f).unwrap();
        for (a, b) in direct.iter().zip(&via) {
            assert!(a.approx_eq(b, 1e-10));
        }
    }

    #[test]
    fn json_roundtrip() {
        let mut r = BlockOperatorMatrix::zeros(2);
        r.set(1, 0, q(1, 2), ConvOperator::VolterraDerivative { k: one() });
        r.set(0, 0, qi(1), ConvOperator::MultiplierPlusConv { c: c(0.0, 1.0), r: x() });
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("VOLTERRA_DERIVATIVE"));
        let back: BlockOperatorMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
