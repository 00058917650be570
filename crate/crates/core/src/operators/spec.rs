use crate::error::{Error, Result};
use crate::powerfn::{fractional_integrate, jet, sobolev_membership, PowerFn};
use crate::rational::{fmt_q, rationalize, serde_c64, serde_q, to_f64, Q, C64};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Relative tolerance for deciding that two eigenvalues share an argument.
pub const ARG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    Lp,
    W0,
    W,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    #[serde(with = "serde_c64")]
    pub lambda: C64,
    #[serde(default)]
    pub k: usize,
    pub flavor: Flavor,
}

impl Block {
    pub fn new(lambda: C64, k: usize, flavor: Flavor) -> Self {
        Block { lambda, k, flavor }
    }
}

/// Blocks whose eigenvalues differ by a positive factor, ordered by `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArgClass {
    pub members: Vec<usize>,
    pub reference: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BlockSpecRepr {
    #[serde(with = "serde_q")]
    alpha: Q,
    #[serde(default = "default_p")]
    p: f64,
    blocks: Vec<Block>,
}

fn default_p() -> f64 {
    2.0
}

/// `A = sum_j lambda_j J^alpha` on a direct sum of `L_p`, `W_{p,0}^k` and `W_p^k` spaces.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "BlockSpecRepr", into = "BlockSpecRepr")]
pub struct BlockSpec {
    alpha: Q,
    p: f64,
    blocks: Vec<Block>,
    classes: Vec<ArgClass>,
    class_of: Vec<usize>,
    s: Vec<f64>,
    s_exact: Vec<Option<Q>>,
}

impl PartialEq for BlockSpec {
    fn eq(&self, o: &Self) -> bool {
        self.alpha == o.alpha && self.p == o.p && self.blocks == o.blocks
    }
}

impl TryFrom<BlockSpecRepr> for BlockSpec {
    type Error = Error;

    fn try_from(r: BlockSpecRepr) -> Result<Self> {
        BlockSpec::new(r.alpha, r.p, r.blocks)
    }
}

impl From<BlockSpec> for BlockSpecRepr {
    fn from(s: BlockSpec) -> Self {
        BlockSpecRepr { alpha: s.alpha, p: s.p, blocks: s.blocks }
    }
}

pub fn same_argument(a: C64, b: C64) -> bool {
    let r = a / b;
    r.re > 0.0 && r.im.abs() <= ARG_TOL * r.norm()
}

/// `alpha` integer, or above `k - 1/p`.
pub fn admissible(alpha: Q, k: usize, p: f64) -> bool {
    alpha.is_integer() || to_f64(&alpha) > k as f64 - 1.0 / p
}

impl BlockSpec {
    pub fn new(alpha: Q, p: f64, blocks: Vec<Block>) -> Result<Self> {
        if alpha <= Q::zero() {
            return Err(Error::Invalid(format!("alpha must be positive, got {}", fmt_q(&alpha))));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Invalid(format!("p must lie in (1, inf), got {p}")));
        }
        if blocks.is_empty() {
            return Err(Error::Invalid("at least one block is required".into()));
        }
        for (j, b) in blocks.iter().enumerate() {
            if !(b.lambda.re.is_finite() && b.lambda.im.is_finite()) || b.lambda.norm() == 0.0 {
                return Err(Error::Invalid(format!("block {j}: lambda must be a nonzero finite number")));
            }
            match b.flavor {
                Flavor::Lp if b.k != 0 => {
                    return Err(Error::Invalid(format!("block {j}: flavor Lp requires k = 0, got {}", b.k)));
                }
                Flavor::W if b.k == 0 => {
                    return Err(Error::Invalid(format!("block {j}: flavor W requires k >= 1")));
                }
                Flavor::W if !admissible(alpha, b.k, p) => {
                    return Err(Error::Inadmissible(format!(
                        "block {j}: flavor W needs alpha integer or alpha > k - 1/p, got alpha = {} with k = {}, p = {p}",
                        fmt_q(&alpha),
                        b.k
                    )));
                }
                _ => {}
            }
        }
        let n = blocks.len();
        let mut class_of = vec![usize::MAX; n];
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for j in 0..n {
            match groups.iter().position(|g| same_argument(blocks[g[0]].lambda, blocks[j].lambda)) {
                Some(c) => {
                    groups[c].push(j);
                    class_of[j] = c;
                }
                None => {
                    class_of[j] = groups.len();
                    groups.push(vec![j]);
                }
            }
        }
        let al = to_f64(&alpha);
        let mut s = vec![1.0; n];
        let mut s_exact = vec![Some(Q::one()); n];
        let mut classes = Vec::with_capacity(groups.len());
        for g in groups {
            let reference = *g
                .iter()
                .max_by(|&&a, &&b| {
                    blocks[a]
                        .lambda
                        .norm()
                        .partial_cmp(&blocks[b].lambda.norm())
                        .unwrap()
                        .then(b.cmp(&a))
                })
                .unwrap();
            for &j in &g {
                let v = (blocks[reference].lambda.norm() / blocks[j].lambda.norm()).powf(1.0 / al);
                s[j] = v;
                s_exact[j] = rationalize(v, 10_000, 1e-9);
            }
            let mut members = g.clone();
            members.sort_by(|&a, &b| s[a].partial_cmp(&s[b]).unwrap().then(a.cmp(&b)));
            classes.push(ArgClass { members, reference });
        }
        Ok(BlockSpec { alpha, p, blocks, classes, class_of, s, s_exact })
    }

    /// All blocks of one flavor and order `k`.
    pub fn uniform(alpha: Q, p: f64, lambdas: &[C64], k: usize, flavor: Flavor) -> Result<Self> {
        Self::new(alpha, p, lambdas.iter().map(|&l| Block::new(l, k, flavor)).collect())
    }

    pub fn alpha(&self) -> Q {
        self.alpha
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, j: usize) -> &Block {
        &self.blocks[j]
    }

    pub fn classes(&self) -> &[ArgClass] {
        &self.classes
    }

    pub fn class_of(&self, j: usize) -> usize {
        self.class_of[j]
    }

    pub fn same_class(&self, i: usize, j: usize) -> bool {
        self.class_of[i] == self.class_of[j]
    }

    pub fn single_class(&self) -> bool {
        self.classes.len() == 1
    }

    pub fn s_f64(&self, j: usize) -> f64 {
        self.s[j]
    }

    /// Exact `s_j` relative to its class reference.
    pub fn s(&self, j: usize) -> Result<Q> {
        self.s_exact[j].ok_or_else(|| {
            Error::NotRepresentable(format!("scale s_{j} = {} is not a small rational", self.s[j]))
        })
    }

    /// `a_ij = s_j / s_i` for blocks in one class.
    pub fn a(&self, i: usize, j: usize) -> Result<Q> {
        if !self.same_class(i, j) {
            return Err(Error::Domain(format!("blocks {i} and {j} lie in different argument classes")));
        }
        Ok(self.s(j)? / self.s(i)?)
    }

    pub fn all_flavor(&self, f: Flavor) -> bool {
        self.blocks.iter().all(|b| b.flavor == f)
    }

    pub fn common_k(&self) -> Option<usize> {
        let k = self.blocks[0].k;
        self.blocks.iter().all(|b| b.k == k).then_some(k)
    }

    /// Common `k` of an all-W spec, where the Alg and bicommutant tests apply.
    pub fn sobolev_k(&self) -> Result<usize> {
        if !self.all_flavor(Flavor::W) {
            return Err(Error::Unsupported("every block must have flavor W".into()));
        }
        self.common_k()
            .ok_or_else(|| Error::Unsupported("blocks must share one Sobolev order k".into()))
    }
}

pub type VectorFn = Vec<PowerFn>;

/// Component-wise flavor membership.
pub fn check_vector(spec: &BlockSpec, f: &[PowerFn]) -> Result<()> {
    if f.len() != spec.n() {
        return Err(Error::LengthMismatch { expected: spec.n(), got: f.len() });
    }
    for (j, (g, b)) in f.iter().zip(spec.blocks()).enumerate() {
        match b.flavor {
            Flavor::Lp => {}
            Flavor::W | Flavor::W0 => {
                let m = sobolev_membership(g, b.k, spec.p());
                if !m.member {
                    return Err(Error::Domain(format!("component {j}: {}", m.reason.unwrap_or_default())));
                }
                if b.flavor == Flavor::W0 && b.k > 0 && !jet(g, b.k)?.is_zero() {
                    return Err(Error::Domain(format!("component {j}: W0 flavor needs a zero jet")));
                }
            }
        }
    }
    Ok(())
}

pub fn apply_block(spec: &BlockSpec, f: &[PowerFn]) -> Result<VectorFn> {
    check_vector(spec, f)?;
    f.iter()
        .zip(spec.blocks())
        .map(|(g, b)| Ok(fractional_integrate(spec.alpha(), g)?.scale(b.lambda)))
        .collect()
}

pub fn apply_block_n(spec: &BlockSpec, f: &[PowerFn], m: usize) -> Result<VectorFn> {
    let mut g = f.to_vec();
    for _ in 0..m {
        g = apply_block(spec, &g)?;
    }
    Ok(g)
}

/// Vectors carrying a single monomial of degree `<= deg` in one component (raised by `k` for W0).
pub fn monomial_testset(spec: &BlockSpec, deg: u32) -> Vec<VectorFn> {
    let mut out = Vec::new();
    for j in 0..spec.n() {
        let b = spec.block(j);
        for d in 0..=deg {
            let e = if b.flavor == Flavor::W0 { d as i64 + b.k as i64 } else { d as i64 };
            let mut v = vec![PowerFn::zero(); spec.n()];
            v[j] = PowerFn::monomial(C64::new(1.0, 0.0), Q::from_integer(e));
            out.push(v);
        }
    }
    out
}
