use super::field::{Field, GaussRat};
use super::lattice::quotient_nilpotent;
use super::matrix::{ExactMatrix, Subspace};
use crate::error::{Error, Result};
use crate::rational::{ceil_i, Q};
use crate::report::{Certificate, Check};

/// Smallest `A`-invariant subspace containing `E`.
pub fn krylov_span<F: Field>(a: &ExactMatrix<F>, e: &Subspace<F>) -> Subspace<F> {
    let mut cur = e.clone();
    loop {
        let next = cur.join(&cur.map(a));
        if next.dim() == cur.dim() {
            return cur;
        }
        cur = next;
    }
}

/// Rank of the projection of `E` onto `ker A*`.
///
/// With `K` a basis of `ker A*` and `G = K* K`, the projection is `K G^{-1} K*`; since `K` is
/// injective and `G` invertible its rank on `E` equals the rank of `K* E`.
pub fn projected_rank<F: Field>(a: &ExactMatrix<F>, vectors: &[Vec<F>]) -> Result<(usize, usize)> {
    let ker = a.adjoint().kernel();
    if vectors.is_empty() || ker.dim() == 0 {
        return Ok((0, ker.dim()));
    }
    let kstar = ker.basis_matrix().conj_rows();
    let e = ExactMatrix::from_columns(a.rows(), vectors)?;
    Ok((kstar.mul(&e)?.rank(), ker.dim()))
}

/// `E` is cyclic for nilpotent `A` iff its projection onto `ker A*` is all of `ker A*`.
pub fn cyclicity_finite<F: Field>(a: &ExactMatrix<F>, e: &Subspace<F>) -> Result<bool> {
    if !a.is_nilpotent() {
        return Err(Error::NotNilpotent);
    }
    let (rank, kdim) = projected_rank(a, e.rows())?;
    Ok(rank == kdim)
}

impl<F: Field> ExactMatrix<F> {
    /// Entrywise conjugate, so that rows `b` act as `v -> <v, b>`.
    pub fn conj_rows(&self) -> Self {
        let rows = self.row_vecs().into_iter().map(|r| r.iter().map(|x| x.conj()).collect()).collect();
        ExactMatrix::from_rows(rows).unwrap_or_else(|_| ExactMatrix::zeros(0, self.cols()))
    }
}

pub fn ceil_alpha(alpha: Q) -> usize {
    ceil_i(&alpha).max(0) as usize
}

/// `m_j = min(ceil(alpha), k_j)` for each block.
pub fn block_multiplicities(ks: &[usize], alpha: Q) -> Vec<usize> {
    ks.iter().map(|&k| k.min(ceil_alpha(alpha))).collect()
}

pub fn mu_finite(ks: &[usize], alpha: Q) -> usize {
    block_multiplicities(ks, alpha).iter().sum()
}

/// `A = sum lambda_j J(0;k_j)^alpha` on the jet quotient.
pub fn quotient_operator(blocks: &[(GaussRat, usize)], alpha: Q, p: f64) -> Result<ExactMatrix<GaussRat>> {
    let cells = blocks
        .iter()
        .map(|(lam, k)| Ok(quotient_nilpotent::<GaussRat>(*k, alpha, p)?.scale(lam)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExactMatrix::direct_sum(&cells))
}

/// Rank test on `W_0 = P_{ker A*} W(phi)` together with the count bound `N >= sum m_j`.
pub fn cor56_check(blocks: &[(GaussRat, usize)], alpha: Q, p: f64, vectors: &[Vec<GaussRat>]) -> Result<Certificate> {
    let a = quotient_operator(blocks, alpha, p)?;
    let ks: Vec<usize> = blocks.iter().map(|b| b.1).collect();
    let mu = mu_finite(&ks, alpha);
    if let Some(v) = vectors.iter().find(|v| v.len() != a.rows()) {
        return Err(Error::LengthMismatch { expected: a.rows(), got: v.len() });
    }
    let (rank, kdim) = projected_rank(&a, vectors)?;
    Ok(Certificate::from_checks(vec![
        Check::new("kernel_dimension", kdim == mu, format!("dim ker A* = {kdim}, sum m_j = {mu}")),
        Check::new("count_bound", vectors.len() >= mu, format!("N = {} against sum m_j = {mu}", vectors.len())),
        Check::new("projected_rank", rank == mu, format!("rank W_0 = {rank}, needed {mu}")),
    ]))
}

/// Jet `(f(0), ..., f^{(k-1)}(0))` in quotient coordinates, where `e_j` carries order `k - j`.
pub fn jet_to_quotient<T: Clone>(jet: &[T]) -> Vec<T> {
    jet.iter().rev().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::super::field::Fp;
    use super::*;
    use crate::rational::{q, qi};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type G = GaussRat;

    fn e(n: usize, i: usize) -> Vec<G> {
        let mut v = vec![G::zero(); n];
        v[i] = G::one();
        v
    }

    #[test]
    fn two_cell_examples() {
        let j = ExactMatrix::<G>::nilpotent_cell(2);
        assert!(cyclicity_finite(&j, &Subspace::span(2, vec![e(2, 1)])).unwrap());
        assert!(!cyclicity_finite(&j, &Subspace::span(2, vec![e(2, 0)])).unwrap());
        assert!(matches!(cyclicity_finite(&ExactMatrix::<G>::identity(2), &Subspace::zero(2)), Err(Error::NotNilpotent)));
    }

    #[test]
    fn krylov_examples() {
        let j = ExactMatrix::<G>::nilpotent_cell(3);
        assert_eq!(krylov_span(&j, &Subspace::whole(3)), Subspace::whole(3));
        assert_eq!(krylov_span(&j, &Subspace::span(3, vec![e(3, 2)])), Subspace::whole(3));
        let z = ExactMatrix::<G>::zeros(3, 3);
        let s = Subspace::span(3, vec![e(3, 1)]);
        assert_eq!(krylov_span(&z, &s), s);
    }

    #[test]
    fn kernel_projection_examples() {
        let blocks = [(G::i(), 1), (G::one(), 2)];
        let single = cor56_check(&blocks, qi(1), 2.0, &[vec![G::one(), G::zero(), G::one()]]).unwrap();
        assert!(!single.verdict);
        let pair = cor56_check(&blocks, qi(1), 2.0, &[e(3, 0), e(3, 2)]).unwrap();
        assert!(pair.verdict);
        let a = quotient_operator(&blocks, qi(1), 2.0).unwrap();
        assert_eq!(a.adjoint().kernel(), Subspace::coordinate(3, &[0, 2]));
        let alpha2 = cor56_check(&[(G::one(), 3)], qi(2), 2.0, &[e(3, 1), e(3, 2)]).unwrap();
        assert!(alpha2.verdict);
    }

    #[test]
    fn multiplicity_formula() {
        assert_eq!(mu_finite(&[1, 2], qi(1)), 2);
        assert_eq!(mu_finite(&[2, 3], q(3, 2)), 4);
        assert_eq!(mu_finite(&[2, 3], qi(5)), 5);
    }

    #[test]
    fn jet_reversal() {
        assert_eq!(jet_to_quotient(&[1, 2, 3]), vec![3, 2, 1]);
    }

    fn random_gauss(rng: &mut ChaCha8Rng) -> G {
        if rng.random_bool(0.4) {
            return G::zero();
        }
        G::from_ratios((rng.random_range(-3..4), rng.random_range(1..4)), (rng.random_range(-2..3), 1))
    }

    #[test]
    fn projection_agrees_with_krylov() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let shapes: [&[usize]; 5] = [&[3], &[1, 2], &[2, 2], &[1, 1, 3], &[4]];
        for trial in 0..100 {
            let sizes = shapes[trial % shapes.len()];
            let power = 1 + trial % 2;
            let a = ExactMatrix::<G>::jordan_sum(sizes).pow(power);
            let n = a.rows();
            let count = rng.random_range(1..=3);
            let vs: Vec<Vec<G>> = (0..count).map(|_| (0..n).map(|_| random_gauss(&mut rng)).collect()).collect();
            let s = Subspace::span(n, vs);
            let cyc = cyclicity_finite(&a, &s).unwrap();
            assert_eq!(cyc, krylov_span(&a, &s) == Subspace::whole(n), "{sizes:?}^{power}");
        }
    }

    #[test]
    fn mu_is_minimal_coordinate_cyclic_dimension() {
        for (ks, alpha) in [(vec![1, 2], qi(1)), (vec![2, 3], qi(2)), (vec![1, 1, 2], qi(1)), (vec![5], qi(3)), (vec![2, 2], qi(1))] {
            let blocks: Vec<(G, usize)> = ks.iter().map(|&k| (G::one(), k)).collect();
            let a = quotient_operator(&blocks, alpha, 2.0).unwrap();
            let n = a.rows();
            let mut best = n;
            for mask in 0u32..(1 << n) {
                let idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                if idx.len() < best && krylov_span(&a, &Subspace::coordinate(n, &idx)) == Subspace::whole(n) {
                    best = idx.len();
                }
            }
            assert_eq!(best, mu_finite(&ks, alpha), "{ks:?} alpha={alpha}");
        }
    }

    proptest! {
        #[test]
        fn enlarging_keeps_cyclicity(bits in proptest::collection::vec(0i64..5, 8), extra in proptest::collection::vec(0i64..5, 4)) {
            let a = ExactMatrix::<Fp<5>>::jordan_sum(&[1, 3]);
            let vs: Vec<Vec<Fp<5>>> = bits.chunks(4).map(|c| c.iter().map(|&x| Fp::new(x)).collect()).collect();
            let s = Subspace::span(4, vs);
            let bigger = s.join(&Subspace::span(4, vec![extra.iter().map(|&x| Fp::new(x)).collect()]));
            if cyclicity_finite(&a, &s).unwrap() {
                prop_assert!(cyclicity_finite(&a, &bigger).unwrap());
            }
            prop_assert_eq!(cyclicity_finite(&a, &s).unwrap(), krylov_span(&a, &s) == Subspace::whole(4));
        }
    }
}
