use super::field::Field;
use super::matrix::{preimage, ExactMatrix, Subspace};
use crate::error::{Error, Result};
use crate::rational::{to_f64, Q};
use rayon::prelude::*;
use std::collections::BTreeSet;

pub const ENUM_CAP: usize = 8;
pub const BRUTE_CAP: usize = 6;

/// Quotient of `J^alpha` on jets of order `k`.
pub fn quotient_nilpotent<F: Field>(k: usize, alpha: Q, p: f64) -> Result<ExactMatrix<F>> {
    if alpha.is_integer() && *alpha.numer() > 0 {
        return Ok(ExactMatrix::nilpotent_cell(k).pow(*alpha.numer() as usize));
    }
    if to_f64(&alpha) > k as f64 - 1.0 / p {
        return Ok(ExactMatrix::zeros(k, k));
    }
    Err(Error::Inadmissible(format!("alpha = {alpha} with k = {k}, p = {p}")))
}

/// A lattice with the intervals that produced it.
pub type LatWithIntervals<F> = (Vec<Subspace<F>>, Vec<LatInterval<F>>);

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LatInterval<F: Field> {
    pub lower: Subspace<F>,
    pub upper: Subspace<F>,
}

/// Every subspace of `F^d`, by enumerating reduced echelon forms.
pub fn all_subspaces<F: Field>(d: usize) -> Result<Vec<Subspace<F>>> {
    let elems = F::elements().ok_or_else(|| Error::Unsupported(format!("{} is not finite", F::name())))?;
    let mut out = Vec::new();
    for mask in 0u32..(1 << d) {
        let pivots: Vec<usize> = (0..d).filter(|&i| mask >> i & 1 == 1).collect();
        // free slots: in row r, columns after the pivot that are not pivots
        let slots: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| ((p + 1)..d).filter(|c| !pivots.contains(c)).map(move |c| (r, c)))
            .collect();
        let q = elems.len();
        let total = q.checked_pow(slots.len() as u32).ok_or_else(|| Error::SizeCap("too many subspaces".into()))?;
        for code in 0..total {
            let mut rows: Vec<Vec<F>> = pivots
                .iter()
                .map(|&p| {
                    let mut v = vec![F::zero(); d];
                    v[p] = F::one();
                    v
                })
                .collect();
            let mut c = code;
            for &(r, col) in &slots {
                rows[r][col] = elems[c % q].clone();
                c /= q;
            }
            out.push(Subspace::span(d, rows));
        }
    }
    Ok(out)
}

fn check_input<F: Field>(q: &ExactMatrix<F>, cap: usize, nilpotent: bool) -> Result<()> {
    if !q.is_square() {
        return Err(Error::LengthMismatch { expected: q.rows(), got: q.cols() });
    }
    if q.rows() > cap {
        return Err(Error::SizeCap(format!("dimension {} exceeds the cap {cap}", q.rows())));
    }
    if nilpotent && !q.is_nilpotent() {
        return Err(Error::NotNilpotent);
    }
    if F::elements().is_none() {
        return Err(Error::Unsupported(format!("lattice enumeration needs a finite field, got {}", F::name())));
    }
    Ok(())
}

/// Invariant subspaces of `q` inside the invariant subspace `u`, with the intervals used.
fn lat_within<F: Field>(q: &ExactMatrix<F>, u: &Subspace<F>, intervals: &mut Vec<LatInterval<F>>) -> Result<BTreeSet<Subspace<F>>> {
    let n = q.rows();
    if u.dim() == 0 {
        intervals.push(LatInterval { lower: u.clone(), upper: u.clone() });
        return Ok([u.clone()].into_iter().collect());
    }
    let qu = u.map(q);
    let inner = lat_within(q, &qu, &mut Vec::new())?;
    let parts: Vec<Result<_>> = inner
        .par_iter()
        .map(|m| {
            let upper = preimage(q, m)?.intersect(u);
            let comp = m.complement_in(&upper);
            let mut found = Vec::new();
            for w in all_subspaces::<F>(comp.len())? {
                let extra: Vec<Vec<F>> = w
                    .rows()
                    .iter()
                    .map(|y| {
                        let mut v = vec![F::zero(); n];
                        for (c, b) in y.iter().zip(&comp) {
                            for (x, bi) in v.iter_mut().zip(b) {
                                *x = x.clone() + c.clone() * bi.clone();
                            }
                        }
                        v
                    })
                    .collect();
                found.push(m.join(&Subspace::span(n, extra)));
            }
            Ok((LatInterval { lower: m.clone(), upper }, found))
        })
        .collect();
    let mut out = BTreeSet::new();
    for part in parts {
        let (iv, found) = part?;
        intervals.push(iv);
        out.extend(found);
    }
    Ok(out)
}

/// `Lat(Q)` as the union of the intervals `[M, Q^{-1}M]` over `M` in `Lat(Q|QV)`.
pub fn lat_enumerate<F: Field>(q: &ExactMatrix<F>) -> Result<Vec<Subspace<F>>> {
    Ok(lat_intervals(q)?.0)
}

/// The lattice together with the top-level intervals.
pub fn lat_intervals<F: Field>(q: &ExactMatrix<F>) -> Result<LatWithIntervals<F>> {
    check_input(q, ENUM_CAP, true)?;
    let mut intervals = Vec::new();
    let lat = lat_within(q, &Subspace::whole(q.rows()), &mut intervals)?;
    Ok((lat.into_iter().collect(), intervals))
}

pub fn lat_bruteforce<F: Field>(q: &ExactMatrix<F>) -> Result<Vec<Subspace<F>>> {
    check_input(q, BRUTE_CAP, false)?;
    let mut all: Vec<Subspace<F>> = all_subspaces::<F>(q.rows())?.into_iter().filter(|w| w.invariant_under(q)).collect();
    all.sort();
    Ok(all)
}
