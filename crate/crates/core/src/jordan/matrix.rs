use super::field::Field;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExactMatrix<F: Field> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> ExactMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if let Some(bad) = rows.iter().find(|x| x.len() != c) {
            return Err(Error::LengthMismatch { expected: c, got: bad.len() });
        }
        Ok(ExactMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(n: usize, cols: &[Vec<F>]) -> Result<Self> {
        let mut m = Self::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: c.len() });
            }
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    /// `J(0;k)`: `e_1 -> 0`, `e_j -> e_{j-1}`.
    pub fn nilpotent_cell(k: usize) -> Self {
        let mut m = Self::zeros(k, k);
        for i in 0..k.saturating_sub(1) {
            m.set(i, i + 1, F::one());
        }
        m
    }

    pub fn jordan_sum(sizes: &[usize]) -> Self {
        let cells: Vec<Self> = sizes.iter().map(|&k| Self::nilpotent_cell(k)).collect();
        Self::direct_sum(&cells)
    }

    pub fn direct_sum(blocks: &[Self]) -> Self {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<F> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn row_vecs(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::LengthMismatch { expected: self.cols, got: o.rows });
        }
        let mut m = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = m.get(i, j).clone() + a.clone() * o.get(l, j).clone();
                    m.set(i, j, v);
                }
            }
        }
        Ok(m)
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(F::zero(), |acc, j| {
                    let a = self.get(i, j);
                    if a.is_zero() {
                        acc
                    } else {
                        acc + a.clone() * v[j].clone()
                    }
                })
            })
            .collect()
    }

    /// Square matrices only.
    pub fn pow(&self, e: usize) -> Self {
        let mut r = Self::identity(self.rows);
        for _ in 0..e {
            r = r.mul(self).expect("square matrix");
        }
        r
    }

    pub fn scale(&self, c: &F) -> Self {
        ExactMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| c.clone() * x.clone()).collect() }
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = self.transpose();
        for x in m.data.iter_mut() {
            *x = x.conj();
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_nilpotent(&self) -> bool {
        self.is_square() && self.pow(self.rows).is_zero()
    }

    pub fn rank(&self) -> usize {
        rref(self.row_vecs()).len()
    }

    pub fn kernel(&self) -> Subspace<F> {
        let r = rref(self.row_vecs());
        let pivots: Vec<usize> = r.iter().map(|row| leading(row).expect("nonzero row")).collect();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![F::zero(); self.cols];
            v[free] = F::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -row[free].clone();
            }
            basis.push(v);
        }
        Subspace::span(self.cols, basis)
    }

    pub fn image(&self) -> Subspace<F> {
        Subspace::span(self.rows, (0..self.cols).map(|j| self.column(j)).collect())
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.row_vecs().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
    }

    pub fn parse(rows: &[Vec<String>]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| F::parse(s)).collect::<Result<Vec<F>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(parsed)
    }
}

fn leading<F: Field>(row: &[F]) -> Option<usize> {
    row.iter().position(|x| !x.is_zero())
}

/// Nonzero rows of the reduced row echelon form.
pub fn rref<F: Field>(mut rows: Vec<Vec<F>>) -> Vec<Vec<F>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut top = 0;
    for col in 0..ncols {
        let Some(piv) = (top..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(top, piv);
        let inv = rows[top][col].inv().expect("nonzero pivot");
        for x in rows[top].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        let pivot_row = rows[top].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == top || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x = x.clone() - f.clone() * p.clone();
            }
        }
        top += 1;
        if top == rows.len() {
            break;
        }
    }
    rows.truncate(top);
    rows
}

/// A subspace of `F^n`, stored by the reduced echelon form of its basis rows.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Subspace<F: Field> {
    ambient: usize,
    rows: Vec<Vec<F>>,
}

impl<F: Field> Subspace<F> {
    pub fn zero(n: usize) -> Self {
        Subspace { ambient: n, rows: Vec::new() }
    }

    pub fn whole(n: usize) -> Self {
        Self::span(n, ExactMatrix::<F>::identity(n).row_vecs())
    }

    pub fn span(n: usize, vectors: Vec<Vec<F>>) -> Self {
        debug_assert!(vectors.iter().all(|v| v.len() == n));
        Subspace { ambient: n, rows: rref(vectors) }
    }

    pub fn coordinate(n: usize, indices: &[usize]) -> Self {
        let vs = indices
            .iter()
            .map(|&i| {
                let mut v = vec![F::zero(); n];
                v[i] = F::one();
                v
            })
            .collect();
        Self::span(n, vs)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<F>] {
        &self.rows
    }

    pub fn basis_matrix(&self) -> ExactMatrix<F> {
        ExactMatrix::from_rows(self.rows.clone()).unwrap_or_else(|_| ExactMatrix::zeros(0, self.ambient))
    }

    pub fn contains(&self, v: &[F]) -> bool {
        let mut rows = self.rows.clone();
        rows.push(v.to_vec());
        rref(rows).len() == self.dim()
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    pub fn join(&self, other: &Self) -> Self {
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Self::span(self.ambient, rows)
    }

    /// `{y : <b, y> = 0}` for every basis row `b`, bilinear pairing.
    pub fn annihilator(&self) -> Self {
        if self.rows.is_empty() {
            return Self::whole(self.ambient);
        }
        self.basis_matrix().kernel()
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut rows = self.annihilator().rows;
        rows.extend(other.annihilator().rows);
        if rows.is_empty() {
            return Self::whole(self.ambient);
        }
        ExactMatrix::from_rows(rows).expect("equal lengths").kernel()
    }

    pub fn map(&self, a: &ExactMatrix<F>) -> Self {
        Self::span(a.rows(), self.rows.iter().map(|r| a.apply(r)).collect())
    }

    pub fn invariant_under(&self, a: &ExactMatrix<F>) -> bool {
        self.rows.iter().all(|r| self.contains(&a.apply(r)))
    }

    /// Vectors extending this basis to a basis of `larger`.
    pub fn complement_in(&self, larger: &Self) -> Vec<Vec<F>> {
        let mut cur = self.clone();
        let mut out = Vec::new();
        for r in &larger.rows {
            if !cur.contains(r) {
                out.push(r.clone());
                cur = cur.join(&Self::span(self.ambient, vec![r.clone()]));
            }
        }
        out
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
    }
}

/// `{v : A v in M}`.
pub fn preimage<F: Field>(a: &ExactMatrix<F>, m: &Subspace<F>) -> Result<Subspace<F>> {
    if !a.is_square() || a.rows() != m.ambient() {
        return Err(Error::LengthMismatch { expected: a.rows(), got: m.ambient() });
    }
    let ann = m.annihilator();
    if ann.dim() == 0 {
        return Ok(Subspace::whole(a.cols()));
    }
    Ok(ann.basis_matrix().mul(a)?.kernel())
}
