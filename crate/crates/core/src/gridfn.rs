//! Uniform-grid discretization on [0,1], used to cross-check the symbolic engine.

use crate::error::{Error, Result};
use crate::powerfn::{evaluate_f64, PowerFn};
use crate::rational::C64;
use num_traits::Zero;
use statrs::function::gamma::gamma;
use std::io::Write;

pub const DEFAULT_GRID: usize = 257;

#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    pub values: Vec<C64>,
}

/// Dense row-major `n x n` operator on grid samples.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOperator {
    pub n: usize,
    pub data: Vec<C64>,
}

impl GridFn {
    pub fn new(values: Vec<C64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Domain("grid needs at least 2 samples".into()));
        }
        Ok(GridFn { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.n() - 1) as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.h();
        (0..self.n()).map(move |i| i as f64 * h)
    }

    pub fn max_abs_diff(&self, other: &GridFn) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Writes `x,re,im` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,re,im")?;
        for (x, v) in self.nodes().zip(&self.values) {
            writeln!(w, "{x},{},{}", v.re, v.im)?;
        }
        Ok(())
    }
}

impl GridOperator {
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    pub fn apply(&self, f: &GridFn) -> Result<GridFn> {
        if f.n() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: f.n() });
        }
        let values = (0..self.n)
            .map(|i| {
                let row = &self.data[i * self.n..(i + 1) * self.n];
                row.iter().zip(&f.values).map(|(a, b)| a * b).sum()
            })
            .collect();
        Ok(GridFn { values })
    }

    pub fn scale(&self, c: C64) -> Self {
        GridOperator { n: self.n, data: self.data.iter().map(|v| v * c).collect() }
    }
}

/// Product-rectangle rule: on cell `[x_j, x_{j+1}]` the sample is the mean of the endpoint values
/// and the kernel moment is integrated exactly.
pub fn grid_fractional_integrate(alpha: f64, n: usize) -> Result<GridOperator> {
    if alpha <= 0.0 {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    if n < 2 {
        return Err(Error::Domain("grid needs at least 2 samples".into()));
    }
    let h = 1.0 / (n - 1) as f64;
    let g = gamma(alpha + 1.0);
    // w[d] = moment of the cell whose right end lies d steps before the node
    let w: Vec<f64> = (0..n)
        .map(|d| {
            if d == 0 {
                0.0
            } else {
                h.powf(alpha) * ((d as f64).powf(alpha) - ((d - 1) as f64).powf(alpha)) / g
            }
        })
        .collect();
    let mut data = vec![C64::zero(); n * n];
    for i in 1..n {
        for j in 0..i {
            let m = w[i - j];
            data[i * n + j] += 0.5 * m;
            data[i * n + j + 1] += 0.5 * m;
        }
    }
    Ok(GridOperator { n, data })
}

/// Product-trapezoid convolution; the pairing of `j` with `i - j` makes it symmetric bit for bit.
pub fn grid_convolve(f: &GridFn, g: &GridFn) -> Result<GridFn> {
    if f.n() != g.n() {
        return Err(Error::LengthMismatch { expected: f.n(), got: g.n() });
    }
    let n = f.n();
    let h = f.h();
    let mut values = vec![C64::zero(); n];
    for (i, out) in values.iter_mut().enumerate().skip(1) {
        let t = |j: usize| f.values[i - j] * g.values[j];
        let mut acc = 0.5 * (t(0) + t(i));
        let (mut lo, mut hi) = (1, i - 1);
        while lo < hi {
            acc += t(lo) + t(hi);
            lo += 1;
            hi -= 1;
        }
        if lo == hi {
            acc += t(lo);
        }
        *out = acc * h;
    }
    Ok(GridFn { values })
}

pub fn sample(f: &PowerFn, n: usize) -> Result<GridFn> {
    if n < 2 {
        return Err(Error::Domain("grid needs at least 2 samples".into()));
    }
    let h = 1.0 / (n - 1) as f64;
    Ok(GridFn { values: (0..n).map(|i| evaluate_f64(f, i as f64 * h)).collect() })
}

/// Trapezoid approximation of the L_p norm.
pub fn lp_norm(f: &GridFn, p: f64) -> f64 {
    let h = f.h();
    let n = f.n();
    let s: f64 = f
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            w * v.norm().powf(p)
        })
        .sum();
    (s * h).powf(1.0 / p)
}
