//! Truncated power series over complex doubles.
//!
//! Series here are "germ-like": zero constant term, indexed so that
//! `coeff(k)` is the coefficient of `z^k`. Composition and
//! compositional inversion are exact polynomial algebra on the
//! coefficients through the truncation order.

use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    /// `coeffs[k]` is the coefficient of `z^k`; `coeffs[0]` must be 0.
    coeffs: Vec<Complex64>,
}

impl Series {
    /// Builds a series from coefficients `c_1..=c_m` of `z^1..=z^m`.
    pub fn from_linear_coeffs(coeffs: &[Complex64]) -> Series {
        let mut v = Vec::with_capacity(coeffs.len() + 1);
        v.push(Complex64::new(0.0, 0.0));
        v.extend_from_slice(coeffs);
        Series { coeffs: v }
    }

    pub fn zero(m: usize) -> Series {
        Series {
            coeffs: vec![Complex64::new(0.0, 0.0); m + 1],
        }
    }

    pub fn identity(m: usize) -> Series {
        let mut s = Series::zero(m);
        s.coeffs[1] = Complex64::new(1.0, 0.0);
        s
    }

    /// The rigid rotation `lambda z`.
    pub fn rotation(lambda: Complex64, m: usize) -> Series {
        let mut s = Series::zero(m);
        s.coeffs[1] = lambda;
        s
    }

    /// Truncation order (largest represented power).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn linear(&self) -> Complex64 {
        self.coeff(1)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, c: Complex64) {
        if self.coeffs.len() <= k {
            self.coeffs.resize(k + 1, Complex64::new(0.0, 0.0));
        }
        self.coeffs[k] = c;
    }

    pub fn truncated(&self, m: usize) -> Series {
        let mut v = self.coeffs.clone();
        v.resize(m + 1, Complex64::new(0.0, 0.0));
        Series { coeffs: v }
    }

    pub fn add(&self, rhs: &Series) -> Series {
        let m = self.order().max(rhs.order());
        let mut out = Series::zero(m);
        for k in 0..=m {
            out.coeffs[k] = self.coeff(k) + rhs.coeff(k);
        }
        out
    }

    pub fn sub(&self, rhs: &Series) -> Series {
        let m = self.order().max(rhs.order());
        let mut out = Series::zero(m);
        for k in 0..=m {
            out.coeffs[k] = self.coeff(k) - rhs.coeff(k);
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Product truncated at order `m`. Constant terms are allowed;
    /// composition uses them internally.
    pub fn mul(&self, rhs: &Series, m: usize) -> Series {
        let mut out = Series::zero(m);
        let amax = self.order().min(m);
        for i in 0..=amax {
            let a = self.coeffs[i];
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let bmax = rhs.order().min(m - i);
            for j in 0..=bmax {
                out.coeffs[i + j] += a * rhs.coeffs[j];
            }
        }
        out
    }

    /// Largest coefficient magnitude over orders `from..=order`.
    pub fn max_coeff_norm_from(&self, from: usize) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(from)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Composition `f(g(z))` exact through order `m`. Requires `g(0) = 0`,
/// which every germ-like series satisfies by construction.
pub fn compose(f: &Series, g: &Series, m: usize) -> Series {
    debug_assert_eq!(g.coeff(0), Complex64::new(0.0, 0.0), "inner series must fix 0");
    // Horner: f(g) = g * (f_1 + g * (f_2 + g * (... f_kmax)))
    let kmax = f.order().min(m);
    if kmax == 0 {
        return Series::zero(m);
    }
    let mut acc = Series::zero(m);
    acc.coeffs[0] = f.coeff(kmax);
    for k in (1..kmax).rev() {
        acc = acc.mul(g, m);
        acc.coeffs[0] += f.coeffs[k];
    }
    acc.mul(g, m)
}

/// Compositional inverse: the series `g` with `f(g(z)) = z` through
/// order `m`.
pub fn series_invert(f: &Series, m: usize) -> Result<Series> {
    let f1 = f.linear();
    if f1 == Complex64::new(0.0, 0.0) {
        return Err(Error::DegenerateLinearTerm);
    }
    // triangular solve via the progressive power table:
    // [z^n] f(g) = sum_k f_k [z^n] g^k, and [z^n] g^k is free of g_n
    // for k >= 2.
    let mut g = Series::zero(m);
    g.coeffs[1] = 1.0 / f1;
    let mut table = PowerTable::new(m);
    table.set_linear(1, g.coeffs[1]);
    for n in 2..=m {
        table.fill_column(n, &g);
        let mut c = Complex64::new(0.0, 0.0);
        for k in 2..=n {
            let fk = f.coeff(k);
            if fk != Complex64::new(0.0, 0.0) {
                c += fk * table.get(k, n);
            }
        }
        // f_1 g_n + c = [z^n] id = 0
        let gn = -c / f1;
        g.coeffs[n] = gn;
        table.set_linear(n, gn);
    }
    Ok(g)
}

/// Progressive table of series powers: `get(k, n) = [z^n] h^k`, filled
/// column by column as the coefficients of `h` become known.
pub(crate) struct PowerTable {
    m: usize,
    /// rows[k - 1] holds [z^n] h^k for n = 0..=m (k >= 1).
    rows: Vec<Vec<Complex64>>,
}

impl PowerTable {
    pub fn new(m: usize) -> PowerTable {
        PowerTable {
            m,
            rows: vec![vec![Complex64::new(0.0, 0.0); m + 1]; m.max(1)],
        }
    }

    /// Records `h_n` (row 1 of the table).
    pub fn set_linear(&mut self, n: usize, hn: Complex64) {
        self.rows[0][n] = hn;
    }

    pub fn get(&self, k: usize, n: usize) -> Complex64 {
        self.rows[k - 1][n]
    }

    /// Fills `[z^n] h^k` for all `k in 2..=n`, using coefficients
    /// `h_1..h_(n-1)` only (valid before `h_n` is known).
    pub fn fill_column(&mut self, n: usize, h: &Series) {
        debug_assert!(n <= self.m);
        for k in 2..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in (k - 1)..n {
                let hcoef = h.coeff(n - j);
                if hcoef != Complex64::new(0.0, 0.0) {
                    acc += self.rows[k - 2][j] * hcoef;
                }
            }
            self.rows[k - 1][n] = acc;
        }
    }
}
