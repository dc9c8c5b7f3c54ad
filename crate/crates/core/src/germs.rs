//! Germs fixing the origin, their linearization by the small-divisor
//! coefficient recursion, synthesis of commuting families, the
//! simultaneous-linearizability check, and empirical Siegel-radius
//! estimation against the arithmetic bound.
//!
//! Coefficient arithmetic is complex double precision; correctness is
//! covered by substitution residuals and round-trip tests rather than
//! interval tracking, which would blow up through order-M composition.
//! The rotation coefficient `lambda = e^(2 pi i alpha)` is evaluated at
//! twice the working precision and rounded once.

use crate::brjuno::siegel_radius_bound;
use crate::error::{Error, Result};
use crate::gauss::RotationVector;
use crate::interval::{self, Interval};
use crate::scalar::{ConstantsConfig, RealScalar};
use crate::series::{compose, series_invert, PowerTable, Series};
use num_complex::Complex64;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 64;
/// Hard cap on truncation order.
pub const MAX_ORDER: usize = 1024;
/// Divisors below this magnitude signal a rotation number that is
/// effectively rational at working precision.
pub const DIVISOR_FLOOR: f64 = 1e-14;

/// A truncated germ `e^(2 pi i alpha) z + sum_(k>=2) a_k z^k`.
/// The linear coefficient is implicit in the rotation number.
#[derive(Clone, Debug)]
pub struct PowerSeriesGerm {
    alpha: RealScalar,
    /// Coefficients a_2..=a_M.
    coeffs: Vec<Complex64>,
}

impl PowerSeriesGerm {
    pub fn new(alpha: RealScalar, coeffs: Vec<Complex64>) -> Result<PowerSeriesGerm> {
        if !coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::Domain("germ coefficients must be finite".into()));
        }
        Ok(PowerSeriesGerm { alpha, coeffs })
    }

    /// The rigid rotation with the given rotation number.
    pub fn rotation(alpha: RealScalar) -> PowerSeriesGerm {
        PowerSeriesGerm {
            alpha,
            coeffs: Vec::new(),
        }
    }

    pub fn alpha(&self) -> &RealScalar {
        &self.alpha
    }

    /// Truncation order (at least 2 by construction of any useful germ).
    pub fn order(&self) -> usize {
        self.coeffs.len() + 1
    }

    /// `a_k` for `k >= 2`; zero beyond the stored truncation.
    pub fn coeff(&self, k: usize) -> Complex64 {
        if k < 2 {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs
            .get(k - 2)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn coeffs_tail(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `lambda = e^(2 pi i alpha)`, evaluated once at `2 * bits` of
    /// precision and rounded to a complex double.
    pub fn lambda(&self) -> Complex64 {
        lambda_of(&self.alpha)
    }

    /// The full series `lambda z + sum a_k z^k` truncated at `m`.
    pub fn series(&self, m: usize) -> Series {
        let mut s = Series::rotation(self.lambda(), m);
        for k in 2..=m.min(self.order()) {
            s.set_coeff(k, self.coeff(k));
        }
        s
    }
}

/// `e^(2 pi i alpha)` through the certified enclosure of `2 pi alpha`,
/// evaluated at twice double precision and rounded once.
pub fn lambda_of(alpha: &RealScalar) -> Complex64 {
    let bits = 128;
    let theta = interval::pi(bits)
        .mul_bigint(&2.into(), bits)
        .mul(alpha.at_bits(bits).interval(), bits);
    let mid = Interval::point(theta.mid());
    let re = mid.cos(bits).to_f64_mid();
    let im = mid.sin(bits).to_f64_mid();
    Complex64::new(re, im)
}

/// Estimated inverse of the coefficient growth rate: `Finite(r)` when
/// the trailing window gives a positive growth rate, `Infinite` when
/// every window coefficient vanishes (the series is a polynomialy
/// trivial linearization).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RadiusEstimate {
    Finite(f64),
    Infinite,
}

impl RadiusEstimate {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            RadiusEstimate::Finite(r) => Some(*r),
            RadiusEstimate::Infinite => None,
        }
    }
}

/// Outcome of the small-divisor linearization recursion.
#[derive(Clone, Debug)]
pub struct LinearizationResult {
    /// The normalized linearization `h(z) = z + sum_(k>=2) h_k z^k`.
    pub h: Series,
    /// Smallest `|lambda^n - lambda|` encountered, `2 <= n <= M`.
    pub min_divisor: f64,
    /// Window-based growth-rate inverse over orders `[M/2, M]`: the
    /// reciprocal of `max |h_n|^(1/(n-1))`, the exponent chosen so
    /// that geometric coefficients `c^(n-1)` give exactly `1/c`.
    pub radius_estimate: RadiusEstimate,
    /// `max_n |[z^n](f o h - h o R_alpha)|` through order M.
    pub residual: f64,
}

/// Solves `f o h = h o R_alpha` order by order:
/// `(lambda^n - lambda) h_n = [z^n] sum_(k>=2) a_k h^k`.
pub fn linearize(f: &PowerSeriesGerm, m: usize, tol: f64) -> Result<LinearizationResult> {
    if m < 2 {
        return Err(Error::Domain("truncation order must be at least 2".into()));
    }
    if m > MAX_ORDER {
        return Err(Error::Domain(format!("truncation order exceeds cap {MAX_ORDER}")));
    }
    let lambda = f.lambda();
    let mut h = Series::identity(m);
    let mut table = PowerTable::new(m);
    table.set_linear(1, Complex64::new(1.0, 0.0));
    let mut min_divisor = f64::INFINITY;
    // lambda^n with periodic renormalization to the unit circle
    let mut lambda_pow = lambda;
    for n in 2..=m {
        lambda_pow *= lambda;
        lambda_pow /= Complex64::new(lambda_pow.norm(), 0.0);
        let divisor = lambda_pow - lambda;
        let mag = divisor.norm();
        if mag < DIVISOR_FLOOR {
            return Err(Error::SmallDivisorUnderflow {
                order: n,
                magnitude: mag,
            });
        }
        min_divisor = min_divisor.min(mag);
        table.fill_column(n, &h);
        let mut p = Complex64::new(0.0, 0.0);
        for k in 2..=n {
            let ak = f.coeff(k);
            if ak != Complex64::new(0.0, 0.0) {
                p += ak * table.get(k, n);
            }
        }
        let hn = p / divisor;
        h.set_coeff(n, hn);
        table.set_linear(n, hn);
    }

    // residual by direct substitution
    let fh = compose(&f.series(m), &h, m);
    let mut residual = 0.0f64;
    for n in 1..=m {
        let rot = h.coeff(n) * lambda.powi(n as i32);
        residual = residual.max((fh.coeff(n) - rot).norm());
    }
    if residual > tol {
        return Err(Error::Domain(format!(
            "linearization residual {residual:.3e} exceeds tolerance {tol:.3e}"
        )));
    }

    let radius_estimate = radius_from_window(&h, m);
    Ok(LinearizationResult {
        h,
        min_divisor,
        radius_estimate,
        residual,
    })
}

/// Growth-rate surrogate over the trailing window `n in [M/2, M]`.
fn radius_from_window(h: &Series, m: usize) -> RadiusEstimate {
    let start = (m / 2).max(2);
    let mut rate = 0.0f64;
    for n in start..=m {
        let mag = h.coeff(n).norm();
        if mag > 0.0 {
            rate = rate.max(mag.powf(1.0 / (n as f64 - 1.0)));
        }
    }
    if rate == 0.0 {
        RadiusEstimate::Infinite
    } else {
        RadiusEstimate::Finite(1.0 / rate)
    }
}

/// Largest coefficient magnitude of `f o g - g o f` over orders
/// `2..=m`. Exactly zero for a series with itself and for two
/// rotations.
pub fn commutator_residual(f: &Series, g: &Series, m: usize) -> f64 {
    let fg = compose(f, g, m);
    let gf = compose(g, f, m);
    fg.sub(&gf).max_coeff_norm_from(2)
}

/// Builds the commuting family `f_k = h0 o R_(alpha_k) o h0^{-1}`
/// truncated at `m`. `h0` must have linear coefficient exactly 1.
pub fn synth_commuting_family(
    h0: &Series,
    alphas: &RotationVector,
    m: usize,
) -> Result<Vec<PowerSeriesGerm>> {
    if h0.linear() != Complex64::new(1.0, 0.0) {
        return Err(Error::Domain(
            "conjugating series must have linear coefficient 1".into(),
        ));
    }
    let h0_inv = series_invert(h0, m)?;
    let mut out = Vec::with_capacity(alphas.dim());
    for alpha in alphas.alphas() {
        let lambda = lambda_of(alpha);
        let scaled = h0_inv.scale(lambda); // R_alpha o h0^{-1}
        let f = compose(h0, &scaled, m);
        debug_assert!((f.linear() - lambda).norm() < 1e-15);
        let coeffs: Vec<Complex64> = (2..=m).map(|k| f.coeff(k)).collect();
        out.push(PowerSeriesGerm::new(alpha.clone(), coeffs)?);
    }
    Ok(out)
}

/// Outcome of the one-h-serves-all check.
#[derive(Clone, Debug)]
pub struct SimultaneousCheck {
    pub linearizable: bool,
    /// The candidate conjugacy, taken from the first germ.
    pub h: Series,
    /// Per-germ defect: largest coefficient of `h^{-1} o f_k o h - R_(alpha_k)`.
    pub residuals: Vec<f64>,
}

/// Tests whether the single linearization of the first germ conjugates
/// every member of the family to its rotation. The family must commute
/// within `tol` pairwise.
pub fn simultaneous_check(
    germs: &[PowerSeriesGerm],
    m: usize,
    tol: f64,
) -> Result<SimultaneousCheck> {
    if germs.is_empty() {
        return Err(Error::Domain("family must be nonempty".into()));
    }
    let series: Vec<Series> = germs.iter().map(|g| g.series(m)).collect();
    for i in 0..series.len() {
        for j in i + 1..series.len() {
            let r = commutator_residual(&series[i], &series[j], m);
            if r > tol {
                return Err(Error::CommutationViolated { residual: r, tol });
            }
        }
    }
    let lin = linearize(&germs[0], m, tol.max(1e-9))?;
    let h_inv = series_invert(&lin.h, m)?;
    let mut residuals = Vec::with_capacity(germs.len());
    let mut linearizable = true;
    for (germ, f) in germs.iter().zip(&series) {
        let conj = compose(&h_inv, &compose(f, &lin.h, m), m);
        let rot = Series::rotation(lambda_of(germ.alpha()), m);
        let defect = conj.sub(&rot).max_coeff_norm_from(1);
        linearizable &= defect <= tol;
        residuals.push(defect);
    }
    Ok(SimultaneousCheck {
        linearizable,
        h: lin.h,
        residuals,
    })
}

/// Empirical radius versus the arithmetic bound.
#[derive(Clone, Debug)]
pub struct RadiusReport {
    pub r_est: RadiusEstimate,
    pub r_bound: RealScalar,
    /// `r_est / r_bound`; None when the estimate is the infinite
    /// sentinel. Reported, never asserted against a universal constant.
    pub ratio: Option<f64>,
}

pub fn radius_estimate_vs_bound(
    result: &LinearizationResult,
    b_value: &RealScalar,
    consts: &ConstantsConfig,
    bits: u32,
) -> RadiusReport {
    let r_bound = siegel_radius_bound(b_value, consts, bits);
    let ratio = result
        .radius_estimate
        .as_f64()
        .map(|r| r / r_bound.to_f64());
    RadiusReport {
        r_est: result.radius_estimate,
        r_bound,
        ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_exact_real;

    fn scalar(expr: &str) -> RealScalar {
        RealScalar::from_exact(parse_exact_real(expr).unwrap())
    }

    fn rv(exprs: &[&str]) -> RotationVector {
        RotationVector::new(exprs.iter().map(|e| scalar(e)).collect()).unwrap()
    }

    fn h0_small(m: usize) -> Series {
        let mut h = Series::identity(m);
        h.set_coeff(2, Complex64::new(0.1, 0.0));
        h
    }

    #[test]
    fn lambda_on_unit_circle() {
        let l = lambda_of(&scalar("sqrt2m1"));
        assert!((l.norm() - 1.0).abs() < 1e-15);
        // e^(2 pi i (sqrt2 - 1)): angle 2 pi * 0.41421356...
        let angle = 2.0 * std::f64::consts::PI * (std::f64::consts::SQRT_2 - 1.0);
        assert!((l.re - angle.cos()).abs() < 1e-14);
        assert!((l.im - angle.sin()).abs() < 1e-14);
    }

    #[test]
    fn linearize_rotation_is_identity() {
        let f = PowerSeriesGerm::rotation(scalar("sqrt2m1"));
        let r = linearize(&f, 16, 1e-12).unwrap();
        assert_eq!(r.residual, 0.0);
        assert_eq!(r.radius_estimate, RadiusEstimate::Infinite);
        assert!(r.h.sub(&Series::identity(16)).max_coeff_norm_from(1) == 0.0);
    }

    #[test]
    fn linearize_quadratic_h2() {
        let alpha = scalar("sqrt2m1");
        let f = PowerSeriesGerm::new(alpha, vec![Complex64::new(1.0, 0.0)]).unwrap();
        let r = linearize(&f, 8, 1e-6).unwrap();
        let l = f.lambda();
        let expected = Complex64::new(1.0, 0.0) / (l * l - l);
        assert!((r.h.coeff(2) - expected).norm() < 1e-14);
    }

    #[test]
    fn synth_rotations_from_identity() {
        let v = rv(&["sqrt2m1", "sqrt3m1"]);
        let fam = synth_commuting_family(&Series::identity(16), &v, 16).unwrap();
        for (g, a) in fam.iter().zip(v.alphas()) {
            assert_eq!(g.alpha().to_f64(), a.to_f64());
            for k in 2..=16 {
                assert_eq!(g.coeff(k), Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn synth_order_two_coefficient() {
        let v = rv(&["sqrt2m1"]);
        let fam = synth_commuting_family(&h0_small(8), &v, 8).unwrap();
        let l = fam[0].lambda();
        let expected = Complex64::new(0.1, 0.0) * (l * l - l);
        assert!((fam[0].coeff(2) - expected).norm() < 1e-15);
    }

    #[test]
    fn synth_family_commutes() {
        let v = rv(&["sqrt2m1", "sqrt3m1"]);
        let fam = synth_commuting_family(&h0_small(32), &v, 32).unwrap();
        let s0 = fam[0].series(32);
        let s1 = fam[1].series(32);
        assert!(commutator_residual(&s0, &s1, 32) <= 1e-12);
    }

    #[test]
    fn commutator_exact_zeroes() {
        let f = h0_small(12).scale(Complex64::from_polar(1.0, 0.3));
        assert_eq!(commutator_residual(&f, &f, 12), 0.0);
        let ra = Series::rotation(Complex64::from_polar(1.0, 0.9), 12);
        let rb = Series::rotation(Complex64::from_polar(1.0, 1.7), 12);
        assert_eq!(commutator_residual(&ra, &rb, 12), 0.0);
    }

    #[test]
    fn commutator_quadratic_formula() {
        let l = Complex64::from_polar(1.0, 0.4);
        let mu = Complex64::from_polar(1.0, 1.2);
        let mut f = Series::rotation(l, 4);
        f.set_coeff(2, Complex64::new(1.0, 0.0));
        let mut g = Series::rotation(mu, 4);
        g.set_coeff(2, Complex64::new(1.0, 0.0));
        let fg = compose(&f, &g, 4);
        let gf = compose(&g, &f, 4);
        let diff = fg.coeff(2) - gf.coeff(2);
        let expected = (l + mu * mu) - (mu + l * l);
        assert!((diff - expected).norm() < 1e-15);
    }

    #[test]
    fn round_trip_recovers_conjugacy() {
        let v = rv(&["sqrt2m1", "sqrt3m1"]);
        let h0 = h0_small(64);
        let fam = synth_commuting_family(&h0, &v, 64).unwrap();
        let chk = simultaneous_check(&fam, 64, 1e-9).unwrap();
        assert!(chk.linearizable);
        assert!(chk.h.sub(&h0).max_coeff_norm_from(2) < 1e-8);
        for r in &chk.residuals {
            assert!(*r < 1e-9);
        }
    }

    #[test]
    fn perturbed_family_violates_commutation() {
        let v = rv(&["sqrt2m1", "sqrt3m1"]);
        let mut fam = synth_commuting_family(&h0_small(32), &v, 32).unwrap();
        let mut coeffs = fam[1].coeffs_tail().to_vec();
        coeffs[0] += Complex64::new(1e-3, 0.0);
        fam[1] = PowerSeriesGerm::new(fam[1].alpha().clone(), coeffs).unwrap();
        let r = simultaneous_check(&fam, 32, 1e-9);
        assert!(matches!(r, Err(Error::CommutationViolated { .. })));
    }

    #[test]
    fn radius_window_on_known_series() {
        // geometric h_n = c^(n-1): the window value is exactly 1/c
        let m = 40;
        let c = 2.5f64;
        let mut h = Series::identity(m);
        for n in 2..=m {
            h.set_coeff(n, Complex64::new(c.powi(n as i32 - 1), 0.0));
        }
        match radius_from_window(&h, m) {
            RadiusEstimate::Finite(r) => assert!((r - 1.0 / c).abs() < 1e-12),
            _ => panic!("expected finite estimate"),
        }
        // all-ones coefficients (z/(1-z)) give radius 1
        let mut ones = Series::identity(m);
        for n in 2..=m {
            ones.set_coeff(n, Complex64::new(1.0, 0.0));
        }
        match radius_from_window(&ones, m) {
            RadiusEstimate::Finite(r) => assert!((r - 1.0).abs() < 1e-12),
            _ => panic!("expected finite estimate"),
        }
    }

    #[test]
    fn radius_report_shapes() {
        let f = PowerSeriesGerm::rotation(scalar("golden"));
        let lin = linearize(&f, 8, 1e-9).unwrap();
        let b = RealScalar::zero();
        let rep = radius_estimate_vs_bound(&lin, &b, &ConstantsConfig::default(), 96);
        assert_eq!(rep.r_est, RadiusEstimate::Infinite);
        assert!(rep.ratio.is_none());
        assert!((rep.r_bound.to_f64() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn golden_radius_beats_high_quotient_surrogate() {
        // ordering only: the golden rotation linearizes with a larger
        // empirical radius than a rotation with a huge partial quotient
        // the coefficients of these linearizations grow geometrically,
        // so the absolute substitution residual is not meaningful here;
        // opt out of the gate
        let m = 64;
        let fq = PowerSeriesGerm::new(scalar("golden"), vec![Complex64::new(1.0, 0.0)]).unwrap();
        let r_golden = linearize(&fq, m, f64::INFINITY).unwrap();
        // alpha with continued fraction [0; 1, 10^4, 1, 10^4, ...]:
        // the root of x^2 + Mx - M with M = 10^4 (larger quotients
        // overflow f64 coefficients at this order)
        let bad = scalar("(-10000+1*sqrt(100040000))/2");
        let fb = PowerSeriesGerm::new(bad, vec![Complex64::new(1.0, 0.0)]).unwrap();
        let r_bad = linearize(&fb, m, f64::INFINITY).unwrap();
        let (a, b) = (
            r_golden.radius_estimate.as_f64().unwrap(),
            r_bad.radius_estimate.as_f64().unwrap(),
        );
        assert!(
            a > b,
            "golden radius {a:.3e} should exceed surrogate {b:.3e}"
        );
    }
}
