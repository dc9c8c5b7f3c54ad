//! The N-dimensional Gauss map and its orbits along words.
//!
//! One application of the map at pivot `w` sends a tuple of irrationals
//! `(a_1, ..., a_N)` in `(0,1)` to the tuple of fractional data
//! obtained by dividing through the pivot coordinate: with
//! `hat_i = a_i` for `i != w` and `hat_w = 1`, the integers `k_i`
//! minimizing `|k a_w - hat_i|` define the image coordinates
//! `|k_i a_w - hat_i| / a_w`, all in `(0, 1/2)`. For `N = 1` this is
//! the nearest-integer continued fraction map.
//!
//! Every nearest-integer and sign decision is certified: exact ties
//! (which certify rational dependence among the inputs) surface as
//! errors rather than being broken arbitrarily.

use crate::error::{Error, Result};
use crate::scalar::RealScalar;
use num_bigint::BigInt;

/// An N-tuple of rotation numbers, each certified to lie in (0, 1).
///
/// Irrationality and rational independence are contracts of the caller
/// and cannot be checked in general; violations surface downstream as
/// `ExactTie` or `UndecidableAtPrecision`.
#[derive(Clone, Debug)]
pub struct RotationVector {
    alphas: Vec<RealScalar>,
}

impl RotationVector {
    /// Strict constructor: every coordinate must be certified inside (0, 1).
    pub fn new(alphas: Vec<RealScalar>) -> Result<RotationVector> {
        if alphas.is_empty() {
            return Err(Error::Domain("rotation vector must be nonempty".into()));
        }
        for (i, a) in alphas.iter().enumerate() {
            if a.certified_sign()? <= 0 {
                return Err(Error::Domain(format!(
                    "coordinate {} is not certified positive",
                    i + 1
                )));
            }
            let one_minus = RealScalar::one().sub(a);
            if one_minus.certified_sign()? <= 0 {
                return Err(Error::Domain(format!(
                    "coordinate {} is not certified below 1",
                    i + 1
                )));
            }
        }
        Ok(RotationVector { alphas })
    }

    /// Normalizing constructor: reduces each coordinate mod 1 first.
    /// Reduction is explicit, never silent: integer-valued inputs are
    /// rejected by the (0,1) check afterwards.
    pub fn new_reduced(alphas: Vec<RealScalar>) -> Result<RotationVector> {
        let reduced = alphas
            .into_iter()
            .map(|a| {
                let k = a.floor_int()?;
                Ok(a.sub(&RealScalar::from_rational(
                    num_rational::BigRational::from_integer(k),
                )))
            })
            .collect::<Result<Vec<_>>>()?;
        RotationVector::new(reduced)
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    /// 1-based coordinate access.
    pub fn alpha(&self, i: usize) -> &RealScalar {
        &self.alphas[i - 1]
    }

    pub fn alphas(&self) -> &[RealScalar] {
        &self.alphas
    }
}

/// One application of the Gauss map: the pivot, the minimizing
/// integers, the signs, the hatted tuple and the image tuple.
#[derive(Clone, Debug)]
pub struct GaussStep {
    /// Pivot index, 1-based.
    pub w: usize,
    /// Nearest-integer minimizers `a_i`.
    pub a: Vec<BigInt>,
    /// Signs of `a_i * alpha_w - hat_i`; always +1 or -1.
    pub eps: Vec<i8>,
    /// Image tuple, every coordinate certified in (0, 1/2).
    pub image: RotationVector,
    /// The hatted tuple: `alpha_i` for `i != w`, exactly 1 at the pivot.
    pub hatted: Vec<RealScalar>,
}

/// Applies the Gauss map once at pivot `w` (1-based).
pub fn gauss_step(alpha: &RotationVector, w: usize) -> Result<GaussStep> {
    let n = alpha.dim();
    if w == 0 || w > n {
        return Err(Error::Domain(format!("pivot {w} out of range 1..={n}")));
    }
    let alpha_w = alpha.alpha(w);
    let mut a = Vec::with_capacity(n);
    let mut eps = Vec::with_capacity(n);
    let mut images = Vec::with_capacity(n);
    let mut hatted = Vec::with_capacity(n);
    let half = RealScalar::from_rational(num_rational::BigRational::new(
        BigInt::from(1),
        BigInt::from(2),
    ));
    for i in 1..=n {
        let hat = if i == w {
            RealScalar::one()
        } else {
            alpha.alpha(i).clone()
        };
        // t = hat / alpha_w; the minimizer of |k alpha_w - hat| over
        // integers k is the nearest integer to t, and the image
        // coordinate is |t - k| because alpha_w > 0
        let t = hat.div(alpha_w)?;
        let k = t.nearest_integer()?;
        let diff = RealScalar::from_rational(num_rational::BigRational::from_integer(k.clone()))
            .sub(&t);
        let tilde = diff.abs();
        // verify the nearest-integer property against both neighbours
        for nb in [&k - 1, &k + 1] {
            let nd = RealScalar::from_rational(num_rational::BigRational::from_integer(nb))
                .sub(&t)
                .abs();
            if tilde.certified_cmp(&nd)? != std::cmp::Ordering::Less {
                return Err(Error::ExactTie {
                    context: format!("coordinate {i}: no strict nearest integer"),
                });
            }
        }
        match tilde.certified_sign()? {
            0 => {
                return Err(Error::ExactTie {
                    context: format!(
                        "coordinate {i} maps to exact zero: rational dependence certified"
                    ),
                })
            }
            s if s < 0 => unreachable!("absolute value is nonnegative"),
            _ => {}
        }
        // strict upper bound 1/2; an exact half is a tie
        match tilde.certified_cmp(&half)? {
            std::cmp::Ordering::Less => {}
            _ => {
                return Err(Error::ExactTie {
                    context: format!("coordinate {i} maps to 1/2: tie certified"),
                })
            }
        }
        // sgn(a_i alpha_w - hat_i) = sgn(a_i - t) since alpha_w > 0
        let e = diff.certified_sign()?;
        debug_assert!(e != 0);
        a.push(k);
        eps.push(e);
        images.push(tilde);
        hatted.push(hat);
    }
    let image = RotationVector::new(images)?;
    Ok(GaussStep {
        w,
        a,
        eps,
        image,
        hatted,
    })
}

/// Iterates the Gauss map along a finite word of 1-based pivot indices.
/// A failing step is reported with its depth attached.
pub fn gauss_orbit(alpha: &RotationVector, word: &[usize]) -> Result<Vec<GaussStep>> {
    let mut steps: Vec<GaussStep> = Vec::with_capacity(word.len());
    for (depth, &w) in word.iter().enumerate() {
        let current = if let Some(prev) = steps.last() {
            &prev.image
        } else {
            alpha
        };
        let step = gauss_step(current, w).map_err(|e| e.at_depth(depth))?;
        steps.push(step);
    }
    Ok(steps)
}
