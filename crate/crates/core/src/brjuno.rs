//! Brjuno-type sums along words, exact finite-depth minimization over
//! words, the arithmetic height bound, and the radius bound derived
//! from it.
//!
//! The two variants of the summand are `log(1/a)` (variant B) and
//! `log log(e/a)` (variant B'); the latter is positive on all of (0,1),
//! which keeps prefix sums valid lower bounds for the search in both
//! variants.

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::gauss::{gauss_step, RotationVector};
use crate::interval;
use crate::scalar::{ConstantsConfig, RealScalar};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Which summand to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BrjunoVariant {
    B,
    BPrime,
}

/// One summand of a partial sum: the depth, the product of pivot
/// coordinates up to (excluding) this depth, and the term value.
#[derive(Clone, Debug)]
pub struct BrjunoTerm {
    pub depth: usize,
    pub pi: RealScalar,
    pub term: RealScalar,
}

/// A partial sum of B or B' along a word, with its per-term ledger.
#[derive(Clone, Debug)]
pub struct BrjunoSum {
    pub variant: BrjunoVariant,
    pub word: Vec<usize>,
    pub terms: Vec<BrjunoTerm>,
    pub value: RealScalar,
    pub depth: usize,
}

/// Result of the finite-depth minimization over words.
#[derive(Clone, Debug)]
pub struct WordSearchResult {
    pub best_word: Vec<usize>,
    /// A certified enclosure of the minimum; the infimum over infinite
    /// words is only bounded below by this value.
    pub best_value: RealScalar,
    pub nodes_expanded: u64,
    /// True when the search covered every word of the requested depth,
    /// i.e. the value equals the exhaustive minimum.
    pub proof: bool,
    /// Words excluded because their orbit failed, with the reason.
    pub excluded: Vec<(Vec<usize>, String)>,
}

/// Search state: a word prefix with its orbit head and running sum.
#[derive(Clone)]
struct Prefix {
    word: Vec<usize>,
    vec: RotationVector,
    pi: RealScalar,
    value: RealScalar,
    terms: Vec<BrjunoTerm>,
}

impl Prefix {
    fn root(alpha: &RotationVector) -> Prefix {
        Prefix {
            word: Vec::new(),
            vec: alpha.clone(),
            pi: RealScalar::one(),
            value: RealScalar::zero(),
            terms: Vec::new(),
        }
    }

    fn extend(&self, w: usize, variant: BrjunoVariant, bits: u32) -> Result<Prefix> {
        let coord = self.vec.alpha(w);
        let factor = summand(coord, variant, bits)?;
        let term = self.pi.mul(&factor);
        let step = gauss_step(&self.vec, w)?;
        let mut word = self.word.clone();
        word.push(w);
        let mut terms = self.terms.clone();
        terms.push(BrjunoTerm {
            depth: self.word.len(),
            pi: self.pi.clone(),
            term: term.clone(),
        });
        Ok(Prefix {
            word,
            vec: step.image,
            pi: self.pi.mul(coord),
            value: self.value.add(&term),
            terms,
        })
    }
}

fn summand(coord: &RealScalar, variant: BrjunoVariant, bits: u32) -> Result<RealScalar> {
    match variant {
        BrjunoVariant::B => coord.ln_recip(bits),
        BrjunoVariant::BPrime => coord.loglog_e(bits),
    }
}

fn check_word(word: &[usize], n: usize) -> Result<()> {
    for &w in word {
        if w == 0 || w > n {
            return Err(Error::Domain(format!("word entry {w} out of range 1..={n}")));
        }
    }
    Ok(())
}

/// Partial sum of the chosen variant along `word`. The empty word sums
/// to zero by convention, which keeps prefix bounds well-founded.
pub fn brjuno_partial(
    alpha: &RotationVector,
    word: &[usize],
    variant: BrjunoVariant,
    bits: u32,
) -> Result<BrjunoSum> {
    check_word(word, alpha.dim())?;
    let mut state = Prefix::root(alpha);
    for (depth, &w) in word.iter().enumerate() {
        state = state.extend(w, variant, bits).map_err(|e| e.at_depth(depth))?;
    }
    Ok(BrjunoSum {
        variant,
        word: word.to_vec(),
        terms: state.terms,
        value: state.value,
        depth: word.len(),
    })
}

/// Recomputes the partial sum value along a word at a given precision.
fn value_along(
    alpha: &RotationVector,
    word: &[usize],
    variant: BrjunoVariant,
    bits: u32,
) -> Result<RealScalar> {
    Ok(brjuno_partial(alpha, word, variant, bits)?.value)
}

/// Best-first branch-and-bound minimization of the partial sum over all
/// words of length `depth`.
///
/// Both summands are nonnegative on the image domain, so a prefix's
/// partial sum is a valid lower bound for all of its extensions; the
/// search is therefore exact. Near-equal finalists are separated by
/// recomputing their sums at doubled precision; if they remain
/// inseparable at `max_bits` the lexicographically smallest word is
/// returned, which keeps the result independent of exploration order.
pub fn brjuno_minimize(
    alpha: &RotationVector,
    depth: usize,
    variant: BrjunoVariant,
    bits: u32,
    max_bits: u32,
) -> Result<WordSearchResult> {
    if depth == 0 {
        return Err(Error::Domain("search depth must be at least 1".into()));
    }
    let n = alpha.dim();
    let mut heap: BinaryHeap<Reverse<HeapNode>> = BinaryHeap::new();
    let mut complete: Vec<Prefix> = Vec::new();
    let mut excluded: Vec<(Vec<usize>, String)> = Vec::new();
    let mut best_hi: Option<Dyadic> = None;
    let mut nodes_expanded: u64 = 0;

    heap.push(Reverse(HeapNode(Prefix::root(alpha))));
    while let Some(Reverse(HeapNode(node))) = heap.pop() {
        if let Some(bh) = &best_hi {
            // heap is ordered by lower bound: once it exceeds the best
            // certified upper bound nothing better remains
            if node.value.lo() > bh {
                break;
            }
        }
        if node.word.len() == depth {
            let hi = node.value.hi().clone();
            best_hi = Some(match best_hi.take() {
                Some(b) => b.min(hi),
                None => hi,
            });
            complete.push(node);
            continue;
        }
        nodes_expanded += 1;
        for w in 1..=n {
            match node.extend(w, variant, bits) {
                Ok(child) => {
                    if let Some(bh) = &best_hi {
                        if child.value.lo() > bh {
                            continue;
                        }
                    }
                    heap.push(Reverse(HeapNode(child)));
                }
                Err(e) => {
                    let mut word = node.word.clone();
                    word.push(w);
                    excluded.push((word, e.to_string()));
                }
            }
        }
    }

    if complete.is_empty() {
        return Err(Error::Domain(
            "every word of the requested depth failed; inputs are rationally dependent".into(),
        ));
    }

    // resolve overlapping finalists deterministically
    complete.sort_by(|a, b| a.value.lo().cmp(b.value.lo()).then(a.word.cmp(&b.word)));
    let mut winner = complete[0].clone();
    for other in complete.iter().skip(1) {
        if other.value.lo() > winner.value.hi() {
            continue; // certified worse
        }
        let (w, o) = separate(
            alpha,
            &winner.word,
            &other.word,
            variant,
            bits,
            max_bits,
        )?;
        let prefer_other = match w.hi() < o.lo() {
            true => false,
            false if o.hi() < w.lo() => true,
            // inseparable at the cap: certified tie, lexicographic order
            false => other.word < winner.word,
        };
        if prefer_other {
            winner = other.clone();
            winner.value = o;
        } else if w.lo() > winner.value.lo() {
            winner.value = w;
        }
    }

    let proof = excluded.is_empty();
    Ok(WordSearchResult {
        best_word: winner.word.clone(),
        best_value: winner.value,
        nodes_expanded,
        proof,
        excluded,
    })
}

/// Refines two finalists until their enclosures separate or the
/// precision cap is reached.
fn separate(
    alpha: &RotationVector,
    a: &[usize],
    b: &[usize],
    variant: BrjunoVariant,
    bits: u32,
    max_bits: u32,
) -> Result<(RealScalar, RealScalar)> {
    let mut p = bits;
    let mut va = value_along(alpha, a, variant, p)?;
    let mut vb = value_along(alpha, b, variant, p)?;
    while !(va.hi() < vb.lo() || vb.hi() < va.lo()) {
        if p >= max_bits {
            break;
        }
        p = (p.saturating_mul(2)).min(max_bits);
        va = value_along(alpha, a, variant, p)?;
        vb = value_along(alpha, b, variant, p)?;
    }
    Ok((va, vb))
}

struct HeapNode(Prefix);

impl PartialEq for HeapNode {
    fn eq(&self, other: &Self) -> bool {
        self.0.value.lo() == other.0.value.lo() && self.0.word == other.0.word
    }
}
impl Eq for HeapNode {}
impl PartialOrd for HeapNode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapNode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .value
            .lo()
            .cmp(other.0.value.lo())
            .then_with(|| self.0.word.cmp(&other.0.word))
    }
}

/// Height regime: the plain logarithmic height function, or the
/// doubly-logarithmic one used when no periodic orbits are present.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeightRegime {
    Log,
    LogLog,
}

/// Arithmetic height bound along a word:
/// `sum_j pi_j * t(a^(j)_(w(j))) + C'` where
/// `t(a) = (1/2pi) log(1/a) + C` in the log regime and
/// `t(a) = (1/2pi) log log(e/a)` in the loglog regime.
pub fn height_bound(
    alpha: &RotationVector,
    word: &[usize],
    regime: HeightRegime,
    consts: &ConstantsConfig,
    bits: u32,
) -> Result<RealScalar> {
    check_word(word, alpha.dim())?;
    let inv_two_pi = RealScalar::from_interval(
        interval::pi(bits + 8).mul_bigint(&2.into(), bits + 8).recip(bits + 8),
        bits + 8,
    );
    let c_univ = RealScalar::from_rational(consts.c_univ.clone());
    let mut vec = alpha.clone();
    let mut pi_prod = RealScalar::one();
    let mut sum = RealScalar::zero();
    for (depth, &w) in word.iter().enumerate() {
        let coord = vec.alpha(w).clone();
        let t = match regime {
            HeightRegime::Log => {
                let l = coord.ln_recip(bits).map_err(|e| e.at_depth(depth))?;
                l.mul(&inv_two_pi).add(&c_univ)
            }
            HeightRegime::LogLog => {
                let l = coord.loglog_e(bits).map_err(|e| e.at_depth(depth))?;
                l.mul(&inv_two_pi)
            }
        };
        sum = sum.add(&pi_prod.mul(&t));
        let step = gauss_step(&vec, w).map_err(|e| e.at_depth(depth))?;
        pi_prod = pi_prod.mul(&coord);
        vec = step.image;
    }
    Ok(sum.add(&RealScalar::from_rational(consts.c_prime.clone())))
}

/// The radius bound `C_radius * exp(-2 pi b)`.
pub fn siegel_radius_bound(b_value: &RealScalar, consts: &ConstantsConfig, bits: u32) -> RealScalar {
    let two_pi = interval::pi(bits + 8).mul_bigint(&2.into(), bits + 8);
    let exponent = b_value.interval().mul(&two_pi, bits + 8).neg();
    let r = exponent.exp(bits).mul_rational(&consts.c_radius, bits);
    RealScalar::from_interval(r, bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_exact_real;
    use crate::scalar::DEFAULT_MAX_PRECISION_BITS;

    fn rv(exprs: &[&str]) -> RotationVector {
        RotationVector::new(
            exprs
                .iter()
                .map(|e| RealScalar::from_exact(parse_exact_real(e).unwrap()))
                .collect(),
        )
        .unwrap()
    }

    const LOG_PHI: f64 = 0.48121182505960347;

    #[test]
    fn golden_single_term_is_log_phi() {
        let v = rv(&["golden"]);
        let s = brjuno_partial(&v, &[1], BrjunoVariant::B, 128).unwrap();
        assert!((s.value.to_f64() - LOG_PHI).abs() < 1e-12);
        assert_eq!(s.terms.len(), 1);
        assert_eq!(s.depth, 1);
    }

    #[test]
    fn golden_depth_60_closed_form() {
        let v = rv(&["golden"]);
        let word = vec![1usize; 60];
        let s = brjuno_partial(&v, &word, BrjunoVariant::B, 128).unwrap();
        let expected = 3.0 * LOG_PHI;
        assert!((s.value.to_f64() - expected).abs() < 1e-9);
        assert!(s.value.width().to_f64() < 1e-20);
    }

    #[test]
    fn empty_word_sums_to_zero() {
        let v = rv(&["sqrt2m1"]);
        let s = brjuno_partial(&v, &[], BrjunoVariant::B, 128).unwrap();
        assert_eq!(s.value.certified_sign().unwrap(), 0);
        assert!(s.terms.is_empty());
    }

    #[test]
    fn pi_products_obey_half_power_bound() {
        let v = rv(&["sqrt2m1", "sqrt3m1"]);
        let s = brjuno_partial(&v, &[1, 2, 2, 1, 2], BrjunoVariant::B, 128).unwrap();
        for t in &s.terms {
            if t.depth >= 1 {
                let bound = RealScalar::from_rational(num_rational::BigRational::new(
                    1.into(),
                    num_bigint::BigInt::from(1) << (t.depth - 1),
                ));
                assert_eq!(
                    t.pi.certified_cmp(&bound).unwrap(),
                    std::cmp::Ordering::Less
                );
            }
        }
    }

    #[test]
    fn bprime_terms_positive() {
        let v = rv(&["sqrt2m1", "sqrt3m1"]);
        let s = brjuno_partial(&v, &[2, 1, 1], BrjunoVariant::BPrime, 128).unwrap();
        for t in &s.terms {
            assert_eq!(t.term.certified_sign().unwrap(), 1);
        }
    }

    #[test]
    fn minimize_n1_unique_word() {
        let v = rv(&["golden"]);
        let r = brjuno_minimize(&v, 4, BrjunoVariant::B, 128, DEFAULT_MAX_PRECISION_BITS).unwrap();
        assert_eq!(r.best_word, vec![1, 1, 1, 1]);
        assert!(r.proof);
        let direct = brjuno_partial(&v, &[1, 1, 1, 1], BrjunoVariant::B, 128).unwrap();
        assert!((r.best_value.to_f64() - direct.value.to_f64()).abs() < 1e-25);
    }

    #[test]
    fn minimize_matches_exhaustive_enumeration() {
        let v = rv(&["sqrt2m1", "sqrt3m1"]);
        for variant in [BrjunoVariant::B, BrjunoVariant::BPrime] {
            let r = brjuno_minimize(&v, 3, variant, 128, DEFAULT_MAX_PRECISION_BITS).unwrap();
            // exhaustive oracle over all 8 words
            let mut best: Option<(f64, Vec<usize>)> = None;
            for bits in 0..8u32 {
                let word: Vec<usize> =
                    (0..3).map(|k| ((bits >> k) & 1) as usize + 1).collect();
                let val = brjuno_partial(&v, &word, variant, 128).unwrap().value.to_f64();
                if best.as_ref().is_none_or(|(b, _)| val < *b) {
                    best = Some((val, word));
                }
            }
            let (bval, bword) = best.unwrap();
            assert_eq!(r.best_word, bword);
            assert!((r.best_value.to_f64() - bval).abs() < 1e-25);
            assert!(r.proof);
        }
    }

    #[test]
    fn minimize_monotone_in_depth() {
        let v = rv(&["sqrt2m1", "sqrt3m1"]);
        let d3 = brjuno_minimize(&v, 3, BrjunoVariant::B, 128, DEFAULT_MAX_PRECISION_BITS).unwrap();
        let d4 = brjuno_minimize(&v, 4, BrjunoVariant::B, 128, DEFAULT_MAX_PRECISION_BITS).unwrap();
        assert!(d4.best_value.to_f64() >= d3.best_value.to_f64());
    }

    #[test]
    fn height_bound_golden_log_regime() {
        let v = rv(&["golden"]);
        let word = vec![1usize; 60];
        let consts = ConstantsConfig::new(
            num_rational::BigRational::from_integer(0.into()),
            Some(num_rational::BigRational::from_integer(0.into())),
            num_rational::BigRational::from_integer(1.into()),
        )
        .unwrap();
        let h = height_bound(&v, &word, HeightRegime::Log, &consts, 128).unwrap();
        // (1/2pi) * 3 log phi = 0.229756503...
        let expected = 3.0 * LOG_PHI / (2.0 * std::f64::consts::PI);
        assert!((h.to_f64() - expected).abs() < 1e-9);
        // with c_univ = c the bound gains c * sum(pi_j) = 2c (golden orbit)
        let c = num_rational::BigRational::new(3.into(), 10.into());
        let consts_c = ConstantsConfig::new(
            c.clone(),
            Some(num_rational::BigRational::from_integer(0.into())),
            num_rational::BigRational::from_integer(1.into()),
        )
        .unwrap();
        let hc = height_bound(&v, &word, HeightRegime::Log, &consts_c, 128).unwrap();
        assert!((hc.to_f64() - (expected + 2.0 * 0.3)).abs() < 1e-9);
    }

    #[test]
    fn height_bound_empty_word_is_c_prime() {
        let v = rv(&["sqrt2m1"]);
        let consts = ConstantsConfig::default();
        let h = height_bound(&v, &[], HeightRegime::Log, &consts, 128).unwrap();
        assert_eq!(h.to_f64(), 4.0);
    }

    #[test]
    fn radius_bound_values() {
        let consts = ConstantsConfig::default();
        let r0 = siegel_radius_bound(&RealScalar::zero(), &consts, 128);
        assert!((r0.to_f64() - 1.0).abs() < 1e-30);
        // b = 3 log phi gives phi^(-6 pi) = 1.14899...e-4
        let b = RealScalar::from_interval(
            crate::interval::Interval::from_rational(
                &num_rational::BigRational::new(
                    num_bigint::BigInt::from(14436354751788103u64),
                    num_bigint::BigInt::from(10000000000000000u64),
                ),
                160,
            ),
            160,
        );
        let r = siegel_radius_bound(&b, &consts, 128);
        assert!((r.to_f64() - 1.1490e-4).abs() < 1e-7);
        // doubling b squares the ratio to c_radius
        let b2 = b.mul_rational(&num_rational::BigRational::from_integer(2.into()));
        let r2 = siegel_radius_bound(&b2, &consts, 128);
        assert!((r2.to_f64() - r.to_f64() * r.to_f64()).abs() < 1e-12);
    }
}

#[cfg(test)]
mod width_probe {
    use super::*;
    use crate::parse::parse_exact_real;

    #[test]
    fn deep_orbit_width_stays_tight() {
        let v = RotationVector::new(vec![RealScalar::from_exact(
            parse_exact_real("golden").unwrap(),
        )])
        .unwrap();
        let s = brjuno_partial(&v, &vec![1usize; 60], BrjunoVariant::B, 128).unwrap();
        assert!(
            s.value.width().to_f64() < 1e-30,
            "width {:.3e}",
            s.value.width().to_f64()
        );
    }
}
