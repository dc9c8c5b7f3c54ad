//! Simultaneous Diophantine machinery: class membership scans, the
//! empirical best class constant, transference exponents, the dual
//! linear-form scan, and the constructive word selector with its
//! fitted-constant ledger.
//!
//! Scans are certified: distances to the lattice are computed on
//! outward enclosures, comparisons against the class bound escalate
//! precision when ambiguous, and reductions are deterministic
//! (lexicographic witness tie-break) regardless of thread count.

use crate::brjuno::{brjuno_partial, BrjunoVariant};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::gauss::{gauss_step, RotationVector};
use crate::interval::Interval;
use crate::scalar::RealScalar;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use std::cmp::Ordering;

/// Parameters of a Diophantine-class computation.
#[derive(Clone, Debug)]
pub struct DiophParams {
    pub c: BigRational,
    pub tau: BigRational,
    pub tau_prime: BigRational,
    pub q_max: u64,
    pub k_max: u64,
}

impl DiophParams {
    /// `tau_prime` is derived through transference when not given.
    pub fn new(
        n: u32,
        c: BigRational,
        tau: BigRational,
        tau_prime: Option<BigRational>,
        q_max: u64,
        k_max: u64,
    ) -> Result<DiophParams> {
        if !c.is_positive() {
            return Err(Error::Domain("class constant C must be positive".into()));
        }
        if q_max == 0 || k_max == 0 {
            return Err(Error::Domain("scan bounds must be at least 1".into()));
        }
        let tau_prime = match tau_prime {
            Some(t) => t,
            None => transference_forward(n, &tau)?,
        };
        Ok(DiophParams {
            c,
            tau,
            tau_prime,
            q_max,
            k_max,
        })
    }
}

/// Forward transference: `tau' = N tau + N - 1`. Exact on rationals.
pub fn transference_forward(n: u32, tau: &BigRational) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    if !tau.is_positive() {
        return Err(Error::Domain("tau must be positive".into()));
    }
    let nn = BigRational::from_integer(BigInt::from(n));
    Ok(&nn * tau + &nn - BigRational::one())
}

/// Inverse transference: `tau = (tau' + 1 - N)/N`. Exact on rationals.
pub fn transference_inverse(n: u32, tau_prime: &BigRational) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    let nn = BigRational::from_integer(BigInt::from(n));
    let tau = (tau_prime + BigRational::one() - &nn) / &nn;
    if !tau.is_positive() {
        return Err(Error::Domain(
            "inverse transference yields a nonpositive exponent".into(),
        ));
    }
    Ok(tau)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransferDirection {
    Forward,
    Inverse,
}

pub fn transference(n: u32, tau: &BigRational, direction: TransferDirection) -> Result<BigRational> {
    match direction {
        TransferDirection::Forward => transference_forward(n, tau),
        TransferDirection::Inverse => transference_inverse(n, tau),
    }
}

/// The worst denominator found by a scan, with its integer vector and
/// margin `q^tau * max_j dist(q a_j, Z)`.
#[derive(Clone, Debug)]
pub struct DcWitness {
    pub q: u64,
    pub p: Vec<BigInt>,
    pub margin: RealScalar,
}

#[derive(Clone, Debug)]
pub struct DcCheckResult {
    pub holds: bool,
    pub witness: DcWitness,
}

/// Exact distance of a dyadic point to the nearest integer.
fn dist_point(d: &Dyadic) -> Dyadic {
    let half = Dyadic::new(BigInt::one(), -1);
    let n = d.add(&half).floor_int();
    d.sub(&Dyadic::from_bigint(n)).abs()
}

/// Certified enclosure of `dist(x, Z)` over an interval, with a
/// nearest-integer representative for witness reporting.
fn dist_to_lattice(i: &Interval) -> (Interval, BigInt) {
    let half = Dyadic::new(BigInt::one(), -1);
    let witness = i.mid().add(&half).floor_int();
    let contains_int = i.lo().ceil_int() <= i.hi().floor_int();
    let d_lo = dist_point(i.lo());
    let d_hi = dist_point(i.hi());
    let inf = if contains_int {
        Dyadic::zero()
    } else {
        d_lo.clone().min(d_hi.clone())
    };
    let half_inside =
        i.lo().sub(&half).ceil_int() <= i.hi().sub(&half).floor_int();
    let sup = if half_inside {
        half
    } else {
        d_lo.max(d_hi)
    };
    (Interval::from_endpoints(inf, sup), witness)
}

/// `q^tau` as an enclosure; exact for integer exponents.
fn q_pow(q: u64, tau: &BigRational, bits: u32) -> Interval {
    Interval::from_int(q as i64).pow_rational(tau, bits)
}

/// A positive rational exponent `p/r` with small numerator and
/// denominator, used to compare powered margins exactly:
/// `q^(p/r) * d >= c  <=>  q^p * d^r >= c^r`.
#[derive(Clone, Copy, Debug)]
struct RatExp {
    p: u32,
    r: u32,
}

impl RatExp {
    fn of(tau: &BigRational) -> Result<RatExp> {
        if !tau.is_positive() {
            return Err(Error::Domain("exponent must be positive".into()));
        }
        let p = tau
            .numer()
            .to_u32()
            .filter(|&p| p <= 1024)
            .ok_or_else(|| Error::Domain("exponent numerator too large".into()))?;
        let r = tau
            .denom()
            .to_u32()
            .filter(|&r| r <= 1024)
            .ok_or_else(|| Error::Domain("exponent denominator too large".into()))?;
        Ok(RatExp { p, r })
    }

    /// `(base^p) * d^r` as an exact-endpoint enclosure; monotone proxy
    /// for `base^(p/r) * d`.
    fn margin_pow(&self, base: u64, d: &Interval, bits: u32) -> Interval {
        let b = BigInt::from(base).pow(self.p);
        let dr = if self.r == 1 {
            d.clone()
        } else {
            d.pow_int(self.r as u64, bits + 16)
        };
        dr.mul_bigint(&b, bits + 16)
    }

    /// `c^r`, the threshold the powered margin is compared against.
    fn threshold(&self, c: &BigRational) -> BigRational {
        let mut acc = BigRational::one();
        for _ in 0..self.r {
            acc *= c;
        }
        acc
    }

    /// Undoes the powering: the r-th root of a nonnegative enclosure.
    fn unpow(&self, i: &Interval, bits: u32) -> Interval {
        if self.r == 1 {
            return i.clone();
        }
        let root = BigRational::new(BigInt::one(), BigInt::from(self.r));
        let lo = if i.lo().is_zero() {
            Dyadic::zero()
        } else {
            Interval::point(i.lo().clone())
                .pow_rational(&root, bits)
                .lo()
                .clone()
        };
        let hi = if i.hi().is_zero() {
            Dyadic::zero()
        } else {
            Interval::point(i.hi().clone())
                .pow_rational(&root, bits)
                .hi()
                .clone()
        };
        Interval::from_endpoints(lo, hi)
    }
}

struct DcScan<'a> {
    alpha: &'a RotationVector,
    exp: RatExp,
    bits: u32,
}

impl DcScan<'_> {
    fn enclosures(&self, bits: u32) -> Vec<Interval> {
        self.alpha
            .alphas()
            .iter()
            .map(|a| a.at_bits(bits).interval().clone())
            .collect()
    }

    fn eval_bits(&self, q_max: u64, bits: u32) -> u32 {
        bits + 64 - q_max.leading_zeros()
    }

    /// Powered margin `q^p * (max_j dist(q a_j, Z))^r`, an exact
    /// monotone proxy for `q^tau * max_j dist(q a_j, Z)`.
    fn margin_pow(&self, encs: &[Interval], q: u64, bits: u32) -> (Interval, Vec<BigInt>) {
        let qb = BigInt::from(q);
        let mut max_d: Option<Interval> = None;
        let mut p = Vec::with_capacity(encs.len());
        for e in encs {
            let scaled = e.mul_bigint(&qb, bits + 16);
            let (d, n) = dist_to_lattice(&scaled);
            p.push(n);
            max_d = Some(match max_d {
                None => d,
                Some(m) => Interval::from_endpoints(
                    m.lo().clone().max(d.lo().clone()),
                    m.hi().clone().max(d.hi().clone()),
                ),
            });
        }
        let max_d = max_d.expect("nonempty vector");
        (self.exp.margin_pow(q, &max_d, bits), p)
    }

    /// Recomputes one powered margin at escalated precision.
    fn margin_pow_at(&self, q: u64, bits: u32) -> (Interval, Vec<BigInt>) {
        let encs = self.enclosures(bits + 64 - 1u64.max(q).leading_zeros());
        self.margin_pow(&encs, q, bits)
    }

    /// Total order on candidate witnesses: by powered margin with
    /// escalation, ties broken by q. Deterministic under any grouping.
    fn cmp_candidates(&self, a: u64, b: u64, max_bits: u32) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        let mut bits = self.bits;
        loop {
            let (ma, _) = self.margin_pow_at(a, bits);
            let (mb, _) = self.margin_pow_at(b, bits);
            if ma.hi() < mb.lo() {
                return Ordering::Less;
            }
            if mb.hi() < ma.lo() {
                return Ordering::Greater;
            }
            if bits >= max_bits {
                return a.cmp(&b);
            }
            bits = bits.saturating_mul(2).min(max_bits);
        }
    }
}

fn dc_scan_min<'a>(
    alpha: &'a RotationVector,
    tau: &BigRational,
    q_max: u64,
    bits: u32,
    max_bits: u32,
) -> Result<(Interval, DcWitness, DcScan<'a>)> {
    if q_max == 0 {
        return Err(Error::Domain("Q_max must be at least 1".into()));
    }
    let exp = RatExp::of(tau)?;
    let scan = DcScan { alpha, exp, bits };
    let encs = scan.enclosures(scan.eval_bits(q_max, bits));
    // pass 1: certified enclosure of the minimum powered margin
    let (min_lo, min_hi) = (1..=q_max)
        .into_par_iter()
        .fold(
            || None,
            |acc: Option<(Dyadic, Dyadic)>, q| {
                let (m, _) = scan.margin_pow(&encs, q, bits);
                Some(match acc {
                    None => (m.lo().clone(), m.hi().clone()),
                    Some((al, ah)) => (al.min(m.lo().clone()), ah.min(m.hi().clone())),
                })
            },
        )
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, x) | (x, None) => x,
                (Some((al, ah)), Some((bl, bh))) => Some((al.min(bl), ah.min(bh))),
            },
        )
        .expect("q_max >= 1");
    // pass 2: witnesses that could attain it
    let mut candidates: Vec<u64> = (1..=q_max)
        .into_par_iter()
        .filter(|&q| {
            let (m, _) = scan.margin_pow(&encs, q, bits);
            m.lo() <= &min_hi
        })
        .collect();
    candidates.sort_unstable();
    let mut best = candidates[0];
    for &c in candidates.iter().skip(1) {
        if scan.cmp_candidates(c, best, max_bits) == Ordering::Less {
            best = c;
        }
    }
    let (_, p) = scan.margin_pow(&encs, best, bits);
    // report the unpowered margin of the witness
    let margin = {
        let (mp, _) = scan.margin_pow(&encs, best, bits);
        scan.exp.unpow(&mp, bits)
    };
    Ok((
        Interval::from_endpoints(min_lo, min_hi),
        DcWitness {
            q: best,
            p,
            margin: RealScalar::from_interval(margin, bits),
        },
        scan,
    ))
}

/// Checks membership in the class `max_j |q a_j - p_j| >= C / q^tau`
/// for all `1 <= q <= q_max`. The witness is the margin-minimizing q.
pub fn dc_check(
    alpha: &RotationVector,
    c: &BigRational,
    tau: &BigRational,
    q_max: u64,
    bits: u32,
    max_bits: u32,
) -> Result<DcCheckResult> {
    if !c.is_positive() {
        return Err(Error::Domain("class constant C must be positive".into()));
    }
    let (min_pow, witness, scan) = dc_scan_min(alpha, tau, q_max, bits, max_bits)?;
    let threshold = scan.exp.threshold(c);
    let holds = if min_pow.lo().to_rational() >= threshold {
        true
    } else if min_pow.hi().to_rational() < threshold {
        false
    } else {
        // ambiguous at base precision: re-examine the witness q
        let mut b = bits;
        loop {
            let (m, _) = scan.margin_pow_at(witness.q, b);
            if m.lo().to_rational() >= threshold {
                break true;
            }
            if m.hi().to_rational() < threshold {
                break false;
            }
            if b >= max_bits {
                return Err(Error::UndecidableAtPrecision {
                    bits: max_bits,
                    context: format!("margin at q = {} sits on the class bound", witness.q),
                });
            }
            b = b.saturating_mul(2).min(max_bits);
        }
    };
    Ok(DcCheckResult { holds, witness })
}

#[derive(Clone, Debug)]
pub struct DcEstimate {
    /// Certified enclosure of `min_q q^tau max_j dist(q a_j, Z)`;
    /// membership holds for every constant at most this value.
    pub value: RealScalar,
    pub witness: DcWitness,
}

/// Empirical best class constant over the scanned range.
pub fn dc_estimate(
    alpha: &RotationVector,
    tau: &BigRational,
    q_max: u64,
    bits: u32,
    max_bits: u32,
) -> Result<DcEstimate> {
    let (min_pow, witness, scan) = dc_scan_min(alpha, tau, q_max, bits, max_bits)?;
    let value = scan.exp.unpow(&min_pow, bits);
    Ok(DcEstimate {
        value: RealScalar::from_interval(value, bits),
        witness,
    })
}

/// A dual-form scan witness: the integer vector, the absolute dot
/// product against `(a_1, ..., a_N, 1)`, and the normalized margin
/// `|dot| * ||k||^tau'`.
#[derive(Clone, Debug)]
pub struct DualWitness {
    pub vector: Vec<BigInt>,
    pub dot_abs: RealScalar,
    pub margin: RealScalar,
}

#[derive(Clone, Debug)]
pub struct DualCheckResult {
    pub holds: bool,
    pub witness: DualWitness,
}

struct DualScan<'a> {
    alpha: &'a RotationVector,
    exp: RatExp,
    bits: u32,
    k_max: i64,
}

impl DualScan<'_> {
    fn enclosures(&self, bits: u32) -> Vec<Interval> {
        self.alpha
            .alphas()
            .iter()
            .map(|a| a.at_bits(bits).interval().clone())
            .collect()
    }

    /// Recursion over coordinates visiting every canonical nonzero
    /// vector (first nonzero coordinate positive) of sup norm at most
    /// `k_max`, carrying the partial dot product and norm. The visitor
    /// receives the vector, |dot| and the powered margin
    /// `|dot|^r * norm^p`.
    #[allow(clippy::too_many_arguments)]
    fn rec<F: FnMut(&[i64], &Interval, &Interval)>(
        &self,
        encs: &[Interval],
        idx: usize,
        all_zero: bool,
        norm: i64,
        partial: &Interval,
        prefix: &mut Vec<i64>,
        bits: u32,
        f: &mut F,
    ) {
        let n = encs.len();
        if idx == n {
            let q_lo = if all_zero { 1 } else { -self.k_max };
            for q in q_lo..=self.k_max {
                prefix[n] = q;
                let dot = partial.add(&Interval::from_int(q), bits + 16);
                let dot_abs = dot.abs();
                let vnorm = norm.max(q.abs()) as u64;
                let dr = if self.exp.r == 1 {
                    dot_abs.clone()
                } else {
                    dot_abs.pow_int(self.exp.r as u64, bits + 16)
                };
                let m = dr.mul_bigint(&BigInt::from(vnorm).pow(self.exp.p), bits + 16);
                f(prefix, &dot_abs, &m);
            }
            prefix[n] = 0;
            return;
        }
        let x_lo = if all_zero { 0 } else { -self.k_max };
        for x in x_lo..=self.k_max {
            prefix[idx] = x;
            let contrib = if x == 0 {
                partial.clone()
            } else {
                partial.add(&encs[idx].mul_bigint(&BigInt::from(x), bits + 16), bits + 16)
            };
            self.rec(
                encs,
                idx + 1,
                all_zero && x == 0,
                norm.max(x.abs()),
                &contrib,
                prefix,
                bits,
                f,
            );
        }
        prefix[idx] = 0;
    }

    fn margin_pow_at(&self, v: &[i64], bits: u32) -> (Interval, Interval) {
        let encs = self.enclosures(bits + 32);
        let n = encs.len();
        let mut dot = Interval::from_int(v[n]);
        for (j, e) in encs.iter().enumerate() {
            if v[j] != 0 {
                dot = dot.add(&e.mul_bigint(&BigInt::from(v[j]), bits + 16), bits + 16);
            }
        }
        let dot_abs = dot.abs();
        let norm = v.iter().map(|x| x.abs()).max().expect("nonempty") as u64;
        let dr = if self.exp.r == 1 {
            dot_abs.clone()
        } else {
            dot_abs.pow_int(self.exp.r as u64, bits + 16)
        };
        let m = dr.mul_bigint(&BigInt::from(norm).pow(self.exp.p), bits + 16);
        (dot_abs, m)
    }

    /// Exact dot product for escalation on surd-backed input.
    fn exact_dot(&self, v: &[i64]) -> Option<crate::surd::ExactReal> {
        let n = self.alpha.dim();
        let mut acc = crate::surd::ExactReal::from_rational(BigRational::from_integer(
            BigInt::from(v[n]),
        ));
        for (j, a) in self.alpha.alphas().iter().enumerate() {
            let s = a.source()?;
            acc = acc.add(&s.mul_bigint(&BigInt::from(v[j])));
        }
        Some(acc)
    }

    fn cmp_candidates(&self, a: &[i64], b: &[i64], max_bits: u32) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        let mut bits = self.bits;
        loop {
            let (_, ma) = self.margin_pow_at(a, bits);
            let (_, mb) = self.margin_pow_at(b, bits);
            if ma.hi() < mb.lo() {
                return Ordering::Less;
            }
            if mb.hi() < ma.lo() {
                return Ordering::Greater;
            }
            if bits >= max_bits {
                // lexicographic on (q, p) per the deterministic-reduction
                // contract
                let n = a.len() - 1;
                return a[n].cmp(&b[n]).then_with(|| a[..n].cmp(&b[..n]));
            }
            bits = bits.saturating_mul(2).min(max_bits);
        }
    }
}

/// Checks `|dot(a, k)| >= C' / ||k||^tau'` over all nonzero integer
/// vectors with sup norm at most `k_max`; equivalently, that every
/// normalized margin `|dot| ||k||^tau'` is at least `C'`. Sign pairs
/// carry equal margins, so only canonical vectors are scanned.
pub fn dual_form_check(
    alpha: &RotationVector,
    c_prime: &BigRational,
    tau_prime: &BigRational,
    k_max: u64,
    bits: u32,
    max_bits: u32,
) -> Result<DualCheckResult> {
    if !c_prime.is_positive() {
        return Err(Error::Domain("C' must be positive".into()));
    }
    if k_max == 0 || k_max > i64::MAX as u64 {
        return Err(Error::Domain("K_max out of range".into()));
    }
    let exp = RatExp::of(tau_prime)?;
    let scan = DualScan {
        alpha,
        exp,
        bits,
        k_max: k_max as i64,
    };
    let encs = scan.enclosures(bits + 32);
    let n = alpha.dim();

    // parallelize over the leading coordinate; each task runs the
    // sequential recursion on its slice of the grid
    let leading: Vec<i64> = (0..=k_max as i64).collect();
    let per_task: Vec<(Dyadic, Dyadic, Vec<(Vec<i64>, Dyadic)>)> = leading
        .par_iter()
        .map(|&x0| {
            let mut min_lo = None::<Dyadic>;
            let mut min_hi = None::<Dyadic>;
            let mut local: Vec<(Vec<i64>, Dyadic)> = Vec::new();
            let mut prefix = vec![0i64; n + 1];
            prefix[0] = x0;
            let partial = if x0 == 0 {
                Interval::zero()
            } else {
                encs[0].mul_bigint(&BigInt::from(x0), bits + 16)
            };
            let mut visit = |v: &[i64], _d: &Interval, m: &Interval| {
                let lo = m.lo().clone();
                let hi = m.hi().clone();
                min_lo = Some(match min_lo.take() {
                    None => lo.clone(),
                    Some(x) => x.min(lo.clone()),
                });
                min_hi = Some(match min_hi.take() {
                    None => hi,
                    Some(x) => x.min(m.hi().clone()),
                });
                local.push((v.to_vec(), lo));
                // keep the local candidate list small
                if local.len() > 64 {
                    let bound = min_hi.clone().expect("set above");
                    local.retain(|(_, l)| l <= &bound);
                }
            };
            scan.rec(
                &encs,
                1,
                x0 == 0,
                x0.abs(),
                &partial,
                &mut prefix,
                bits,
                &mut visit,
            );
            let bound = min_hi.clone().expect("nonempty subtree");
            local.retain(|(_, l)| l <= &bound);
            (min_lo.expect("nonempty"), min_hi.expect("nonempty"), local)
        })
        .collect();

    let mut min_lo: Option<Dyadic> = None;
    let mut min_hi: Option<Dyadic> = None;
    for (lo, hi, _) in &per_task {
        min_lo = Some(match min_lo.take() {
            None => lo.clone(),
            Some(x) => x.min(lo.clone()),
        });
        min_hi = Some(match min_hi.take() {
            None => hi.clone(),
            Some(x) => x.min(hi.clone()),
        });
    }
    let min_lo = min_lo.expect("nonempty scan");
    let min_hi = min_hi.expect("nonempty scan");

    let mut candidates: Vec<Vec<i64>> = per_task
        .into_iter()
        .flat_map(|(_, _, local)| local)
        .filter(|(_, lo)| lo <= &min_hi)
        .map(|(v, _)| v)
        .collect();
    candidates.sort_unstable_by(|a, b| {
        let n = a.len() - 1;
        a[n].cmp(&b[n]).then_with(|| a[..n].cmp(&b[..n]))
    });
    let mut best = candidates[0].clone();
    for c in candidates.iter().skip(1) {
        if scan.cmp_candidates(c, &best, max_bits) == Ordering::Less {
            best = c.clone();
        }
    }
    let (dot_abs, margin_pow) = scan.margin_pow_at(&best, bits);
    let margin = scan.exp.unpow(&margin_pow, bits);

    let threshold = scan.exp.threshold(c_prime);
    let holds = if min_lo.to_rational() >= threshold {
        true
    } else if min_hi.to_rational() < threshold {
        false
    } else {
        let mut b = bits;
        loop {
            let (_, m) = scan.margin_pow_at(&best, b);
            if m.lo().to_rational() >= threshold {
                break true;
            }
            if m.hi().to_rational() < threshold {
                break false;
            }
            // an exactly zero dot product certifies failure
            if let Some(d) = scan.exact_dot(&best) {
                if d.is_zero() {
                    break false;
                }
            }
            if b >= max_bits {
                return Err(Error::UndecidableAtPrecision {
                    bits: max_bits,
                    context: format!("dual margin at {:?} sits on the bound", best),
                });
            }
            b = b.saturating_mul(2).min(max_bits);
        }
    };
    Ok(DualCheckResult {
        holds,
        witness: DualWitness {
            vector: best.iter().map(|&x| BigInt::from(x)).collect(),
            dot_abs: RealScalar::from_interval(dot_abs, bits),
            margin: RealScalar::from_interval(margin, bits),
        },
    })
}

/// Word selection strategy for the constructive walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectorMode {
    /// Follow the constructive case analysis driven by the class
    /// inequality at each step.
    Proof,
    /// Always move to the largest image coordinate.
    Greedy,
}

/// One step of the constructive walk.
#[derive(Clone, Debug)]
pub struct AppendixStep {
    /// Pivot used at this depth (1-based).
    pub w: usize,
    /// round(1/alpha_w) at this step.
    pub q: BigInt,
    /// Signed remainder: 1/alpha_w - q; |beta| is the pivot image.
    pub beta: RealScalar,
    /// The pivot coordinate before the step.
    pub alpha_w: RealScalar,
    /// The selected next pivot j(w).
    pub chosen_j: usize,
    /// The class-constant recursion value C_n (with the fitted kappa).
    pub c_n: RealScalar,
}

/// The walk, its word, and the fitted constants.
#[derive(Clone, Debug)]
pub struct AppendixWordTrace {
    pub word: Vec<usize>,
    pub steps: Vec<AppendixStep>,
    /// Largest constant (capped at 1) such that
    /// `alpha^(n+1) >= kappa^(n+1) C prod_(j<n) alpha_j^(tau'-1) alpha_n^tau`
    /// holds along the walk; fitted, never assumed.
    pub kappa: Option<RealScalar>,
    pub mode: SelectorMode,
    pub c: BigRational,
    pub tau: BigRational,
    pub tau_prime: BigRational,
}

/// Compares an exact-backed scalar against a recomputable bound,
/// escalating shared precision until decided.
fn cmp_escalating<F>(
    lhs: &RealScalar,
    rhs: F,
    bits: u32,
    max_bits: u32,
    what: &str,
) -> Result<Ordering>
where
    F: Fn(u32) -> RealScalar,
{
    let mut b = bits;
    loop {
        let l = lhs.at_bits(b);
        let r = rhs(b);
        if l.hi() < r.lo() {
            return Ok(Ordering::Less);
        }
        if r.hi() < l.lo() {
            return Ok(Ordering::Greater);
        }
        if b >= max_bits {
            return Err(Error::UndecidableAtPrecision {
                bits: max_bits,
                context: what.into(),
            });
        }
        b = b.saturating_mul(2).min(max_bits);
    }
}

/// Walks `depth` steps from `alpha`, choosing the next pivot by the
/// requested mode, and fits the constant recursion along the way.
///
/// In proof mode the certified case analysis is: with
/// `1/alpha_w = q + beta`, accept `j = w` if
/// `|beta| alpha_w >= C/q^tau`; otherwise find the smallest `k != w`
/// with `dist(q alpha_k, Z) >= C/q^tau` (its absence disproves class
/// membership at this scale) and take `j = k` when
/// `alpha_k |beta| <= (C/q^tau)/2`, else `j = w`.
pub fn select_word_appendix(
    alpha: &RotationVector,
    c: &BigRational,
    tau: &BigRational,
    depth: usize,
    mode: SelectorMode,
    start_w: usize,
    bits: u32,
    max_bits: u32,
) -> Result<AppendixWordTrace> {
    if depth == 0 {
        return Err(Error::Domain("depth must be at least 1".into()));
    }
    if !c.is_positive() || !tau.is_positive() {
        return Err(Error::Domain("C and tau must be positive".into()));
    }
    let n = alpha.dim();
    if start_w == 0 || start_w > n {
        return Err(Error::Domain(format!("start pivot {start_w} out of range")));
    }
    let tau_prime = transference_forward(n as u32, tau)?;

    let mut vec = alpha.clone();
    let mut w = start_w;
    let mut word = Vec::with_capacity(depth);
    let mut raw: Vec<(usize, BigInt, RealScalar, RealScalar, usize)> = Vec::new();
    let mut pivots: Vec<RealScalar> = Vec::new(); // alpha^(n)_{w(n)}

    for depth_n in 0..depth {
        let alpha_w = vec.alpha(w).clone();
        let step = gauss_step(&vec, w).map_err(|e| e.at_depth(depth_n))?;
        let q = step.a[w - 1].clone();
        let tilde_w = step.image.alpha(w).clone();
        // beta = 1/alpha_w - q = -eps_w * |beta|
        let beta = if step.eps[w - 1] > 0 {
            tilde_w.neg()
        } else {
            tilde_w.clone()
        };
        let qu = q
            .to_u64()
            .ok_or_else(|| Error::Domain("q exceeds u64 in selector".into()))?;
        let rhs = |b: u32| -> RealScalar {
            let pw = q_pow(qu, tau, b);
            RealScalar::from_interval(
                Interval::from_rational(c, b + 8).div(&pw, b),
                b,
            )
        };
        let j = match mode {
            SelectorMode::Greedy => {
                let mut best = 1usize;
                for k in 2..=n {
                    let cand = step.image.alpha(k);
                    match cand.certified_cmp(step.image.alpha(best)) {
                        Ok(Ordering::Greater) => best = k,
                        Ok(_) => {}
                        Err(e) => return Err(e.at_depth(depth_n)),
                    }
                }
                best
            }
            SelectorMode::Proof => {
                let lhs = tilde_w.mul(&alpha_w);
                let case1 = cmp_escalating(
                    &lhs,
                    rhs,
                    bits,
                    max_bits,
                    "pivot margin against the class bound",
                )
                .map_err(|e| e.at_depth(depth_n))?;
                if case1 != Ordering::Less {
                    w
                } else {
                    // find k != w realizing the class inequality at q
                    let mut found: Option<usize> = None;
                    for k in 1..=n {
                        if k == w {
                            continue;
                        }
                        let qa = vec.alpha(k).mul_bigint(&q);
                        let m = qa.nearest_integer().map_err(|e| e.at_depth(depth_n))?;
                        let dist = qa
                            .sub(&RealScalar::from_rational(BigRational::from_integer(m)))
                            .abs();
                        match cmp_escalating(
                            &dist,
                            rhs,
                            bits,
                            max_bits,
                            "coordinate distance against the class bound",
                        ) {
                            Ok(Ordering::Less) => {}
                            Ok(_) => {
                                found = Some(k);
                                break;
                            }
                            Err(e) => return Err(e.at_depth(depth_n)),
                        }
                    }
                    let k = found.ok_or(Error::SelectorFailed {
                        depth: depth_n,
                        q: q.to_string(),
                    })?;
                    // threshold test: alpha_k |beta| <= (C/q^tau)/2
                    let prod = vec.alpha(k).mul(&tilde_w);
                    let half_rhs = |b: u32| -> RealScalar {
                        rhs(b).mul_rational(&BigRational::new(BigInt::one(), BigInt::from(2)))
                    };
                    match cmp_escalating(
                        &prod,
                        half_rhs,
                        bits,
                        max_bits,
                        "threshold test in the selector",
                    )
                    .map_err(|e| e.at_depth(depth_n))?
                    {
                        Ordering::Greater => w,
                        _ => k,
                    }
                }
            }
        };
        word.push(w);
        pivots.push(alpha_w.clone());
        raw.push((w, q, beta, alpha_w, j));
        vec = step.image;
        w = j;
    }

    // fit kappa: the largest k <= 1 with
    //   alpha^(n+1)_{w(n+1)} >= k^(n+1) C prod_{j<n} a_j^{tau'-1} a_n^tau
    // i.e. k = min_n R_n^{1/(n+1)} for the ratios R_n below.
    let kappa = if depth >= 2 {
        let mut prod = Interval::one(); // prod_{j<n} a_j^{tau'-1}
        let tp_m1 = &tau_prime - BigRational::one();
        let mut kap: Option<Interval> = None;
        for nn in 0..depth - 1 {
            let a_n = pivots[nn].at_bits(bits);
            let a_next = pivots[nn + 1].at_bits(bits);
            let denom = Interval::from_rational(c, bits + 8)
                .mul(&prod, bits + 8)
                .mul(&a_n.interval().pow_rational(tau, bits + 8), bits + 8);
            let ratio = a_next.interval().div(&denom, bits + 8);
            let root = ratio
                .ln(bits + 8)
                .mul_rational(
                    &BigRational::new(BigInt::one(), BigInt::from(nn as i64 + 1)),
                    bits + 8,
                )
                .exp(bits);
            kap = Some(match kap {
                None => root,
                Some(k) => Interval::from_endpoints(
                    k.lo().clone().min(root.lo().clone()),
                    k.hi().clone().min(root.hi().clone()),
                ),
            });
            prod = prod.mul(&a_n.interval().pow_rational(&tp_m1, bits + 8), bits + 8);
        }
        let k = kap.expect("depth >= 2");
        // cap at 1, as in "for k taken small enough"
        let one = Dyadic::one();
        let capped = Interval::from_endpoints(
            k.lo().clone().min(one.clone()),
            k.hi().clone().min(one),
        );
        Some(RealScalar::from_interval(capped, bits))
    } else {
        None
    };

    // evaluate the C_n recursion with the fitted kappa's lower bound
    let kappa_lo = kappa
        .as_ref()
        .map(|k| Interval::point(k.lo().clone()))
        .unwrap_or_else(Interval::one);
    let tp_m1 = &tau_prime - BigRational::one();
    let mut c_n = Interval::from_rational(c, bits + 8);
    let mut steps = Vec::with_capacity(depth);
    for (w_n, q, beta, alpha_w, j) in raw {
        let next_c = kappa_lo
            .mul(&c_n, bits + 8)
            .mul(&alpha_w.at_bits(bits).interval().pow_rational(&tp_m1, bits + 8), bits);
        steps.push(AppendixStep {
            w: w_n,
            q,
            beta,
            alpha_w,
            chosen_j: j,
            c_n: RealScalar::from_interval(c_n.clone(), bits),
        });
        c_n = next_c;
    }

    Ok(AppendixWordTrace {
        word,
        steps,
        kappa,
        mode,
        c: c.clone(),
        tau: tau.clone(),
        tau_prime,
    })
}

/// Per-term envelope comparison for a constructive walk: each summand
/// `pi_m log(1/alpha^(m))` of the B-sum along the selected word is
/// checked against the explicit envelope
/// `pi_m (m log(1/kappa) + log(1/C) + tau'' log(1/pi_m))`
/// with `tau'' = max(tau, tau'-1)` and the fitted kappa.
#[derive(Clone, Debug)]
pub struct EnvelopeTerm {
    pub depth: usize,
    pub term: f64,
    pub bound: f64,
    pub within: bool,
}

#[derive(Clone, Debug)]
pub struct EnvelopeReport {
    pub terms: Vec<EnvelopeTerm>,
    pub all_within: bool,
    pub kappa: f64,
}

pub fn prop53_envelope_check(
    alpha: &RotationVector,
    trace: &AppendixWordTrace,
    bits: u32,
) -> Result<EnvelopeReport> {
    let kappa = trace
        .kappa
        .as_ref()
        .ok_or_else(|| Error::Domain("trace carries no fitted kappa (depth < 2)".into()))?;
    let sum = brjuno_partial(alpha, &trace.word, BrjunoVariant::B, bits)?;
    let tau2 = if trace.tau >= &trace.tau_prime - BigRational::one() {
        trace.tau.clone()
    } else {
        &trace.tau_prime - BigRational::one()
    };
    // log(1/kappa) from the certified lower endpoint; kappa <= 1 so this
    // is nonnegative
    let kap_lo = Interval::point(kappa.lo().clone());
    let log_inv_kappa = kap_lo.ln(bits).neg();
    let log_inv_c = Interval::from_rational(&trace.c, bits + 8).ln(bits).neg();
    let mut terms = Vec::new();
    let mut all_within = true;
    for t in sum.terms.iter().skip(1) {
        let m = t.depth;
        let pi = t.pi.at_bits(bits);
        let log_inv_pi = pi.interval().ln(bits).neg();
        let inner = log_inv_kappa
            .mul_bigint(&BigInt::from(m as i64), bits)
            .add(&log_inv_c, bits)
            .add(&log_inv_pi.mul_rational(&tau2, bits), bits);
        let bound = pi.interval().mul(&inner, bits);
        let within = t.term.hi() <= bound.lo();
        all_within &= within;
        terms.push(EnvelopeTerm {
            depth: m,
            term: t.term.to_f64(),
            bound: bound.to_f64_mid(),
            within,
        });
    }
    Ok(EnvelopeReport {
        terms,
        all_within,
        kappa: kappa.to_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_exact_real;

    fn rv(exprs: &[&str]) -> RotationVector {
        RotationVector::new(
            exprs
                .iter()
                .map(|e| RealScalar::from_exact(parse_exact_real(e).unwrap()))
                .collect(),
        )
        .unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn transference_known_values() {
        assert_eq!(
            transference_forward(2, &rat(1, 1)).unwrap(),
            rat(3, 1)
        );
        // N = 1 fixes tau' = tau
        assert_eq!(
            transference_forward(1, &rat(7, 10)).unwrap(),
            rat(7, 10)
        );
        // exact round trip
        let t = rat(7, 10);
        let fwd = transference_forward(3, &t).unwrap();
        assert_eq!(transference_inverse(3, &fwd).unwrap(), t);
        assert!(transference_inverse(2, &rat(1, 1)).is_err());
    }

    #[test]
    fn dc_estimate_sqrt2_small_range() {
        // min over q <= 10 of q * dist(q sqrt2, Z) is 0.34314... at q = 2
        let v = rv(&["sqrt2m1"]);
        let est = dc_estimate(&v, &rat(1, 1), 10, 128, 4096).unwrap();
        assert_eq!(est.witness.q, 2);
        assert!((est.value.to_f64() - 0.3431457505076198).abs() < 1e-12);
    }

    #[test]
    fn dc_check_thresholds() {
        let v = rv(&["sqrt2m1"]);
        let ok = dc_check(&v, &rat(3, 10), &rat(1, 1), 1000, 128, 4096).unwrap();
        assert!(ok.holds);
        let bad = dc_check(&v, &rat(35, 100), &rat(1, 1), 10, 128, 4096).unwrap();
        assert!(!bad.holds);
        assert_eq!(bad.witness.q, 2);
    }

    #[test]
    fn dc_estimate_consistency_with_check() {
        let v = rv(&["sqrt2m1", "sqrt3m1"]);
        let est = dc_estimate(&v, &rat(1, 2), 2000, 128, 4096).unwrap();
        let c = est.value.lo().to_rational() * rat(999999999999, 1000000000000);
        if c.is_positive() {
            let chk = dc_check(&v, &c, &rat(1, 2), 2000, 128, 4096).unwrap();
            assert!(chk.holds);
        }
    }

    #[test]
    fn dual_check_tiny_scan() {
        // K = 1, alpha = sqrt2-1: minimum |p(sqrt2-1)+q| over the
        // canonical vectors is sqrt2-1 at (1, 0)
        let v = rv(&["sqrt2m1"]);
        let r = dual_form_check(&v, &rat(41, 100), &rat(3, 1), 1, 128, 4096).unwrap();
        assert!(r.holds);
        assert_eq!(r.witness.vector, vec![BigInt::from(1), BigInt::from(0)]);
        assert!((r.witness.dot_abs.to_f64() - 0.41421356237309515).abs() < 1e-12);
        let r2 = dual_form_check(&v, &rat(42, 100), &rat(3, 1), 1, 128, 4096).unwrap();
        assert!(!r2.holds);
    }

    #[test]
    fn dual_check_finds_violation_at_larger_norms() {
        let v = rv(&["sqrt2m1", "sqrt3m1"]);
        let r = dual_form_check(&v, &rat(1, 1), &rat(3, 1), 100, 96, 4096).unwrap();
        assert!(!r.holds);
        // the witness margin is certified below 1
        assert!(r.witness.margin.hi().to_f64() < 1.0);
    }

    #[test]
    fn selector_n1_is_constant_word() {
        let v = rv(&["sqrt2m1"]);
        for mode in [SelectorMode::Proof, SelectorMode::Greedy] {
            let t = select_word_appendix(&v, &rat(3, 10), &rat(1, 1), 5, mode, 1, 128, 4096)
                .unwrap();
            assert_eq!(t.word, vec![1, 1, 1, 1, 1]);
        }
    }

    #[test]
    fn selector_greedy_first_step() {
        // from the pivot-1 step the image is (0.41421..., 0.23267...),
        // so the greedy successor of w = 1 is 1
        let v = rv(&["sqrt2m1", "sqrt3m1"]);
        let t = select_word_appendix(
            &v,
            &rat(3, 10),
            &rat(1, 1),
            2,
            SelectorMode::Greedy,
            1,
            128,
            4096,
        )
        .unwrap();
        assert_eq!(t.steps[0].chosen_j, 1);
        assert_eq!(t.word[1], 1);
    }

    #[test]
    fn selector_proof_mode_walk_with_scanned_constant() {
        let v = rv(&["sqrt2m1", "sqrt3m1"]);
        let est = dc_estimate(&v, &rat(1, 1), 2000, 128, 4096).unwrap();
        // the class constant degrades along the walk; scan down from the
        // depth-0 estimate until the certified tests pass at every depth
        let mut c = est.value.lo().to_rational() * rat(9, 10);
        let t = loop {
            match select_word_appendix(&v, &c, &rat(1, 1), 8, SelectorMode::Proof, 1, 128, 4096) {
                Ok(t) => break t,
                Err(Error::SelectorFailed { .. }) => c = c * rat(1, 2),
                Err(e) => panic!("unexpected error: {e}"),
            }
        };
        assert_eq!(t.word.len(), 8);
        // C_n positive and decreasing
        for pair in t.steps.windows(2) {
            assert_eq!(pair[0].c_n.certified_sign().unwrap(), 1);
            assert!(pair[1].c_n.hi() < pair[0].c_n.lo() || pair[1].c_n.to_f64() < pair[0].c_n.to_f64());
        }
        let kappa = t.kappa.as_ref().unwrap();
        assert_eq!(kappa.certified_sign().unwrap(), 1);
        // envelope holds with the fitted constants
        let rep = prop53_envelope_check(&v, &t, 128).unwrap();
        assert!(rep.all_within);
    }

    #[test]
    fn selector_failure_reports_depth_and_q() {
        // an absurdly large class constant fails immediately
        let v = rv(&["sqrt2m1", "sqrt3m1"]);
        let r = select_word_appendix(
            &v,
            &rat(1000, 1),
            &rat(1, 1),
            3,
            SelectorMode::Proof,
            1,
            128,
            4096,
        );
        assert!(matches!(r, Err(Error::SelectorFailed { depth: 0, .. })));
    }
}
