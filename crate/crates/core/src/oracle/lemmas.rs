//! Closed forms for the randomized algorithm's probabilities and the
//! summation inequalities used to bound its cost.

use std::cell::RefCell;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::perm::{pairs, NodeId, Permutation};

/// Probability that component `x` lies left of component `y`:
/// the fraction of pairs in `x × y` that `pi0` orders left to right.
pub fn left_right_probability(x: &[NodeId], y: &[NodeId], pi0: &Permutation) -> Result<Ratio<u64>> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut in_x = vec![false; pi0.len()];
    for &v in x {
        in_x[v] = true;
    }
    if y.iter().any(|&v| in_x[v]) {
        return Err(Error::Overlap);
    }
    let agree = x
        .iter()
        .flat_map(|&a| y.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| pi0.precedes(a, b))
        .count() as u64;
    Ok(Ratio::new(agree, (x.len() * y.len()) as u64))
}

/// Probability that a path component is laid out in the given order: the
/// fraction of its internal pairs that `pi0` orders the same way.
pub fn orientation_probability(path: &[NodeId], pi0: &Permutation) -> Result<Ratio<u64>> {
    if path.len() < 2 {
        return Err(Error::SingletonComponent);
    }
    let mut agree = 0u64;
    for i in 0..path.len() {
        for j in i + 1..path.len() {
            if pi0.precedes(path[i], path[j]) {
                agree += 1;
            }
        }
    }
    Ok(Ratio::new(agree, pairs(path.len() as u64)))
}

/// Harmonic numbers are kept exact up to this index.
pub const EXACT_HARMONIC_LIMIT: u64 = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub enum Harmonic {
    Exact(BigRational),
    Approx(f64),
}

impl Harmonic {
    pub fn to_f64(&self) -> f64 {
        match self {
            Harmonic::Exact(r) => ratio_f64(r),
            Harmonic::Approx(x) => *x,
        }
    }
}

fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

thread_local! {
    static HARMONIC: RefCell<Vec<BigRational>> = RefCell::new(vec![BigRational::zero()]);
}

fn exact_harmonic(s: u64) -> BigRational {
    HARMONIC.with(|cache| {
        let mut cache = cache.borrow_mut();
        while (cache.len() as u64) <= s {
            let k = cache.len() as u64;
            let next = cache.last().expect("seeded with H_0") + BigRational::new(BigInt::one(), BigInt::from(k));
            cache.push(next);
        }
        cache[s as usize].clone()
    })
}

/// `H_s = 1 + 1/2 + ... + 1/s`; exact up to [`EXACT_HARMONIC_LIMIT`].
pub fn harmonic_number(s: u64) -> Harmonic {
    if s <= EXACT_HARMONIC_LIMIT {
        Harmonic::Exact(exact_harmonic(s))
    } else {
        Harmonic::Approx(harmonic_f64(s))
    }
}

/// `H_s` in double precision, summed smallest term first.
pub fn harmonic_f64(s: u64) -> f64 {
    (1..=s).rev().map(|k| 1.0 / k as f64).sum()
}

/// Outcome of the three harmonic-sum inequalities on one series.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicBounds {
    /// `sum_i s_i / P_i <= H_S`.
    pub moving: bool,
    /// `sum_{i>=2} s_i^2 / C(P_i, 2) <= 2 H_S`.
    pub squared: bool,
    /// `sum_{i>=2} s_{i-1} s_i / C(P_i, 2) <= 2 H_S`.
    pub consecutive: bool,
    pub moving_sum: f64,
    pub squared_sum: f64,
    pub consecutive_sum: f64,
    pub harmonic: f64,
}

impl HarmonicBounds {
    pub fn all_hold(&self) -> bool {
        self.moving && self.squared && self.consecutive
    }
}

/// Evaluates the harmonic-sum inequalities exactly for the series `s`
/// (`P_i` is the prefix sum `s_1 + ... + s_i`). The two squared-type sums
/// start at `i = 2`, where `C(P_i, 2)` is positive.
pub fn check_harmonic_bounds(s: &[u64]) -> Result<HarmonicBounds> {
    if s.contains(&0) {
        return Err(Error::Config("series terms must be positive".into()));
    }
    let total: u64 = s.iter().sum();
    let h = exact_harmonic(total);
    let two_h = &h * BigRational::from_integer(BigInt::from(2));

    let frac = |num: u64, den: u64| BigRational::new(BigInt::from(num), BigInt::from(den));
    let mut moving = BigRational::zero();
    let mut squared = BigRational::zero();
    let mut consecutive = BigRational::zero();
    let mut prefix = 0u64;
    for (i, &si) in s.iter().enumerate() {
        prefix += si;
        moving += frac(si, prefix);
        if i >= 1 {
            let c = pairs(prefix);
            squared += frac(si * si, c);
            consecutive += frac(s[i - 1] * si, c);
        }
    }
    Ok(HarmonicBounds {
        moving: moving <= h,
        squared: squared <= two_h,
        consecutive: consecutive <= two_h,
        moving_sum: ratio_f64(&moving),
        squared_sum: ratio_f64(&squared),
        consecutive_sum: ratio_f64(&consecutive),
        harmonic: ratio_f64(&h),
    })
}

/// Largest `N` accepted by [`check_identity_lemmas`].
pub const IDENTITY_MAX_N: usize = 12;

const IDENTITY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    /// `sum_t [sum_i t_i a_i] prod_j b_j^t_j (1-b_j)^(1-t_j)`.
    pub expectation_left: f64,
    /// `sum_i a_i b_i`.
    pub expectation_right: f64,
    /// `sum_t [sum_i (1-t_i) a_i][sum_i t_i a_i] prod_j ...`.
    pub cross_left: f64,
    /// `sum_i b_i a_i (A - a_i)`.
    pub cross_right: f64,
    pub expectation_holds: bool,
    pub cross_holds: bool,
}

/// Evaluates both sides of the expectation identity and the cross-product
/// inequality by direct summation over all `t in {0,1}^N`.
pub fn check_identity_lemmas(a: &[f64], b: &[f64]) -> Result<IdentityCheck> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::InstanceMismatch {
            expected: n,
            actual: b.len(),
        });
    }
    if n > IDENTITY_MAX_N {
        return Err(Error::Capacity {
            what: "identity check",
            items: n,
            cap: IDENTITY_MAX_N,
        });
    }
    if b.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::Config("probabilities must lie in [0, 1]".into()));
    }
    let mut expectation_left = 0.0;
    let mut cross_left = 0.0;
    for t in 0u32..(1 << n) {
        let mut weight = 1.0;
        let mut on = 0.0;
        let mut off = 0.0;
        for i in 0..n {
            if t >> i & 1 == 1 {
                weight *= b[i];
                on += a[i];
            } else {
                weight *= 1.0 - b[i];
                off += a[i];
            }
        }
        expectation_left += on * weight;
        cross_left += off * on * weight;
    }
    let total: f64 = a.iter().sum();
    let expectation_right: f64 = a.iter().zip(b).map(|(x, p)| x * p).sum();
    let cross_right: f64 = a.iter().zip(b).map(|(x, p)| p * x * (total - x)).sum();
    let scale = |l: f64, r: f64| IDENTITY_TOL * 1f64.max(l.abs()).max(r.abs());
    Ok(IdentityCheck {
        expectation_holds: (expectation_left - expectation_right).abs() <= scale(expectation_left, expectation_right),
        cross_holds: cross_left <= cross_right + scale(cross_left, cross_right),
        expectation_left,
        expectation_right,
        cross_left,
        cross_right,
    })
}
