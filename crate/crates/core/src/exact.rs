//! Exact arithmetic helpers: small rationals for tree coordinates, certified
//! comparisons against powers of `e`, and a tiny outward-rounded interval type.

use std::cmp::Ordering;

use num::bigint::BigInt;
use num::rational::{BigRational, Ratio};
use num::{One, Signed, ToPrimitive, Zero};

/// Rational used for radii, offsets and tree distances.
pub type Rational = Ratio<i64>;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Formats a rational as `p/q` (or `p` when integral).
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn fmt_big_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q`, `p` or a finite decimal such as `0.3` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().ok()?;
        let q: i64 = q.trim().parse().ok()?;
        if q == 0 {
            return None;
        }
        return Some(rat(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let whole: i64 = if whole.is_empty() || whole == "-" {
            0
        } else {
            whole.parse().ok()?
        };
        let denom = 10i64.checked_pow(frac.len() as u32)?;
        let frac: i64 = frac.parse().ok()?;
        let mag = whole.abs().checked_mul(denom)?.checked_add(frac)?;
        return Some(rat(if negative { -mag } else { mag }, denom));
    }
    s.parse::<i64>().ok().map(int)
}

pub fn to_big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Enclosure `lo <= e <= hi` from the Taylor series truncated after `terms` terms.
fn e_bounds(terms: u32) -> (BigRational, BigRational) {
    let mut sum = BigRational::zero();
    let mut term = BigRational::one();
    for k in 0..terms {
        if k > 0 {
            term /= BigInt::from(k);
        }
        sum += &term;
    }
    // Tail after `terms` terms is below 2 / terms!.
    let tail = &term * BigRational::new(BigInt::from(2), BigInt::from(terms.max(1)));
    let hi = &sum + tail;
    (sum, hi)
}

/// Compares `e^n` with a positive rational `r`. The answer is exact: `e^n` is
/// irrational for `n >= 1`, so refinement always terminates.
pub fn cmp_exp(n: u32, r: &BigRational) -> Ordering {
    if n == 0 {
        return BigRational::one().cmp(r);
    }
    if !r.is_positive() {
        return Ordering::Greater;
    }
    let mut terms = 24;
    loop {
        let (lo, hi) = e_bounds(terms);
        let lo_n = num::pow(lo, n as usize);
        let hi_n = num::pow(hi, n as usize);
        if &lo_n > r {
            return Ordering::Greater;
        }
        if &hi_n < r {
            return Ordering::Less;
        }
        terms *= 2;
        assert!(terms < 1 << 16, "exp comparison failed to separate");
    }
}

/// `d <= e^{-n}` for a positive rational distance `d`.
pub fn le_exp_neg(d: &Rational, n: u32) -> bool {
    // d <= e^{-n}  <=>  e^n <= 1/d
    let inv = to_big(&d.recip());
    cmp_exp(n, &inv) != Ordering::Greater
}

/// Largest `n` with `d <= e^{-n}`, i.e. `floor(-ln d)`, for `0 < d <= 1`.
pub fn floor_neg_ln(d: &Rational) -> u32 {
    assert!(
        d.is_positive() && *d <= int(1),
        "distance out of (0,1]: {d}"
    );
    let mut n = 0;
    while le_exp_neg(d, n + 1) {
        n += 1;
    }
    n
}

/// Closed interval of reals with outward rounding on every operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

fn down(x: f64) -> f64 {
    next_toward(x, f64::NEG_INFINITY)
}

fn up(x: f64) -> f64 {
    next_toward(x, f64::INFINITY)
}

fn next_toward(x: f64, target: f64) -> f64 {
    if x.is_nan() || x == target {
        return x;
    }
    if x == 0.0 {
        let tiny = f64::from_bits(1);
        return if target > 0.0 { tiny } else { -tiny };
    }
    let bits = x.to_bits();
    let away = (target > x) == (x > 0.0);
    f64::from_bits(if away { bits + 1 } else { bits - 1 })
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Widened enclosure of a value computed by a libm routine (error < 1 ulp).
    pub fn around(x: f64) -> Self {
        Interval {
            lo: down(down(x)),
            hi: up(up(x)),
        }
    }

    pub fn ln(x: f64) -> Self {
        Self::around(x.ln())
    }

    pub fn add(self, o: Interval) -> Self {
        Interval {
            lo: down(self.lo + o.lo),
            hi: up(self.hi + o.hi),
        }
    }

    pub fn sub(self, o: Interval) -> Self {
        Interval {
            lo: down(self.lo - o.hi),
            hi: up(self.hi - o.lo),
        }
    }

    pub fn mul(self, o: Interval) -> Self {
        let c = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval {
            lo: down(lo),
            hi: up(hi),
        }
    }

    pub fn scale(self, k: f64) -> Self {
        self.mul(Interval::point(k))
    }

    pub fn contains_integer(&self) -> bool {
        self.lo.ceil() <= self.hi
    }

    /// Strictly above / below a real, certified.
    pub fn certainly_gt(&self, x: f64) -> bool {
        self.lo > x
    }

    pub fn certainly_lt(&self, x: f64) -> bool {
        self.hi < x
    }
}

/// `2^k` as a big rational's denominator, for exact `1/2^k` values.
pub fn inv_pow2(k: u32) -> BigRational {
    BigRational::new(BigInt::one(), num::pow(BigInt::from(2), k as usize))
}

pub fn big_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
