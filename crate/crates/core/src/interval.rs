use crate::error::{domain, Result};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn checked(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return domain("interval endpoint is NaN");
        }
        if lo > hi {
            return domain(format!("inverted interval [{lo}, {hi}]"));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn diam(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interior(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    /// `self ⊆ other` up to `tol`.
    pub fn within(&self, other: &Interval, tol: f64) -> bool {
        self.lo >= other.lo - tol && self.hi <= other.hi + tol
    }

    /// `self ⊇ other` up to `tol`.
    pub fn covers(&self, other: &Interval, tol: f64) -> bool {
        self.lo <= other.lo + tol && self.hi >= other.hi - tol
    }

    /// Largest `m` with `[other.lo - m, other.hi + m] ⊆ self`; negative when not covered.
    pub fn cover_margin(&self, other: &Interval) -> f64 {
        (other.lo - self.lo).min(self.hi - other.hi)
    }

    pub fn hausdorff(&self, other: &Interval) -> f64 {
        (self.lo - other.lo).abs().max((self.hi - other.hi).abs())
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn disjoint(&self, other: &Interval) -> bool {
        self.hi < other.lo || other.hi < self.lo
    }

    /// Distance between two disjoint intervals, 0 when they meet.
    pub fn gap(&self, other: &Interval) -> f64 {
        (other.lo - self.hi).max(self.lo - other.hi).max(0.0)
    }

    /// Image under `x -> 1 - x`.
    pub fn reflect(&self) -> Interval {
        Interval::new(1.0 - self.hi, 1.0 - self.lo)
    }

    /// `n` equispaced points including both endpoints.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        match n {
            0 => vec![],
            1 => vec![self.mid()],
            _ => {
                let h = self.diam() / (n - 1) as f64;
                let mut v: Vec<f64> = (0..n).map(|i| self.lo + h * i as f64).collect();
                v[n - 1] = self.hi;
                v
            }
        }
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
