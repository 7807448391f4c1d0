//! Double-double evaluation of the adaptive system, used where orbit
//! segments must be resolved below f64 spacing (symbolic tracking).

use crate::dynamics::{RateRule, RuleKind};
pub use qd::Quad as Dd;

const EXP_CLAMP: f64 = 709.0;

#[inline]
pub fn dd(x: f64) -> Dd {
    Dd::from_f64(x)
}

/// Nearest f64 to a double-double value.
#[inline]
pub fn to_f64(x: Dd) -> f64 {
    x.0 + x.1
}

#[inline]
pub fn expit(z: Dd) -> Dd {
    if z.0 >= 0.0 {
        Dd::ONE / (Dd::ONE + (-z).exp())
    } else {
        let e = z.exp();
        e / (Dd::ONE + e)
    }
}

#[inline]
pub fn logit(x: Dd) -> Dd {
    x.ln() - Dd::ONE.sub_accurate(x).ln()
}

#[inline]
pub fn map(x: Dd, a: Dd, b: Dd) -> Dd {
    if x == Dd::ZERO || x == Dd::ONE || x == b {
        return x;
    }
    let z = logit(x) - a * x.sub_accurate(b);
    let z = if z.0 > EXP_CLAMP {
        dd(EXP_CLAMP)
    } else if z.0 < -EXP_CLAMP {
        dd(-EXP_CLAMP)
    } else {
        z
    };
    expit(z)
}

pub fn rate(rule: &RateRule, r: Dd) -> Dd {
    match &rule.kind {
        RuleKind::Constant => dd(rule.a_max),
        RuleKind::GaussianBump { sharpness } => {
            dd(rule.a_min) + dd(rule.a_max - rule.a_min) * (-(dd(*sharpness) * r * r)).exp()
        }
        RuleKind::LookupTable(k) => {
            let rf = to_f64(r);
            if rf <= k[0].0 {
                return dd(k[0].1);
            }
            let last = k[k.len() - 1];
            if rf >= last.0 {
                return dd(last.1);
            }
            let i = k.partition_point(|p| p.0 <= rf);
            let (r0, a0) = k[i - 1];
            let (r1, a1) = k[i];
            let t = (r - dd(r0)) / dd(r1 - r0);
            dd(a0) + t * dd(a1 - a0)
        }
    }
}

/// Adaptive state in double-double: `x_n`, `S_n`, `a_n`.
#[derive(Debug, Clone, Copy)]
pub struct State {
    pub step: usize,
    pub x: Dd,
    pub sum: Dd,
    pub a: Dd,
}

impl State {
    pub fn new(x0: Dd, rule: &RateRule) -> Self {
        State { step: 0, x: x0, sum: Dd::ZERO, a: rate(rule, Dd::ZERO) }
    }

    #[inline]
    pub fn advance(&mut self, rule: &RateRule, b: Dd) {
        self.sum = self.sum.add_accurate(self.a * self.x.sub_accurate(b));
        self.x = map(self.x, self.a, b);
        self.step += 1;
        self.a = rate(rule, self.sum / dd(self.step as f64));
    }
}

/// `x_n(x0)` of the adaptive system.
pub fn propagate(x0: Dd, rule: &RateRule, b: Dd, n: usize) -> Dd {
    let mut s = State::new(x0, rule);
    for _ in 0..n {
        s.advance(rule, b);
    }
    s.x
}
