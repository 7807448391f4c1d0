use crate::dynamics::{deriv, AdaptiveState, RateRule};
use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScrambledGap {
    pub min_gap: f64,
    pub max_gap: f64,
}

/// Min and max of `|x_n(x0) − x_n(y0)|` over the final `tail` fraction of `n` steps.
pub fn scrambled_metrics(
    x0: f64,
    y0: f64,
    rule: &RateRule,
    b: f64,
    n: usize,
    tail: f64,
) -> Result<ScrambledGap> {
    if !(x0 > 0.0 && x0 < 1.0 && y0 > 0.0 && y0 < 1.0) {
        return domain("scrambled metrics need interior starts");
    }
    if !(tail > 0.0 && tail <= 1.0) {
        return domain(format!("tail fraction {tail} outside (0, 1]"));
    }
    let from = n - ((n as f64 * tail).ceil() as usize).min(n);
    let (mut s, mut t) = (AdaptiveState::new(x0, rule), AdaptiveState::new(y0, rule));
    let mut out = ScrambledGap { min_gap: f64::INFINITY, max_gap: 0.0 };
    for i in 0..=n {
        if i >= from {
            let g = (s.share - t.share).abs();
            out.min_gap = out.min_gap.min(g);
            out.max_gap = out.max_gap.max(g);
        }
        if i < n {
            s.advance(rule, b);
            t.advance(rule, b);
        }
    }
    Ok(out)
}

/// `(1/(n − burn_in)) Σ ln|f'(x_i, a_i, b)|` over steps `burn_in..n`.
pub fn lyapunov(x0: f64, rule: &RateRule, b: f64, n: usize, burn_in: usize) -> Result<f64> {
    if !(x0 > 0.0 && x0 < 1.0) {
        return domain(format!("lyapunov needs an interior start, got {x0}"));
    }
    if n <= burn_in {
        return domain("need n > burn_in");
    }
    let mut st = AdaptiveState::new(x0, rule);
    let mut acc = 0.0;
    for i in 0..n {
        if i >= burn_in {
            acc += deriv(st.share, st.rate, b).abs().ln().max(-745.0);
        }
        st.advance(rule, b);
    }
    Ok(acc / (n - burn_in) as f64)
}
