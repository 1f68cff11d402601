//! Adaptive composite Gauss-Legendre quadrature.

use std::sync::OnceLock;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds an `n`-point rule; nodes are polished with Newton's method on
    /// the three-term Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = if n == 0 {
        0.0
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p, d)
}

/// Panel rule used by [`adaptive`].
pub const PANEL_ORDER: usize = 20;

pub fn panel_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(PANEL_ORDER))
}

/// Reported when bisection hits the depth cap before the panel estimates agree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotConverged {
    pub depth: u32,
}

/// Integrates `f` over `[a, b]` by recursive bisection: a panel is accepted
/// once the one-panel and two-half-panel estimates differ by less than its
/// share of `tol` (proportional to its length).
pub fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<f64, NotConverged> {
    let rule = panel_rule();
    let whole = rule.integrate(a, b, f);
    refine(rule, f, a, b, whole, tol, 0, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    rule: &GaussLegendre,
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    max_depth: u32,
) -> Result<f64, NotConverged> {
    let mid = 0.5 * (a + b);
    let left = rule.integrate(a, mid, f);
    let right = rule.integrate(mid, b, f);
    let halves = left + right;
    // Below this floor the two estimates only differ by rounding.
    let noise = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if (halves - whole).abs() <= tol.max(noise) {
        return Ok(halves);
    }
    if depth >= max_depth {
        return Err(NotConverged { depth });
    }
    let l = refine(rule, f, a, mid, left, 0.5 * tol, depth + 1, max_depth)?;
    let r = refine(rule, f, mid, b, right, 0.5 * tol, depth + 1, max_depth)?;
    Ok(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 10, 20, 33] {
            let rule = GaussLegendre::new(n);
            let s: f64 = rule.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n = {n}: {s}");
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = GaussLegendre::new(5);
        let got = rule.integrate(0.0, 2.0, |x| x.powi(9));
        assert!((got - 2f64.powi(10) / 10.0).abs() < 1e-10);
    }

    #[test]
    fn adaptive_handles_steep_logistic() {
        // Antiderivative of 1/(1+e^{x/s}) is x - s ln(1+e^{x/s}).
        let s = 1e-5;
        let f = |x: f64| 1.0 / (1.0 + (x / s).exp());
        let prim = |x: f64| {
            let u = x / s;
            let softplus = if u > 0.0 { u + (-u).exp().ln_1p() } else { u.exp().ln_1p() };
            x - s * softplus
        };
        let got = adaptive(&f, -1.0, 2.0, 1e-12, 30).unwrap();
        assert!((got - (prim(2.0) - prim(-1.0))).abs() < 1e-11);
    }

    #[test]
    fn adaptive_reports_depth_cap() {
        let f = |x: f64| if x < 0.3 { 0.0 } else { 1.0 };
        assert!(adaptive(&f, 0.0, 1.0, 1e-14, 3).is_err());
    }
}
