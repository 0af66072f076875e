//! Gauss–Legendre quadrature rules and order-fixed summation.
//!
//! Nodes are the roots of the Legendre polynomial P_n on [−1, 1], found
//! by Newton iteration from the Chebyshev-like initial guesses; weights
//! follow from w = 2 / ((1 − x²) P_n′(x)²). Sums use pairwise reduction
//! so results do not depend on accumulation order or thread count.

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1],
/// exact for polynomials of degree ≤ 2n − 1. Nodes come out ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-16 * x.abs().max(1.0) {
                let (p2, d2) = legendre_with_derivative(n, x);
                dp = d2;
                x -= p2 / d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // The initial guesses run from the largest root downward.
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_with_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

/// P_n(x) and P_n′(x) via the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p_next = ((2.0 * jf - 1.0) * x * p - (jf - 1.0) * p_prev) / jf;
        p_prev = p;
        p = p_next;
    }
    let d = n as f64 * (p_prev - x * p) / (1.0 - x * x);
    (p, d)
}

/// Sum with a fixed pairwise reduction tree. Error grows like O(log n)
/// rather than O(n), and the result is independent of chunking.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Integrate f over [lo, hi] with the n-point Gauss–Legendre rule.
pub fn integrate_gl(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let mid = 0.5 * (lo + hi);
    let scale = 0.5 * (hi - lo);
    let terms: Vec<f64> = nodes
        .iter()
        .zip(&weights)
        .map(|(&x, &w)| w * f(mid + scale * x))
        .collect();
    scale * pairwise_sum(&terms)
}
