//! Fixed-order Gauss-Legendre quadrature.
//!
//! Node/weight tables are computed once per order by Newton iteration on
//! the Legendre recurrence and cached for the life of the process, so
//! repeated expectations are bit-reproducible and cheap.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Default node count per smooth sub-interval.
pub const DEFAULT_NODES: usize = 128;

type Rule = Arc<Vec<(f64, f64)>>;

fn cache() -> &'static Mutex<HashMap<usize, Rule>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Nodes and weights on [-1, 1] for an n-point Gauss-Legendre rule.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1);
    let mut map = cache().lock().unwrap();
    if let Some(rule) = map.get(&n) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(compute_rule(n));
    map.insert(n, Arc::clone(&rule));
    rule
}

fn compute_rule(n: usize) -> Vec<(f64, f64)> {
    let mut pairs = vec![(0.0, 0.0); n];
    let m = (n + 1) / 2;
    for k in 0..m {
        // Tricomi initial guess for the k-th root of P_n.
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-15 {
                let (p2, d2) = legendre_and_derivative(n, x);
                x -= p2 / d2;
                dp = legendre_and_derivative(n, x).1;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        pairs[k] = (-x, w);
        pairs[n - 1 - k] = (x, w);
    }
    if n % 2 == 1 {
        // exact midpoint for odd orders
        let (_, d) = legendre_and_derivative(n, 0.0);
        pairs[n / 2] = (0.0, 2.0 / (d * d));
    }
    pairs
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrate f over [a, b] with an n-point rule.
#[cfg(test)]
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let rule = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for &(x, w) in rule.iter() {
        acc += w * f(mid + half * x);
    }
    acc * half
}
