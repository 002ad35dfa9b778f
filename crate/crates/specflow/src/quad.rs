//! Gauss-Legendre rules with cached nodes, used by the oscillatory
//! integrals in `mixing`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Nodes (in (-1,1)) and weights of the n-point Gauss-Legendre rule.
/// Newton iteration on the Legendre recurrence; cached per order.
type Rule = (Vec<f64>, Vec<f64>);

pub fn gauss_legendre(n: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return hit.clone();
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_n' by recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    cache
        .lock()
        .unwrap()
        .insert(n, (nodes.clone(), weights.clone()));
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        // n-point rule is exact through degree 2n-1
        let (nodes, weights) = gauss_legendre(5);
        for deg in 0..10 {
            let exact = if deg % 2 == 0 {
                2.0 / (deg as f64 + 1.0)
            } else {
                0.0
            };
            let quad: f64 = nodes
                .iter()
                .zip(&weights)
                .map(|(&x, &w)| w * x.powi(deg))
                .sum();
            assert!((quad - exact).abs() < 1e-13, "degree {deg}: {quad}");
        }
    }

    #[test]
    fn weights_sum_to_two() {
        for n in [2, 3, 8, 16, 48] {
            let (_, w) = gauss_legendre(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-12, "n={n}: {s}");
        }
    }

    #[test]
    fn oscillatory_benchmark() {
        // integral of cos(20 x) over [-1, 1] = sin(20)/10
        let (nodes, weights) = gauss_legendre(32);
        let quad: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(&x, &w)| w * (20.0 * x).cos())
            .sum();
        let exact = (20.0f64).sin() / 10.0;
        assert!((quad - exact).abs() < 1e-12);
    }
}
