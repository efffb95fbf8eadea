use super::AnalysisError;

/// Composite Simpson rule with `n` (even) panels on `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Composite Simpson with the panel count doubled until two successive
/// estimates agree to `rel_tol`.
pub fn simpson_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64, AnalysisError> {
    const MAX_PANELS: usize = 1 << 24;
    let mut n = 64;
    let mut prev = simpson(f, a, b, n);
    let mut change = f64::INFINITY;
    while n < MAX_PANELS {
        n *= 2;
        let next = simpson(f, a, b, n);
        change = (next - prev).abs();
        if change <= rel_tol * next.abs() || (next == 0.0 && prev == 0.0) {
            return Ok(next);
        }
        prev = next;
    }
    Err(AnalysisError::Quadrature { tolerance: rel_tol, change: change / prev.abs() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_is_exact() {
        let f = |x: f64| x * x * x - 2.0 * x;
        assert!((simpson(&f, 0.0, 2.0, 2) - 0.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian() {
        let f = |x: f64| (-x * x).exp();
        let v = simpson_adaptive(&f, -8.0, 8.0, 1e-12).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }
}
