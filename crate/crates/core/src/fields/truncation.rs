/// Radius on which truncated series are certified by default.
pub const DEFAULT_RADIUS: f64 = 1.5;
/// Default sup-standard-deviation tolerance of the truncated tail.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

const MAX_ORDER: u32 = 400;

/// `Σ_{j>D} (m ρ²)^j / j!`, summed until terms are negligible.
pub fn truncation_tail(radius: f64, m: usize, order: u32) -> f64 {
    let x = m as f64 * radius * radius;
    // term_j = x^j / j!, accumulated in log space to avoid overflow
    let mut tail = 0.0;
    let mut j = order as f64 + 1.0;
    let mut ln_term = j * x.ln() - crate::polycore::ln_factorial(order as u64 + 1);
    loop {
        let t = ln_term.exp();
        tail += t;
        if t < tail * 1e-17 && j > x {
            break;
        }
        j += 1.0;
        ln_term += x.ln() - j.ln();
        if j > 10_000.0 {
            break;
        }
    }
    tail
}

/// Smallest `D` with `Σ_{j>D} (m ρ²)^j / j! < ε²`: a bound on the variance of
/// the truncated Bargmann–Fock tail on `|u| ≤ ρ`. Independent of `k`, since
/// components are independent copies.
pub fn truncation_order(radius: f64, tolerance: f64, m: usize, _k: usize) -> u32 {
    assert!(radius > 0.0, "radius must be positive");
    assert!(tolerance > 0.0 && tolerance < 1.0, "tolerance must be in (0, 1)");
    let target = tolerance * tolerance;
    (0..=MAX_ORDER)
        .find(|&d| truncation_tail(radius, m, d) < target)
        .unwrap_or(MAX_ORDER)
}

/// Order used when no explicit truncation is requested.
pub fn default_truncation_order(m: usize) -> u32 {
    truncation_order(DEFAULT_RADIUS, DEFAULT_TOLERANCE, m, 1)
}
