use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use super::{CountMethod, ExpectedCount};
use crate::error::{Error, Result};

/// `E #{x ∈ S^m : P(x) = 0}` for `m` Kostlan equations of degree `d`: the
/// projective count `d^{m/2}` doubled.
pub fn expected_zeros_closed_form(m: usize, d: u32) -> ExpectedCount {
    ExpectedCount {
        value: 2.0 * (d as f64).powf(m as f64 / 2.0),
        stderr: 0.0,
        method: CountMethod::ClosedForm,
    }
}

/// `2(d−1)^m + (d−1)^{m−1} + ⋯ + (d−1) + 1`.
pub fn cartwright_sturmfels_bound(m: usize, d: u32) -> Result<u64> {
    if d < 2 {
        return Err(Error::invalid("the bound needs d ≥ 2"));
    }
    let e = (d - 1) as u64;
    let mut total = 2 * e.pow(m as u32);
    for i in 0..m as u32 {
        total += e.pow(i);
    }
    Ok(total)
}

/// `2((d−1)^m + ⋯ + (d−1) + 1)`: twice the number of eigenvector classes of
/// a generic symmetric tensor, i.e. critical points on `S^m` counted with
/// both antipodes.
pub fn cartwright_sturmfels_sphere_bound(m: usize, d: u32) -> Result<u64> {
    if d < 2 {
        return Err(Error::invalid("the bound needs d ≥ 2"));
    }
    let e = (d - 1) as u64;
    Ok(2 * (0..=m as u32).map(|i| e.pow(i)).sum::<u64>())
}

/// Volume of the unit sphere `S^m ⊂ R^{m+1}`.
pub fn sphere_volume(m: usize) -> f64 {
    let h = (m as f64 + 1.0) / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// Volume of the ball of radius `r` in `R^m`.
pub fn ball_volume(m: usize, r: f64) -> f64 {
    let h = m as f64 / 2.0;
    PI.powf(h) / gamma(h + 1.0) * r.powi(m as i32)
}
