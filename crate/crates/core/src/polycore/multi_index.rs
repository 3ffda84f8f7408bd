//! Multi-indices in graded-lexicographic order and the combinatorics around
//! them.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Exponent vector of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    exponents: Vec<u32>,
}

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self { exponents }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }
}

impl From<&[u32]> for MultiIndex {
    fn from(e: &[u32]) -> Self {
        Self::new(e.to_vec())
    }
}

/// All `α` with `|α| = d` over `m + 1` variables, graded-lex: the first
/// exponent descends from `d` to `0`, then recursively on the tail.
pub fn enumerate_multi_indices(m: usize, d: u32) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(binomial(m as u64 + d as u64, m as u64) as usize);
    let mut buf = vec![0u32; m + 1];
    fill(&mut buf, 0, d, &mut out);
    out
}

fn fill(buf: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == buf.len() {
        buf[pos] = remaining;
        out.push(MultiIndex::new(buf.to_vec()));
        return;
    }
    for e in (0..=remaining).rev() {
        buf[pos] = e;
        fill(buf, pos + 1, remaining - e, out);
    }
}

/// Position of `alpha` in `enumerate_multi_indices(alpha.len() - 1, |alpha|)`.
pub fn index_of(alpha: &[u32]) -> usize {
    let m = alpha.len() - 1;
    let mut remaining: u32 = alpha.iter().sum();
    let mut rank = 0u64;
    for (i, &a) in alpha.iter().enumerate().take(m) {
        if a < remaining {
            // tuples on positions i..=m with sum `remaining` and entry i > a
            let free = (m - i) as u64;
            rank += binomial((remaining - a - 1) as u64 + free, free);
        }
        remaining -= a;
    }
    rank as usize
}

/// `C(n, k)` as an exact integer (panics on overflow of u64).
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial overflow")
}

const LN_FACTORIAL_TABLE: usize = 8192;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACTORIAL_TABLE);
        t.push(0.0);
        let mut acc = 0.0f64;
        for n in 1..LN_FACTORIAL_TABLE {
            acc += (n as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln(n!)`: tabulated for small `n`, log-gamma beyond.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < LN_FACTORIAL_TABLE {
        ln_factorial_table()[n as usize]
    } else {
        statrs::function::gamma::ln_gamma(n as f64 + 1.0)
    }
}

/// `ln(|α|! / (α_0! ⋯ α_m!))`.
pub fn ln_multinomial(alpha: &[u32]) -> f64 {
    let d: u64 = alpha.iter().map(|&a| a as u64).sum();
    ln_factorial(d) - alpha.iter().map(|&a| ln_factorial(a as u64)).sum::<f64>()
}

/// The multinomial coefficient `d! / (α_0! ⋯ α_m!)`.
pub fn multinomial(alpha: &[u32]) -> f64 {
    ln_multinomial(alpha).exp()
}

/// Enumeration of one `(m, d)` pair with per-monomial data used everywhere:
/// flattened exponents and the Kostlan standard deviations `√(d choose α)`.
#[derive(Debug)]
pub struct MonomialBasis {
    m: usize,
    d: u32,
    exponents: Vec<u32>,
    kostlan_sd: Vec<f64>,
}

impl MonomialBasis {
    /// Shared, cached basis for `(m, d)`.
    pub fn get(m: usize, d: u32) -> Arc<MonomialBasis> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<MonomialBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(b) = cache.lock().unwrap().get(&(m, d)) {
            return Arc::clone(b);
        }
        let basis = Arc::new(Self::build(m, d));
        cache
            .lock()
            .unwrap()
            .entry((m, d))
            .or_insert_with(|| Arc::clone(&basis))
            .clone()
    }

    fn build(m: usize, d: u32) -> Self {
        let idx = enumerate_multi_indices(m, d);
        let mut exponents = Vec::with_capacity(idx.len() * (m + 1));
        let mut kostlan_sd = Vec::with_capacity(idx.len());
        for a in &idx {
            exponents.extend_from_slice(a.exponents());
            kostlan_sd.push((0.5 * ln_multinomial(a.exponents())).exp());
        }
        Self {
            m,
            d,
            exponents,
            kostlan_sd,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn nvars(&self) -> usize {
        self.m + 1
    }

    pub fn len(&self) -> usize {
        self.kostlan_sd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kostlan_sd.is_empty()
    }

    #[inline]
    pub fn exponents(&self, i: usize) -> &[u32] {
        let w = self.m + 1;
        &self.exponents[i * w..(i + 1) * w]
    }

    pub(crate) fn flat_exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn kostlan_sd(&self) -> &[f64] {
        &self.kostlan_sd
    }

    /// Rank of `alpha` in this basis. Uses the closed form for three
    /// variables, the general ranking otherwise.
    #[inline]
    pub fn index_of(&self, alpha: &[u32]) -> usize {
        debug_assert_eq!(alpha.len(), self.m + 1);
        if self.m == 2 {
            let j = (self.d - alpha[0]) as usize;
            j * (j + 1) / 2 + alpha[2] as usize
        } else {
            index_of(alpha)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_enumerations() {
        let e = enumerate_multi_indices(1, 2);
        let got: Vec<Vec<u32>> = e.iter().map(|a| a.exponents().to_vec()).collect();
        assert_eq!(got, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        let e = enumerate_multi_indices(0, 5);
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].exponents(), &[5]);
        assert_eq!(enumerate_multi_indices(3, 0).len(), 1);
    }

    #[test]
    fn three_variable_closed_form_rank() {
        for d in 0..12 {
            let b = MonomialBasis::get(2, d);
            for i in 0..b.len() {
                assert_eq!(b.index_of(b.exponents(i)), i);
                assert_eq!(index_of(b.exponents(i)), i);
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(3, 1), 3);
        assert_eq!(binomial(102, 2), 5151);
        assert_eq!(binomial(5, 7), 0);
    }

    #[test]
    fn multinomial_small() {
        assert!((multinomial(&[1, 1]) - 2.0).abs() < 1e-13);
        assert!((multinomial(&[3, 0, 0]) - 1.0).abs() < 1e-13);
        assert!((multinomial(&[2, 1, 1]) - 12.0).abs() < 1e-12);
    }
}
