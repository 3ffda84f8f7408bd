use std::sync::Arc;

use super::multi_index::MonomialBasis;
use crate::error::{Error, Result};

/// Most variables any jet routine handles (ambient dimension m + 1).
pub const MAX_VARS: usize = 8;

/// A homogeneous polynomial of degree `d` in `m + 1` variables, stored densely
/// in graded-lex order.
#[derive(Clone, Debug)]
pub struct HomogeneousPoly {
    basis: Arc<MonomialBasis>,
    coeffs: Vec<f64>,
}

/// Value, ambient gradient and ambient Hessian (row-major) at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct AmbientJet {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: Vec<f64>,
}

impl HomogeneousPoly {
    pub fn zero(m: usize, d: u32) -> Self {
        let basis = MonomialBasis::get(m, d);
        let n = basis.len();
        Self {
            basis,
            coeffs: vec![0.0; n],
        }
    }

    pub fn from_coefficients(m: usize, d: u32, coeffs: Vec<f64>) -> Result<Self> {
        let basis = MonomialBasis::get(m, d);
        if coeffs.len() != basis.len() {
            return Err(Error::invalid(format!(
                "expected {} coefficients for (m={m}, d={d}), got {}",
                basis.len(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("non-finite coefficient"));
        }
        Ok(Self { basis, coeffs })
    }

    /// `c · x^α`.
    pub fn monomial(exponents: &[u32], c: f64) -> Self {
        let d = exponents.iter().sum();
        let mut p = Self::zero(exponents.len() - 1, d);
        p.set_coefficient(exponents, c);
        p
    }

    pub fn m(&self) -> usize {
        self.basis.m()
    }

    pub fn degree(&self) -> u32 {
        self.basis.degree()
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn coefficient(&self, exponents: &[u32]) -> f64 {
        self.coeffs[self.basis.index_of(exponents)]
    }

    pub fn set_coefficient(&mut self, exponents: &[u32], c: f64) {
        let i = self.basis.index_of(exponents);
        self.coeffs[i] = c;
    }

    /// Value at an arbitrary point of `R^{m+1}`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut out = [0.0];
        eval_many(&self.basis, &[&self.coeffs], x, &mut out);
        out[0]
    }

    pub fn ambient_jet(&self, x: &[f64], order: usize) -> AmbientJet {
        ambient_jets(&self.basis, &[&self.coeffs], x, order)
            .pop()
            .expect("one component")
    }

    /// `∂P/∂x_var`, a polynomial of degree `d - 1` (the zero constant when `d = 0`).
    pub fn partial(&self, var: usize) -> Self {
        let d = self.degree();
        if d == 0 {
            return Self::zero(self.m(), 0);
        }
        let mut out = Self::zero(self.m(), d - 1);
        let mut e = vec![0u32; self.m() + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            let a = self.basis.exponents(i);
            if a[var] == 0 || c == 0.0 {
                continue;
            }
            e.copy_from_slice(a);
            e[var] -= 1;
            let j = out.basis.index_of(&e);
            out.coeffs[j] += c * a[var] as f64;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.m(), other.m(), "variable count mismatch");
        let mut out = Self::zero(self.m(), self.degree() + other.degree());
        let mut e = vec![0u32; self.m() + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let ea = self.basis.exponents(i);
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == 0.0 {
                    continue;
                }
                let eb = other.basis.exponents(j);
                for v in 0..e.len() {
                    e[v] = ea[v] + eb[v];
                }
                let k = out.basis.index_of(&e);
                out.coeffs[k] += a * b;
            }
        }
        out
    }

    /// `x_var · P`.
    pub fn mul_variable(&self, var: usize) -> Self {
        let mut out = Self::zero(self.m(), self.degree() + 1);
        let mut e = vec![0u32; self.m() + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            e.copy_from_slice(self.basis.exponents(i));
            e[var] += 1;
            let j = out.basis.index_of(&e);
            out.coeffs[j] = c;
        }
        out
    }

    /// `self += c · other`; degrees must match.
    pub fn add_scaled(&mut self, other: &Self, c: f64) {
        assert_eq!(self.m(), other.m());
        assert_eq!(self.degree(), other.degree());
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            basis: Arc::clone(&self.basis),
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }
}

/// A polynomial map `P = (P_1, …, P_k)` of homogeneous components sharing
/// one degree.
#[derive(Clone, Debug)]
pub struct PolynomialMap {
    components: Vec<HomogeneousPoly>,
}

impl PolynomialMap {
    pub fn new(components: Vec<HomogeneousPoly>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::invalid("a polynomial map needs at least one component"))?;
        let (m, d) = (first.m(), first.degree());
        if components.iter().any(|c| c.m() != m || c.degree() != d) {
            return Err(Error::invalid("components must share m and d"));
        }
        Ok(Self { components })
    }

    pub fn zero(m: usize, k: usize, d: u32) -> Self {
        Self {
            components: (0..k).map(|_| HomogeneousPoly::zero(m, d)).collect(),
        }
    }

    pub fn scalar(p: HomogeneousPoly) -> Self {
        Self {
            components: vec![p],
        }
    }

    pub fn m(&self) -> usize {
        self.components[0].m()
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn degree(&self) -> u32 {
        self.components[0].degree()
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        self.components[0].basis()
    }

    pub fn components(&self) -> &[HomogeneousPoly] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &HomogeneousPoly {
        &self.components[j]
    }

    pub fn component_mut(&mut self, j: usize) -> &mut HomogeneousPoly {
        &mut self.components[j]
    }

    fn coefficient_slices(&self) -> Vec<&[f64]> {
        self.components.iter().map(|c| c.coefficients()).collect()
    }

    /// Values at an arbitrary point; no norm check.
    pub fn eval_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.k()];
        eval_many(self.basis(), &self.coefficient_slices(), x, &mut out);
        out
    }

    /// Ambient jets of every component at an arbitrary point.
    pub fn ambient_jets(&self, x: &[f64], order: usize) -> Vec<AmbientJet> {
        ambient_jets(self.basis(), &self.coefficient_slices(), x, order)
    }

    /// Plain-text dump: one line per monomial, exponents then one coefficient
    /// per component, 17 significant digits.
    pub fn dump(&self) -> String {
        let basis = self.basis();
        let mut s = String::new();
        for i in 0..basis.len() {
            let e = basis.exponents(i);
            let mut fields: Vec<String> = e.iter().map(|v| v.to_string()).collect();
            for c in &self.components {
                fields.push(format!("{:.16e}", c.coefficients()[i]));
            }
            s.push_str(&fields.join(" "));
            s.push('\n');
        }
        s
    }

    /// Inverse of [`PolynomialMap::dump`].
    pub fn parse_dump(m: usize, k: usize, d: u32, text: &str) -> Result<Self> {
        let mut map = Self::zero(m, k, d);
        let mut seen = 0usize;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != m + 1 + k {
                return Err(Error::invalid(format!(
                    "dump line {}: expected {} fields, got {}",
                    lineno + 1,
                    m + 1 + k,
                    fields.len()
                )));
            }
            let e: Vec<u32> = fields[..=m]
                .iter()
                .map(|f| f.parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|err| Error::invalid(format!("dump line {}: {err}", lineno + 1)))?;
            if e.iter().sum::<u32>() != d {
                return Err(Error::invalid(format!("dump line {}: wrong degree", lineno + 1)));
            }
            for j in 0..k {
                let c: f64 = fields[m + 1 + j]
                    .parse()
                    .map_err(|err| Error::invalid(format!("dump line {}: {err}", lineno + 1)))?;
                map.components[j].set_coefficient(&e, c);
            }
            seen += 1;
        }
        if seen != map.basis().len() {
            return Err(Error::invalid("dump does not list every monomial"));
        }
        Ok(map)
    }
}

fn power_table(x: &[f64], d: usize) -> Vec<f64> {
    let w = d + 1;
    let mut t = vec![1.0; x.len() * w];
    for (i, &xi) in x.iter().enumerate() {
        for e in 1..w {
            t[i * w + e] = t[i * w + e - 1] * xi;
        }
    }
    t
}

pub(crate) fn eval_many(basis: &MonomialBasis, coeffs: &[&[f64]], x: &[f64], out: &mut [f64]) {
    eval_flat(basis.flat_exponents(), basis.nvars(), basis.degree() as usize, coeffs, x, out)
}

/// Evaluates polynomials whose monomials are listed as consecutive
/// `nv`-tuples in `exps`, with every exponent at most `maxdeg`.
pub(crate) fn eval_flat(
    exps: &[u32],
    nv: usize,
    maxdeg: usize,
    coeffs: &[&[f64]],
    x: &[f64],
    out: &mut [f64],
) {
    assert_eq!(x.len(), nv, "point dimension mismatch");
    let w = maxdeg + 1;
    let pw = power_table(x, maxdeg);
    out.iter_mut().for_each(|v| *v = 0.0);
    for (n, e) in exps.chunks_exact(nv).enumerate() {
        let mut mono = 1.0;
        for (i, &a) in e.iter().enumerate() {
            mono *= pw[i * w + a as usize];
        }
        for (o, c) in out.iter_mut().zip(coeffs) {
            *o += c[n] * mono;
        }
    }
}

pub(crate) fn ambient_jets(
    basis: &MonomialBasis,
    coeffs: &[&[f64]],
    x: &[f64],
    order: usize,
) -> Vec<AmbientJet> {
    jets_flat(basis.flat_exponents(), basis.nvars(), basis.degree() as usize, coeffs, x, order)
}

pub(crate) fn jets_flat(
    exps: &[u32],
    nv: usize,
    maxdeg: usize,
    coeffs: &[&[f64]],
    x: &[f64],
    order: usize,
) -> Vec<AmbientJet> {
    assert!(nv <= MAX_VARS, "too many variables for jet evaluation");
    assert_eq!(x.len(), nv, "point dimension mismatch");
    let w = maxdeg + 1;
    let pw = power_table(x, maxdeg);
    if nv == 3 && order == 2 {
        return jets3(exps, w, &pw, coeffs);
    }
    let k = coeffs.len();
    let mut jets: Vec<AmbientJet> = (0..k)
        .map(|_| AmbientJet {
            value: 0.0,
            gradient: if order >= 1 { vec![0.0; nv] } else { Vec::new() },
            hessian: if order >= 2 { vec![0.0; nv * nv] } else { Vec::new() },
        })
        .collect();

    let mut p = [0.0f64; MAX_VARS];
    let mut dp = [0.0f64; MAX_VARS];
    let mut ddp = [0.0f64; MAX_VARS];
    let mut grad_mono = [0.0f64; MAX_VARS];
    let mut hess_mono = [0.0f64; MAX_VARS * MAX_VARS];
    for (n, e) in exps.chunks_exact(nv).enumerate() {
        for i in 0..nv {
            let a = e[i] as usize;
            p[i] = pw[i * w + a];
            dp[i] = if a >= 1 { a as f64 * pw[i * w + a - 1] } else { 0.0 };
            ddp[i] = if a >= 2 {
                (a * (a - 1)) as f64 * pw[i * w + a - 2]
            } else {
                0.0
            };
        }
        let mono: f64 = p[..nv].iter().product();
        if order >= 1 {
            for i in 0..nv {
                let mut g = dp[i];
                for j in 0..nv {
                    if j != i {
                        g *= p[j];
                    }
                }
                grad_mono[i] = g;
            }
        }
        if order >= 2 {
            for i in 0..nv {
                for j in i..nv {
                    let mut h = if i == j { ddp[i] } else { dp[i] * dp[j] };
                    for l in 0..nv {
                        if l != i && l != j {
                            h *= p[l];
                        }
                    }
                    hess_mono[i * nv + j] = h;
                    hess_mono[j * nv + i] = h;
                }
            }
        }
        for (jet, c) in jets.iter_mut().zip(coeffs) {
            let c = c[n];
            if c == 0.0 {
                continue;
            }
            jet.value += c * mono;
            if order >= 1 {
                for i in 0..nv {
                    jet.gradient[i] += c * grad_mono[i];
                }
            }
            if order >= 2 {
                for (h, hm) in jet.hessian.iter_mut().zip(&hess_mono[..nv * nv]) {
                    *h += c * hm;
                }
            }
        }
    }
    jets
}

/// Order-2 jets in three variables with the monomial derivatives unrolled.
fn jets3(exps: &[u32], w: usize, pw: &[f64], coeffs: &[&[f64]]) -> Vec<AmbientJet> {
    let mut acc = vec![[0.0f64; 10]; coeffs.len()];
    let deriv = |i: usize, a: usize| -> (f64, f64, f64) {
        let base = i * w;
        let p = pw[base + a];
        let dp = if a >= 1 { a as f64 * pw[base + a - 1] } else { 0.0 };
        let ddp = if a >= 2 { (a * (a - 1)) as f64 * pw[base + a - 2] } else { 0.0 };
        (p, dp, ddp)
    };
    for (n, e) in exps.chunks_exact(3).enumerate() {
        let (p0, d0, dd0) = deriv(0, e[0] as usize);
        let (p1, d1, dd1) = deriv(1, e[1] as usize);
        let (p2, d2, dd2) = deriv(2, e[2] as usize);
        let p12 = p1 * p2;
        let p02 = p0 * p2;
        let p01 = p0 * p1;
        // value, gradient (3), hessian upper triangle (00, 01, 02, 11, 12, 22)
        let t = [
            p0 * p12,
            d0 * p12,
            d1 * p02,
            d2 * p01,
            dd0 * p12,
            d0 * d1 * p2,
            d0 * p1 * d2,
            dd1 * p02,
            p0 * d1 * d2,
            dd2 * p01,
        ];
        for (a, c) in acc.iter_mut().zip(coeffs) {
            let c = c[n];
            for (ai, ti) in a.iter_mut().zip(&t) {
                *ai += c * ti;
            }
        }
    }
    acc.into_iter()
        .map(|a| AmbientJet {
            value: a[0],
            gradient: vec![a[1], a[2], a[3]],
            hessian: vec![a[4], a[5], a[6], a[5], a[7], a[8], a[6], a[8], a[9]],
        })
        .collect()
}
