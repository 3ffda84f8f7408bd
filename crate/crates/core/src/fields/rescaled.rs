use super::PlanarField;
use crate::error::{Error, Result};
use crate::polycore::{AffineJet, PolynomialMap};

/// Largest `|u|` accepted by the rescaled field.
pub const RESCALED_DOMAIN_RADIUS: f64 = 3.0;

/// `X_d(u) = P(1, u_1/√d, …, u_m/√d)`.
#[derive(Clone, Debug)]
pub struct RescaledField {
    source: PolynomialMap,
    sqrt_d: f64,
}

impl RescaledField {
    pub fn new(source: PolynomialMap) -> Self {
        let sqrt_d = (source.degree() as f64).sqrt();
        Self { source, sqrt_d }
    }

    pub fn source(&self) -> &PolynomialMap {
        &self.source
    }

    pub fn degree(&self) -> u32 {
        self.source.degree()
    }

    fn ambient_point(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.source.m() {
            return Err(Error::invalid("point dimension does not match m"));
        }
        let n = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > RESCALED_DOMAIN_RADIUS {
            return Err(Error::OutOfDomain {
                norm: n,
                limit: RESCALED_DOMAIN_RADIUS,
            });
        }
        let mut x = Vec::with_capacity(u.len() + 1);
        x.push(1.0);
        x.extend(u.iter().map(|v| v / self.sqrt_d));
        Ok(x)
    }

    /// Jet in the `u` coordinates: each derivative order carries a `1/√d`.
    pub fn rescaled_jet(&self, u: &[f64], r: usize) -> Result<AffineJet> {
        if r > 2 {
            return Err(Error::UnsupportedOrder(r));
        }
        let x = self.ambient_point(u)?;
        let m = self.source.m();
        let nv = m + 1;
        let jets = self.source.ambient_jets(&x, r);
        let mut out = AffineJet::zero(m, self.source.k(), r);
        let s = 1.0 / self.sqrt_d;
        for (j, jet) in jets.iter().enumerate() {
            out.value[j] = jet.value;
            if r >= 1 {
                for a in 0..m {
                    out.gradient[(j, a)] = s * jet.gradient[a + 1];
                }
            }
            if r >= 2 {
                for a in 0..m {
                    for b in 0..m {
                        out.hessian[j][(a, b)] = s * s * jet.hessian[(a + 1) * nv + b + 1];
                    }
                }
            }
        }
        Ok(out)
    }
}

impl PlanarField for RescaledField {
    fn dim(&self) -> usize {
        self.source.m()
    }

    fn codim(&self) -> usize {
        self.source.k()
    }

    fn jet(&self, u: &[f64], order: usize) -> Result<AffineJet> {
        self.rescaled_jet(u, order)
    }

    fn value(&self, u: &[f64]) -> Result<Vec<f64>> {
        let x = self.ambient_point(u)?;
        Ok(self.source.eval_unchecked(&x))
    }
}
