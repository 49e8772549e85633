//! Multi-parameter Sobolev norms `||f||_{L^p_s} = ||f * B_s||_{L^p}` with
//! `B_s^(xi) = prod_i (1 + |xi_i|^2)^{s_i/2}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{lp_norm, Field, GridSpec, LpExponent};
use crate::multipliers::{admissibility_violations, apply_multiplier, MultiplierTable};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevParams {
    pub s: Vec<f64>,
    pub p: f64,
    pub s_total: f64,
}

impl SobolevParams {
    pub fn exponent(&self) -> LpExponent {
        if self.p.is_infinite() {
            LpExponent::Infinity
        } else {
            LpExponent::Finite(self.p)
        }
    }
}

/// Checks `s_i >= 0`, `1 < p < inf`, `s_i < N_i/2`, and, when
/// `0 < |s| <= (N-1)/2`, `(N_i-1)/(N-1)|s| < s_i`. Every violated
/// inequality is listed.
pub fn validate_s_params(factors: &[usize], s: &[f64], p: f64) -> std::result::Result<SobolevParams, Vec<String>> {
    let mut v = admissibility_violations("s", s, factors, true);
    if !(p > 1.0 && p.is_finite()) {
        v.push(format!("p must lie in (1, inf), got {p}"));
    }
    if v.is_empty() {
        Ok(SobolevParams { s: s.to_vec(), p, s_total: s.iter().sum() })
    } else {
        Err(v)
    }
}

/// Like [`validate_s_params`] but folds the violations into a domain error.
pub fn sobolev_params(factors: &[usize], s: &[f64], p: f64) -> Result<SobolevParams> {
    validate_s_params(factors, s, p).map_err(|v| Error::Domain(v.join("; ")))
}

pub fn sobolev_norm<T: Real>(f: &Field<T>, params: &SobolevParams) -> Result<T> {
    let table = MultiplierTable::<T>::b_s(&params.s, f.spec())?;
    sobolev_norm_with(f, &table, params.exponent())
}

/// Sobolev norm with a precomputed `B_s` table.
pub fn sobolev_norm_with<T: Real>(f: &Field<T>, b_s: &MultiplierTable<T>, p: LpExponent) -> Result<T> {
    if b_s.values().iter().all(|v| v.re == T::one() && v.im == T::zero()) {
        return lp_norm(f, p);
    }
    lp_norm(&apply_multiplier(f, b_s)?, p)
}

/// Largest value of `prod_i (1+|xi_i|^2)^{s_i/2} / (1+|xi|^2)^{|s|/2}` over
/// the frequency grid; at most 1 is the pointwise form of the embedding
/// `L^2_{|s|} in L^2_s`.
pub fn embedding_ratio(spec: &GridSpec, s: &[f64]) -> Result<f64> {
    if s.len() != spec.factors().len() {
        return Err(Error::Contract(format!("{} exponents for {} blocks", s.len(), spec.factors().len())));
    }
    let total: f64 = s.iter().sum();
    let factors = spec.factors().to_vec();
    let f = Field::<f64>::from_frequency_fn(spec.clone(), |xi| {
        let mut norms = vec![0.0; factors.len()];
        crate::decomp::block_norms(&factors, xi, &mut norms);
        let full: f64 = norms.iter().map(|x| x * x).sum();
        let num: f64 = s.iter().zip(&norms).map(|(&si, &x)| (1.0 + x * x).powf(si / 2.0)).product();
        num_complex::Complex::new(num / (1.0 + full).powf(total / 2.0), 0.0)
    });
    Ok(f.sup_norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_examples() {
        assert!(validate_s_params(&[1, 1], &[0.25, 0.25], 2.0).is_ok());
        let e = validate_s_params(&[1, 1], &[0.6, 0.6], 2.0).unwrap_err();
        assert_eq!(e.len(), 2, "{e:?}");
        let e = validate_s_params(&[2, 1], &[0.1, 0.2], 2.0).unwrap_err();
        assert!(e[0].starts_with("s_1"), "{e:?}");
        assert!(validate_s_params(&[1, 1], &[0.0, 0.0], 2.0).is_ok());
        assert!(validate_s_params(&[1, 1], &[0.25, 0.25], 1.0).is_err());
        assert!(validate_s_params(&[1, 1], &[0.25], 2.0).is_err());
    }
}
