//! Frequency-space decompositions: the smooth bump, dyadic cone cutoffs
//! across factor blocks, Littlewood-Paley shells, the I/II/III split of cone
//! indices, sphere-cap partitions and the region of influence.

pub mod region;
pub mod sphere;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

pub use region::{influence_region, InfluenceRegion, RegionBox};
pub use sphere::{cap_partition, sphere_grid, CapGrid, CapIndex, SpacingStats};

/// Smooth even bump: 1 on `|t| <= 1`, 0 on `|t| >= 2`, and
/// `h(2-|t|) / (h(2-|t|) + h(|t|-1))` with `h(u) = e^{-1/u}` in between.
pub fn bump<T: Real>(t: T) -> T {
    let a = t.abs();
    let one = T::one();
    let two = lit::<T>(2.0);
    if a <= one {
        return one;
    }
    if a >= two {
        return T::zero();
    }
    let h = |u: T| (-one / u).exp();
    let p = h(two - a);
    let q = h(a - one);
    p / (p + q)
}

/// `phi(ratio)` where an infinite ratio (zero denominator) maps to 0.
fn bump_of_ratio<T: Real>(num: T, den: T, scale: T) -> T {
    if den == T::zero() {
        return T::zero();
    }
    bump(scale * num / den)
}

/// Cone cutoff `prod_i (phi[2^{-t_i}|xi_1|/|xi_i|] - phi[2^{1-t_i}|xi_1|/|xi_i|])`.
///
/// `block_norms[0]` is `|xi_1|`; `t[i-1]` pairs with `block_norms[i]`. A zero
/// block `xi_i` makes the ratio infinite and the factor vanish.
pub fn cone_cutoff<T: Real>(t: &[u32], block_norms: &[T]) -> Result<T> {
    if block_norms.len() != t.len() + 1 {
        return Err(Error::Contract(format!(
            "cone index has {} entries for {} blocks",
            t.len(),
            block_norms.len()
        )));
    }
    let x1 = block_norms[0];
    let two = lit::<T>(2.0);
    let mut acc = T::one();
    for (&ti, &xi) in t.iter().zip(&block_norms[1..]) {
        let s = two.powi(-(ti as i32));
        acc = acc * (bump_of_ratio(x1, xi, s) - bump_of_ratio(x1, xi, s * two));
        if acc == T::zero() {
            break;
        }
    }
    Ok(acc)
}

/// Sum of all cone cutoffs with `t_i <= cap` for every `i`:
/// `prod_i (phi[2^{-cap}|xi_1|/|xi_i|] - phi[2|xi_1|/|xi_i|])`. With no cap
/// this is the full cone `prod_i (1 - phi[2|xi_1|/|xi_i|])`.
pub fn cone_total<T: Real>(cap: Option<u32>, block_norms: &[T]) -> T {
    let x1 = block_norms[0];
    let two = lit::<T>(2.0);
    block_norms[1..].iter().fold(T::one(), |acc, &xi| {
        let lower = match cap {
            Some(c) => bump_of_ratio(x1, xi, two.powi(-(c as i32))),
            None if xi == T::zero() => T::zero(),
            None => T::one(),
        };
        acc * (lower - bump_of_ratio(x1, xi, two))
    })
}

/// Littlewood-Paley shell `phi[2^{-j}|xi|] - phi[2^{1-j}|xi|]`, supported in
/// `2^{j-1} <= |xi| <= 2^{j+1}`.
pub fn shell_cutoff<T: Real>(j: i32, xi_norm: T) -> T {
    let two = lit::<T>(2.0);
    bump(two.powi(-j) * xi_norm) - bump(two.powi(1 - j) * xi_norm)
}

/// Cone and shell indices of one localized piece.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicIndex {
    pub j: u32,
    pub t: Vec<u32>,
}

/// Assignment of blocks `2..=n` to the three regimes of `t_i` relative to
/// `j`. Blocks are numbered from 1 as in `xi = (xi_1, ..., xi_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionSplit {
    /// `0 <= t_i < j/2`
    pub first: Vec<usize>,
    /// `j/2 <= t_i < j`
    pub second: Vec<usize>,
    /// `t_i >= j`
    pub third: Vec<usize>,
    /// `1 + |I|`
    pub block_count: usize,
    /// `N_1 + sum_{i in I} N_i`
    pub sphere_dim: usize,
}

pub fn classify_partition(j: u32, t: &[u32], factors: &[usize]) -> Result<PartitionSplit> {
    if j == 0 {
        return Err(Error::Domain("partition needs j > 0".into()));
    }
    if factors.len() != t.len() + 1 {
        return Err(Error::Contract(format!(
            "{} cone indices for {} factor blocks",
            t.len(),
            factors.len()
        )));
    }
    let mut split = PartitionSplit {
        first: Vec::new(),
        second: Vec::new(),
        third: Vec::new(),
        block_count: 1,
        sphere_dim: factors[0],
    };
    for (k, &ti) in t.iter().enumerate() {
        let block = k + 2;
        if 2 * ti < j {
            split.first.push(block);
            split.block_count += 1;
            split.sphere_dim += factors[k + 1];
        } else if ti < j {
            split.second.push(block);
        } else {
            split.third.push(block);
        }
    }
    Ok(split)
}

/// Euclidean norms of the factor blocks of `xi`.
pub fn block_norms(factors: &[usize], xi: &[f64], out: &mut [f64]) {
    let mut start = 0;
    for (o, &f) in out.iter_mut().zip(factors) {
        *o = xi[start..start + f].iter().map(|v| v * v).sum::<f64>().sqrt();
        start += f;
    }
}
