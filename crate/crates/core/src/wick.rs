//! Two-site X-state entries from the Fermi integrals.
//!
//! The diagonal entries and the string correlator
//! `Z = ⟨c_i⁺ Π_{k=i}^{i+m−1}(1 − 2 n_k) c_{i+m}⟩` reduce, for a Gaussian
//! fermion state, to polynomials in `f_0 … f_m`. [`z_element`] evaluates the
//! expanded polynomials for `m = 2, 3, 4`; [`z_string_wick`] recomputes `Z`
//! from scratch by expanding the operator string and summing over every Wick
//! pairing, and serves as the oracle for the expansions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::free_fermion::FermiCoefficients;

/// Largest separation the pairing enumeration accepts.
pub const MAX_WICK_SEPARATION: usize = 8;

/// The five independent entries of the two-site density matrix in the
/// basis (↑↑, ↑↓, ↓↑, ↓↓).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoSiteElements {
    pub x_plus: f64,
    pub x_minus: f64,
    pub y_plus: f64,
    pub y_minus: f64,
    pub z: f64,
    pub separation: usize,
}

impl TwoSiteElements {
    pub fn diagonal_sum(&self) -> f64 {
        self.x_plus + self.y_plus + self.y_minus + self.x_minus
    }
}

/// `X⁺ = ⟨n_i n_{i+m}⟩` etc. in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalElements {
    pub x_plus: f64,
    pub x_minus: f64,
    pub y_plus: f64,
    pub y_minus: f64,
}

fn coefficient(f: &FermiCoefficients, m: usize) -> Result<f64> {
    f.get(m).ok_or_else(|| {
        Error::InvalidParams(format!(
            "coefficient f_{m} missing (have up to f_{})",
            f.m_max()
        ))
    })
}

pub fn diagonal_elements(f: &FermiCoefficients, m: usize) -> Result<DiagonalElements> {
    let f0 = coefficient(f, 0)?;
    let fm = coefficient(f, m)?;
    let f0sq = f0 * f0;
    let fmsq = fm * fm;
    let y = f0 - f0sq + fmsq;
    Ok(DiagonalElements {
        x_plus: f0sq - fmsq,
        x_minus: 1.0 - 2.0 * f0 + f0sq - fmsq,
        y_plus: y,
        y_minus: y,
    })
}

/// Expanded string correlator for `m ∈ {2, 3, 4}`.
pub fn z_element(f: &FermiCoefficients, m: usize) -> Result<f64> {
    if !(2..=4).contains(&m) {
        return Err(Error::UnsupportedSeparation(m));
    }
    let c = |i| coefficient(f, i);
    let (f0, f1, f2) = (c(0)?, c(1)?, c(2)?);
    let z = match m {
        2 => f2 - 2.0 * f0 * f2 + 2.0 * f1 * f1,
        3 => {
            let f3 = c(3)?;
            4.0 * (f1.powi(3) - 2.0 * f0 * f1 * f2 + f2 * f2 * f1 + f0 * f0 * f3
                - f1 * f1 * f3
                + f1 * f2
                - f0 * f3)
                + f3
        }
        _ => {
            let (f3, f4) = (c(3)?, c(4)?);
            let quartic = f1.powi(4) - 3.0 * f0 * f1 * f1 * f2 + 2.0 * f1 * f1 * f2 * f2
                + 2.0 * f0 * f0 * f1 * f3
                + f0 * f0 * f2 * f2
                - f2.powi(4)
                - 2.0 * f0 * f1 * f2 * f3
                + 2.0 * f1 * f2 * f2 * f3
                - 2.0 * f1.powi(3) * f3
                + f1 * f1 * f3 * f3
                - f0 * f2 * f3 * f3
                - f0.powi(3) * f4
                + 2.0 * f0 * f1 * f1 * f4
                - 2.0 * f1 * f1 * f2 * f4
                + f0 * f2 * f2 * f4;
            let cubic = 3.0 * f1 * f1 * f2 - 2.0 * f0 * f2 * f2 - 4.0 * f0 * f1 * f3
                + 2.0 * f1 * f2 * f3
                + 3.0 * f0 * f0 * f4
                - 2.0 * f1 * f1 * f4
                + f2 * f3 * f3
                - f2 * f2 * f4;
            let quadratic = 2.0 * f1 * f3 - 3.0 * f0 * f4 + f2 * f2;
            8.0 * quartic + 4.0 * cubic + 2.0 * quadratic + f4
        }
    };
    Ok(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Create(usize),
    Annihilate(usize),
}

/// Contraction `⟨a b⟩` in a translation-invariant, number-conserving
/// Gaussian state.
fn contraction(a: Op, b: Op, f: &[f64]) -> f64 {
    match (a, b) {
        (Op::Create(j), Op::Annihilate(l)) => f[j.abs_diff(l)],
        (Op::Annihilate(j), Op::Create(l)) => {
            let delta = if j == l { 1.0 } else { 0.0 };
            delta - f[j.abs_diff(l)]
        }
        _ => 0.0,
    }
}

/// Sum over all perfect matchings of `ops`, each weighted by the sign of its
/// permutation and the product of contractions.
fn wick_expectation(ops: &[Op], f: &[f64]) -> f64 {
    if ops.is_empty() {
        return 1.0;
    }
    if ops.len() % 2 == 1 {
        return 0.0;
    }
    let first = ops[0];
    let mut total = 0.0;
    let mut rest = Vec::with_capacity(ops.len() - 2);
    for j in 1..ops.len() {
        let c = contraction(first, ops[j], f);
        if c == 0.0 {
            continue;
        }
        rest.clear();
        rest.extend_from_slice(&ops[1..j]);
        rest.extend_from_slice(&ops[j + 1..]);
        // moving ops[j] next to ops[0] crosses j - 1 fermion operators
        let sign = if (j - 1) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * c * wick_expectation(&rest, f);
    }
    total
}

/// `Z` by brute-force Wick expansion, valid for `1 <= m <= 8`.
pub fn z_string_wick(f: &FermiCoefficients, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::UnsupportedSeparation(m));
    }
    if m > MAX_WICK_SEPARATION {
        return Err(Error::ComplexityCap(m));
    }
    coefficient(f, m)?;
    let fv = f.values();

    // Expand Π(1 − 2 n_k) over subsets of the string sites.
    let mut total = 0.0;
    let mut ops = Vec::with_capacity(2 * m + 2);
    for subset in 0u32..(1 << m) {
        ops.clear();
        ops.push(Op::Create(0));
        for k in 0..m {
            if subset & (1 << k) != 0 {
                ops.push(Op::Create(k));
                ops.push(Op::Annihilate(k));
            }
        }
        ops.push(Op::Annihilate(m));
        let weight = (-2.0f64).powi(subset.count_ones() as i32);
        total += weight * wick_expectation(&ops, fv);
    }
    Ok(total)
}

/// Builds the X-state entries: the expanded polynomials for `m = 2..=4`,
/// the pairing enumeration for `m = 1`.
pub fn two_site_elements(f: &FermiCoefficients, m: usize) -> Result<TwoSiteElements> {
    let z = match m {
        1 => z_string_wick(f, 1)?,
        2..=4 => z_element(f, m)?,
        _ => return Err(Error::UnsupportedSeparation(m)),
    };
    let d = diagonal_elements(f, m)?;
    Ok(TwoSiteElements {
        x_plus: d.x_plus,
        x_minus: d.x_minus,
        y_plus: d.y_plus,
        y_minus: d.y_minus,
        z,
        separation: m,
    })
}

/// Largest `|z_element − z_string_wick|` over `samples` seeded random
/// coefficient vectors (`f_0 ∈ [0, 1]`, others in `[−0.5, 0.5]`).
pub fn wick_identity_check(m: usize, samples: usize, seed: u64) -> Result<f64> {
    if !(2..=4).contains(&m) {
        return Err(Error::UnsupportedSeparation(m));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let mut values: Vec<f64> = (0..=4).map(|_| rng.random_range(-0.5..=0.5)).collect();
        values[0] = rng.random_range(0.0..=1.0);
        let f = FermiCoefficients::from_values(values);
        let dev = (z_element(&f, m)? - z_string_wick(&f, m)?).abs();
        worst = worst.max(dev);
    }
    Ok(worst)
}
