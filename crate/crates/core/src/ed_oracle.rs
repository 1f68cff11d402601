//! Exact diagonalization of finite periodic XX rings.
//!
//! Two independent routes to the same many-body spectrum:
//!
//! - the spin Hamiltonian `J Σ (SˣSˣ + SʸSʸ) − h Σ Sᶻ` on a ring of `N` sites
//!   (bond `N → 1` included, `S = σ/2`), diagonalized densely in each sector of
//!   fixed total magnetization;
//! - free fermions: with `n` particles the Jordan-Wigner boundary term is
//!   periodic for odd `n` and antiperiodic for even `n`, so the momenta are
//!   `2πj/N` or `2π(j + ½)/N` respectively, and every energy is
//!   `Σ_occupied ε(k) + hN/2`.
//!
//! The spin route also yields thermal and ground-state two-site density
//! matrices for comparison with the thermodynamic-limit pipeline.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::free_fermion::{dispersion, ModelParams};
use crate::rdm::{assemble, TwoSiteRDM};
use crate::wick::TwoSiteElements;

/// Largest ring handled by the dense path.
pub const MAX_DENSE_SITES: usize = 14;

/// Relative gap below which eigenvalues count as degenerate ground states.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Entries outside the X pattern must stay below this.
pub const X_STRUCTURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteChainSpec {
    sites: usize,
    params: ModelParams,
}

impl FiniteChainSpec {
    pub fn new(sites: usize, params: ModelParams) -> Result<Self> {
        if sites < 2 {
            return Err(Error::InvalidParams(format!("ring needs >= 2 sites, got {sites}")));
        }
        if sites > MAX_DENSE_SITES {
            return Err(Error::BudgetExceeded {
                sites,
                max: MAX_DENSE_SITES,
            });
        }
        Ok(Self { sites, params })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }
}

/// One magnetization block: basis states with `up_count` spins up.
/// Bit `i` of a basis state is 1 when site `i` points up.
#[derive(Debug, Clone)]
pub struct Sector {
    pub up_count: usize,
    pub basis: Vec<u32>,
    pub matrix: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct SpinHamiltonian {
    pub sites: usize,
    pub sectors: Vec<Sector>,
}

impl SpinHamiltonian {
    pub fn sector_sizes(&self) -> Vec<usize> {
        self.sectors.iter().map(|s| s.basis.len()).collect()
    }

    pub fn dimension(&self) -> usize {
        self.sectors.iter().map(|s| s.basis.len()).sum()
    }
}

pub fn build_spin_hamiltonian(spec: &FiniteChainSpec) -> Result<SpinHamiltonian> {
    let n = spec.sites;
    let j = spec.params.coupling();
    let h = spec.params.field();
    let sectors = (0..=n)
        .map(|up| {
            let basis: Vec<u32> = (0u32..1 << n).filter(|s| s.count_ones() as usize == up).collect();
            let index: HashMap<u32, usize> = basis.iter().enumerate().map(|(i, &s)| (s, i)).collect();
            let dim = basis.len();
            let mut matrix = DMatrix::zeros(dim, dim);
            for (col, &state) in basis.iter().enumerate() {
                matrix[(col, col)] += -h * (up as f64 - 0.5 * n as f64);
                for i in 0..n {
                    let k = (i + 1) % n;
                    let (bi, bk) = ((state >> i) & 1, (state >> k) & 1);
                    if bi != bk {
                        // (J/2)(S⁺S⁻ + S⁻S⁺) swaps an antiparallel pair
                        let flipped = state ^ (1 << i) ^ (1 << k);
                        matrix[(index[&flipped], col)] += 0.5 * j;
                    }
                }
            }
            Sector {
                up_count: up,
                basis,
                matrix,
            }
        })
        .collect();
    Ok(SpinHamiltonian { sites: n, sectors })
}

/// Eigenpairs of one sector; columns of `vectors` are eigenvectors.
#[derive(Debug, Clone)]
pub struct SectorEigen {
    pub up_count: usize,
    pub basis: Vec<u32>,
    pub energies: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn diagonalize(hamiltonian: &SpinHamiltonian) -> Vec<SectorEigen> {
    hamiltonian
        .sectors
        .par_iter()
        .map(|s| {
            let eig = SymmetricEigen::new(s.matrix.clone());
            SectorEigen {
                up_count: s.up_count,
                basis: s.basis.clone(),
                energies: eig.eigenvalues,
                vectors: eig.eigenvectors,
            }
        })
        .collect()
}

/// Sorted spin-representation spectrum.
pub fn spin_spectrum(spec: &FiniteChainSpec) -> Result<Vec<f64>> {
    let ham = build_spin_hamiltonian(spec)?;
    let mut energies: Vec<f64> = ham
        .sectors
        .par_iter()
        .flat_map_iter(|s| SymmetricEigen::new(s.matrix.clone()).eigenvalues.iter().copied().collect::<Vec<_>>())
        .collect();
    energies.sort_by(f64::total_cmp);
    Ok(energies)
}

/// Single-particle momenta for fermion number parity `parity` (0 even, 1 odd).
pub fn momenta(sites: usize, parity: usize) -> Vec<f64> {
    let shift = if parity.is_multiple_of(2) { 0.5 } else { 0.0 };
    (0..sites)
        .map(|j| 2.0 * PI * (j as f64 + shift) / sites as f64)
        .collect()
}

/// Sorted many-body spectrum assembled from free-fermion levels.
pub fn fermion_spectrum(spec: &FiniteChainSpec) -> Vec<f64> {
    let n = spec.sites;
    let offset = 0.5 * spec.params.field() * n as f64;
    let levels: [Vec<f64>; 2] = [0, 1].map(|parity| {
        momenta(n, parity)
            .into_iter()
            .map(|k| dispersion(k, &spec.params))
            .collect()
    });
    let mut energies: Vec<f64> = (0u32..1 << n)
        .map(|occ| {
            let parity = (occ.count_ones() % 2) as usize;
            let e: f64 = (0..n)
                .filter(|&i| occ & (1 << i) != 0)
                .map(|i| levels[parity][i])
                .sum();
            e + offset
        })
        .collect();
    energies.sort_by(f64::total_cmp);
    energies
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub spin_energies: Vec<f64>,
    pub fermion_energies: Vec<f64>,
    pub max_abs_deviation: f64,
}

pub fn spectrum_match(spec: &FiniteChainSpec) -> Result<SpectrumReport> {
    let spin_energies = spin_spectrum(spec)?;
    let fermion_energies = fermion_spectrum(spec);
    let max_abs_deviation = spin_energies
        .iter()
        .zip(&fermion_energies)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(SpectrumReport {
        spin_energies,
        fermion_energies,
        max_abs_deviation,
    })
}

/// Index in (↑↑, ↑↓, ↓↑, ↓↓) of sites `(i, j)` in a basis state.
fn pair_index(state: u32, i: usize, j: usize) -> usize {
    let down_i = 1 - ((state >> i) & 1) as usize;
    let down_j = 1 - ((state >> j) & 1) as usize;
    2 * down_i + down_j
}

/// Reduced density matrix of sites `(0, m)` for the mixture
/// `Σ_a w_a |a⟩⟨a|` of sector eigenvectors.
fn reduce_to_pair(
    sectors: &[SectorEigen],
    weights: &[Vec<f64>],
    sites: usize,
    m: usize,
) -> Matrix4<f64> {
    let (i, j) = (0usize, m);
    let mask = (1u32 << i) | (1u32 << j);
    let mut rho = Matrix4::zeros();
    for (sector, w) in sectors.iter().zip(weights) {
        let index: HashMap<u32, usize> = sector.basis.iter().enumerate().map(|(p, &s)| (s, p)).collect();
        let active: Vec<usize> = (0..w.len()).filter(|&a| w[a] != 0.0).collect();
        for (p, &s) in sector.basis.iter().enumerate() {
            let rest = s & !mask;
            // every partner that agrees with `s` away from the pair
            for bits in 0u32..4 {
                let partner = rest | (((bits >> 1) & 1) << i) | ((bits & 1) << j);
                let Some(&q) = index.get(&partner) else {
                    continue;
                };
                let amp: f64 = active
                    .iter()
                    .map(|&a| w[a] * sector.vectors[(p, a)] * sector.vectors[(q, a)])
                    .sum();
                rho[(pair_index(s, i, j), pair_index(partner, i, j))] += amp;
            }
        }
    }
    debug_assert!(sites > m);
    rho
}

fn elements_from_matrix(rho: &Matrix4<f64>, m: usize) -> Result<TwoSiteElements> {
    let mut off = 0.0f64;
    for r in 0..4 {
        for c in 0..4 {
            let in_x = r == c || (r, c) == (1, 2) || (r, c) == (2, 1);
            if !in_x {
                off = off.max(rho[(r, c)].abs());
            }
        }
    }
    if off > X_STRUCTURE_TOL {
        return Err(Error::Inconsistent(format!("entry {off} outside the X pattern")));
    }
    if (rho[(1, 2)] - rho[(2, 1)]).abs() > X_STRUCTURE_TOL {
        return Err(Error::Inconsistent("two-site matrix is not symmetric".to_string()));
    }
    Ok(TwoSiteElements {
        x_plus: rho[(0, 0)],
        y_plus: rho[(1, 1)],
        y_minus: rho[(2, 2)],
        x_minus: rho[(3, 3)],
        z: rho[(2, 1)],
        separation: m,
    })
}

fn check_separation(spec: &FiniteChainSpec, m: usize) -> Result<()> {
    if m == 0 || 2 * m >= spec.sites {
        return Err(Error::InvalidParams(format!(
            "separation {m} needs 1 <= m < N/2 (N = {})",
            spec.sites
        )));
    }
    Ok(())
}

/// Two-site state of sites `(i, i+m)` in the Gibbs state `e^{−βH}/Z`.
pub fn thermal_two_site_rdm(spec: &FiniteChainSpec, m: usize) -> Result<TwoSiteRDM> {
    check_separation(spec, m)?;
    let beta = spec.params.beta().ok_or_else(|| {
        Error::InvalidParams("thermal state needs T > 0; use ground_two_site_rdm".to_string())
    })?;
    let sectors = diagonalize(&build_spin_hamiltonian(spec)?);
    let e0 = sectors
        .iter()
        .flat_map(|s| s.energies.iter().copied())
        .fold(f64::INFINITY, f64::min);
    let mut weights: Vec<Vec<f64>> = sectors
        .iter()
        .map(|s| s.energies.iter().map(|&e| (-beta * (e - e0)).exp()).collect())
        .collect();
    let partition: f64 = weights.iter().flatten().sum();
    for w in weights.iter_mut().flatten() {
        *w /= partition;
    }
    let rho = reduce_to_pair(&sectors, &weights, spec.sites, m);
    assemble(elements_from_matrix(&rho, m)?)
}

/// Two-site state in the ground space, degenerate ground states mixed with
/// equal weight.
pub fn ground_two_site_rdm(spec: &FiniteChainSpec, m: usize) -> Result<TwoSiteRDM> {
    check_separation(spec, m)?;
    let sectors = diagonalize(&build_spin_hamiltonian(spec)?);
    let e0 = sectors
        .iter()
        .flat_map(|s| s.energies.iter().copied())
        .fold(f64::INFINITY, f64::min);
    let cutoff = e0 + DEGENERACY_TOL * e0.abs().max(1.0);
    let mut weights: Vec<Vec<f64>> = sectors
        .iter()
        .map(|s| s.energies.iter().map(|&e| if e <= cutoff { 1.0 } else { 0.0 }).collect())
        .collect();
    let count: f64 = weights.iter().flatten().sum();
    for w in weights.iter_mut().flatten() {
        *w /= count;
    }
    let rho = reduce_to_pair(&sectors, &weights, spec.sites, m);
    assemble(elements_from_matrix(&rho, m)?)
}
