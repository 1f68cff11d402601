//! Correlation measures for the two-site X-state.
//!
//! Every closed form here has an independent generic counterpart:
//!
//! | closed form                 | cross-check                              |
//! |-----------------------------|------------------------------------------|
//! | [`concurrence`]             | [`concurrence_spin_flip`] (ρρ̃ spectrum)  |
//! | [`quantum_discord`]         | [`discord_bruteforce`] (measurement scan)|
//! | [`quantum_coherence`]       | [`coherence_bruteforce`] (4×4 eigen)     |

use nalgebra::{Complex, Matrix2, Matrix4, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::free_fermion::{fermi_coefficients, ModelParams};
use crate::rdm::{assemble, binary_entropy, von_neumann_entropy, xlog2x, Site, TwoSiteRDM};
use crate::wick::two_site_elements;

/// Negative measure values above this are float noise and clamp to zero.
pub const NEGATIVE_SLACK: f64 = 1e-9;

/// `Y⁺ = Y⁻` tolerance for the explicit coherence formula.
pub const SYMMETRY_TOL: f64 = 1e-9;

fn clamp_non_negative(name: &str, value: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -NEGATIVE_SLACK {
        Ok(0.0)
    } else {
        Err(Error::Inconsistent(format!("{name} = {value} < 0")))
    }
}

pub fn concurrence(rdm: &TwoSiteRDM) -> f64 {
    let e = rdm.elements();
    let product = (e.x_plus * e.x_minus).max(0.0);
    (2.0 * (e.z.abs() - product.sqrt())).max(0.0)
}

fn psd_sqrt(m: &Matrix4<f64>) -> Matrix4<f64> {
    let eig = SymmetricEigen::new(*m);
    let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    eig.eigenvectors * Matrix4::from_diagonal(&roots) * eig.eigenvectors.transpose()
}

/// Concurrence from the spin-flipped state `ρ̃ = (σʸ⊗σʸ) ρ* (σʸ⊗σʸ)`.
///
/// The `λᵢ` (square roots of the spectrum of `ρρ̃`) are the singular values
/// of `√ρ √ρ̃`, which avoids taking square roots of tiny eigenvalues twice.
pub fn concurrence_spin_flip(rdm: &TwoSiteRDM) -> f64 {
    let rho = rdm.matrix();
    #[rustfmt::skip]
    let flip = Matrix4::new(
        0.0,  0.0, 0.0, -1.0,
        0.0,  0.0, 1.0,  0.0,
        0.0,  1.0, 0.0,  0.0,
        -1.0, 0.0, 0.0,  0.0,
    );
    // ρ is real here, so ρ* = ρ.
    let sqrt_rho = psd_sqrt(&rho);
    let sqrt_tilde = flip * sqrt_rho * flip;
    let mut lambda: Vec<f64> = (sqrt_rho * sqrt_tilde).singular_values().iter().copied().collect();
    lambda.sort_by(|a, b| b.total_cmp(a));
    (lambda[0] - lambda[1] - lambda[2] - lambda[3]).max(0.0)
}

pub fn mutual_information(rdm: &TwoSiteRDM) -> f64 {
    let a = von_neumann_entropy(&rdm.reduced_single_site(Site::First));
    let b = von_neumann_entropy(&rdm.reduced_single_site(Site::Second));
    a + b - rdm.entropy()
}

/// The two candidate branches of the X-state formula, measurement on the
/// second site: branch 1 measures in the transverse plane, branch 2 along z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscordBranches {
    pub conditional_entropy: [f64; 2],
    pub classical: [f64; 2],
    pub discord: [f64; 2],
}

impl DiscordBranches {
    /// Index of the branch with the smaller conditional entropy; it maximizes
    /// CC and minimizes QD at the same time.
    pub fn optimal(&self) -> usize {
        if self.conditional_entropy[0] <= self.conditional_entropy[1] {
            0
        } else {
            1
        }
    }
}

pub fn discord_branches(rdm: &TwoSiteRDM) -> DiscordBranches {
    let [r11, r22, r33, r44] = rdm.diagonal();
    let r23 = rdm.elements().z;
    // Magnetization conservation forbids ↑↑/↓↓ coherence.
    let r14 = 0.0f64;

    let entropy_a = binary_entropy(r11 + r22);
    let entropy_b = binary_entropy(r11 + r33);
    let sum_lambda_log: f64 = rdm.eigenvalues().iter().map(|&l| xlog2x(l)).sum();

    let w = 0.5
        * (1.0
            + ((1.0 - 2.0 * (r33 + r44)).powi(2) + 4.0 * (r14.abs() + r23.abs()).powi(2)).sqrt());
    let d1 = binary_entropy(w.min(1.0));
    let d2 = von_neumann_entropy(&[r11, r22, r33, r44]) - entropy_b;
    let d = [d1, d2];

    DiscordBranches {
        conditional_entropy: d,
        classical: d.map(|dj| entropy_a - dj),
        discord: d.map(|dj| entropy_b + sum_lambda_log + dj),
    }
}

pub fn classical_correlations(rdm: &TwoSiteRDM) -> Result<f64> {
    let b = discord_branches(rdm);
    clamp_non_negative("classical correlations", b.classical[b.optimal()])
}

pub fn quantum_discord(rdm: &TwoSiteRDM) -> Result<f64> {
    let b = discord_branches(rdm);
    clamp_non_negative("quantum discord", b.discord[b.optimal()])
}

/// Bloch-angle grid for [`discord_bruteforce`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AngularGrid {
    /// Samples of θ over `[0, π]`, endpoints included.
    pub theta_steps: usize,
    /// Samples of φ over `[0, π)`.
    pub phi_steps: usize,
}

impl Default for AngularGrid {
    fn default() -> Self {
        Self {
            theta_steps: 181,
            phi_steps: 90,
        }
    }
}

type C64 = Complex<f64>;

fn partial_trace_first(rho: &Matrix4<f64>) -> Matrix2<f64> {
    Matrix2::from_fn(|b, b2| rho[(b, b2)] + rho[(2 + b, 2 + b2)])
}

fn hermitian2_entropy(m: &Matrix2<C64>) -> (f64, f64) {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let p = a + d;
    if p <= 0.0 {
        return (0.0, 0.0);
    }
    let r = ((a - d).powi(2) + 4.0 * m[(0, 1)].norm_sqr()).sqrt() / p;
    (p, binary_entropy((0.5 * (1.0 + r)).min(1.0)))
}

/// `Σ_k p_k S(ρ_A|k)` after a projective measurement of the second site
/// along the Bloch direction `(θ, φ)`.
fn measured_conditional_entropy(rho: &Matrix4<f64>, theta: f64, phi: f64) -> f64 {
    let (st, ct) = theta.sin_cos();
    let n = [st * phi.cos(), st * phi.sin(), ct];
    let mut total = 0.0;
    for sign in [1.0, -1.0] {
        let proj = Matrix2::new(
            C64::new(0.5 * (1.0 + sign * n[2]), 0.0),
            C64::new(0.5 * sign * n[0], -0.5 * sign * n[1]),
            C64::new(0.5 * sign * n[0], 0.5 * sign * n[1]),
            C64::new(0.5 * (1.0 - sign * n[2]), 0.0),
        );
        // (tr_B[(1⊗Π)ρ])_{a a'} = Σ_{b b'} Π_{b b'} ρ_{(a b'),(a' b)}
        let cond = Matrix2::from_fn(|a, a2| {
            let mut s = C64::new(0.0, 0.0);
            for b in 0..2 {
                for b2 in 0..2 {
                    s += proj[(b, b2)] * rho[(2 * a + b2, 2 * a2 + b)];
                }
            }
            s
        });
        let (p, s) = hermitian2_entropy(&cond);
        total += p * s;
    }
    total
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn dense_entropy(m: &Matrix4<f64>) -> f64 {
    let ev: Vec<f64> = SymmetricEigen::new(*m).eigenvalues.iter().copied().collect();
    von_neumann_entropy(&ev)
}

/// Discord by direct minimization of the measured conditional entropy over
/// projective measurements on the second site.
///
/// Scans the `(θ, φ)` grid, then polishes the best grid point with
/// golden-section searches along θ, φ and θ again, each inside the
/// neighbouring grid cells.
pub fn discord_bruteforce(rdm: &TwoSiteRDM, grid: AngularGrid) -> f64 {
    let rho = rdm.matrix();
    let theta_steps = grid.theta_steps.max(2);
    let phi_steps = grid.phi_steps.max(1);
    let d_theta = std::f64::consts::PI / (theta_steps - 1) as f64;
    let d_phi = std::f64::consts::PI / phi_steps as f64;

    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..theta_steps {
        let theta = i as f64 * d_theta;
        for j in 0..phi_steps {
            let phi = j as f64 * d_phi;
            let s = measured_conditional_entropy(&rho, theta, phi);
            if s < best.0 {
                best = (s, theta, phi);
            }
        }
    }

    let (mut min, mut theta, mut phi) = best;
    let tol = 1e-10;
    let (t, s) = golden_section(
        |t| measured_conditional_entropy(&rho, t, phi),
        (theta - d_theta).max(0.0),
        (theta + d_theta).min(std::f64::consts::PI),
        tol,
    );
    if s < min {
        min = s;
        theta = t;
    }
    let (p, s) = golden_section(
        |p| measured_conditional_entropy(&rho, theta, p),
        phi - d_phi,
        phi + d_phi,
        tol,
    );
    if s < min {
        min = s;
        phi = p;
    }
    let (_, s) = golden_section(
        |t| measured_conditional_entropy(&rho, t, phi),
        (theta - d_theta).max(0.0),
        (theta + d_theta).min(std::f64::consts::PI),
        tol,
    );
    min = min.min(s);

    let entropy_b = {
        let m = partial_trace_first(&rho);
        let ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        von_neumann_entropy(&ev)
    };
    (entropy_b - dense_entropy(&rho) + min).max(0.0)
}

/// Jensen-Shannon coherence from the explicit formula, which assumes
/// `Y⁺ = Y⁻` (then the central-block eigenvalues are `Y ± |Z|` and
/// `Y ± |Z|/2`). The `X±` contributions cancel between the three entropies.
pub fn quantum_coherence(rdm: &TwoSiteRDM) -> Result<f64> {
    let e = rdm.elements();
    if (e.y_plus - e.y_minus).abs() > SYMMETRY_TOL {
        return Err(Error::AssumptionViolated(format!(
            "explicit coherence formula needs Y+ = Y- (got {} vs {})",
            e.y_plus, e.y_minus
        )));
    }
    let z = e.z.abs();
    let (yp, ym) = (e.y_plus, e.y_minus);
    let mixture = -xlog2x(yp - 0.5 * z) - xlog2x(ym + 0.5 * z);
    let state = -xlog2x(yp - z) - xlog2x(ym + z);
    let dephased = -xlog2x(yp) - xlog2x(ym);
    let jsd = clamp_non_negative("Jensen-Shannon divergence", mixture - 0.5 * state - 0.5 * dephased)?;
    Ok(jsd.sqrt())
}

/// `√J(ρ, ρ_d)` with every entropy taken from a dense eigendecomposition.
/// Valid for any two-qubit state, no symmetry assumed.
pub fn coherence_bruteforce(rdm: &TwoSiteRDM) -> f64 {
    let rho = rdm.matrix();
    let dephased = Matrix4::from_diagonal(&rho.diagonal());
    let mixture = (rho + dephased) * 0.5;
    let jsd = dense_entropy(&mixture) - 0.5 * dense_entropy(&rho) - 0.5 * dense_entropy(&dephased);
    jsd.max(0.0).sqrt()
}

/// Coherence with the explicit formula when it applies, the dense route otherwise.
pub fn coherence(rdm: &TwoSiteRDM) -> Result<f64> {
    match quantum_coherence(rdm) {
        Err(Error::AssumptionViolated(_)) => Ok(coherence_bruteforce(rdm)),
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub temperature: f64,
    pub field: f64,
    pub separation: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub point: Point,
    pub concurrence: f64,
    pub mutual_information: f64,
    pub classical_correlations: f64,
    pub quantum_discord: f64,
    pub quantum_coherence: f64,
}

pub fn report_for_state(rdm: &TwoSiteRDM, point: Point) -> Result<CorrelationReport> {
    let branches = discord_branches(rdm);
    let j = branches.optimal();
    Ok(CorrelationReport {
        point,
        concurrence: concurrence(rdm),
        mutual_information: clamp_non_negative("mutual information", mutual_information(rdm))?,
        classical_correlations: clamp_non_negative("classical correlations", branches.classical[j])?,
        quantum_discord: clamp_non_negative("quantum discord", branches.discord[j])?,
        quantum_coherence: coherence(rdm)?,
    })
}

/// Two-site state at separation `m` in the thermodynamic limit.
pub fn two_site_state(params: &ModelParams, m: usize) -> Result<TwoSiteRDM> {
    let f = fermi_coefficients(m.max(4), params)?;
    assemble(two_site_elements(&f, m)?)
}

/// Full pipeline for one `(T, h, m)` point.
pub fn all_measures(params: &ModelParams, m: usize) -> Result<CorrelationReport> {
    let rdm = two_site_state(params, m)?;
    report_for_state(
        &rdm,
        Point {
            temperature: params.temperature(),
            field: params.field(),
            separation: m,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wick::TwoSiteElements;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn state(xp: f64, xm: f64, yp: f64, ym: f64, z: f64) -> TwoSiteRDM {
        assemble(TwoSiteElements {
            x_plus: xp,
            x_minus: xm,
            y_plus: yp,
            y_minus: ym,
            z,
            separation: 2,
        })
        .unwrap()
    }

    fn point(h: f64, t: f64, m: usize) -> TwoSiteRDM {
        two_site_state(&ModelParams::unit_coupling(h, t).unwrap(), m).unwrap()
    }

    #[test]
    fn trivial_states_carry_nothing() {
        for r in [state(0.25, 0.25, 0.25, 0.25, 0.0), state(1.0, 0.0, 0.0, 0.0, 0.0)] {
            assert_eq!(concurrence(&r), 0.0);
            assert!(mutual_information(&r).abs() < 1e-15);
            assert!(classical_correlations(&r).unwrap().abs() < 1e-15);
            assert!(quantum_discord(&r).unwrap().abs() < 1e-15);
            assert!(discord_bruteforce(&r, AngularGrid::default()).abs() < 1e-12);
            assert_eq!(quantum_coherence(&r).unwrap(), 0.0);
            assert!(coherence_bruteforce(&r) < 1e-7);
        }
    }

    #[test]
    fn bell_like_central_block() {
        let r = state(0.0, 0.0, 0.5, 0.5, 0.5);
        assert!((mutual_information(&r) - 2.0).abs() < 1e-12);
        assert!((concurrence(&r) - 1.0).abs() < 1e-15);
        // mixture eigenvalues {3/4, 1/4}
        let want = (binary_entropy(0.25) - 0.5).sqrt();
        assert!((coherence_bruteforce(&r) - want).abs() < 1e-12);
        assert!((quantum_coherence(&r).unwrap() - want).abs() < 1e-12);
        assert!((want - 0.557923).abs() < 1e-6);
    }

    #[test]
    fn classical_mixture_of_antiparallel_pairs_has_one_bit() {
        // marginals maximally mixed, joint entropy 1 bit
        let r = state(0.0, 0.0, 0.5, 0.5, 0.0);
        assert!((mutual_information(&r) - 1.0).abs() < 1e-12);
        assert!((classical_correlations(&r).unwrap() - 1.0).abs() < 1e-12);
        assert!(quantum_discord(&r).unwrap().abs() < 1e-12);
    }

    #[test]
    fn half_filling_second_neighbour() {
        let r = point(0.0, 0.0, 2);
        assert_eq!(concurrence(&r), 0.0);
        let qd = quantum_discord(&r).unwrap();
        assert!(qd > 0.0);
        let cc = classical_correlations(&r).unwrap();
        assert!((qd + cc - mutual_information(&r)).abs() < 1e-12);
        let bf = discord_bruteforce(&r, AngularGrid::default());
        assert!((qd - bf).abs() < 1e-6, "{qd} vs {bf}");
        let qc = quantum_coherence(&r).unwrap();
        assert!(qc > 0.0);
        assert!((qc - coherence_bruteforce(&r)).abs() < 1e-10);
    }

    #[test]
    fn entangled_below_saturation() {
        assert!(concurrence(&point(0.95, 0.0, 2)) > 0.0);
    }

    #[test]
    fn thermal_point_discord_matches_oracle() {
        let r = point(0.7, 0.2, 2);
        let qd = quantum_discord(&r).unwrap();
        let bf = discord_bruteforce(&r, AngularGrid::default());
        assert!((qd - bf).abs() < 1e-6, "{qd} vs {bf}");
    }

    #[test]
    fn asymmetric_state_routes_to_dense_coherence() {
        let r = state(0.1, 0.2, 0.4, 0.3, 0.1);
        assert!(matches!(quantum_coherence(&r), Err(Error::AssumptionViolated(_))));
        assert_eq!(coherence(&r).unwrap(), coherence_bruteforce(&r));
    }

    #[test]
    fn pipeline_limits() {
        let hot = all_measures(&ModelParams::unit_coupling(0.3, f64::INFINITY).unwrap(), 2).unwrap();
        let polarized = all_measures(&ModelParams::unit_coupling(2.0, 0.0).unwrap(), 3).unwrap();
        for r in [hot, polarized] {
            for v in [
                r.concurrence,
                r.mutual_information,
                r.classical_correlations,
                r.quantum_discord,
                r.quantum_coherence,
            ] {
                assert!(v.abs() < 1e-12, "{r:?}");
            }
        }
        let half = all_measures(&ModelParams::unit_coupling(0.0, 0.0).unwrap(), 2).unwrap();
        assert_eq!(half.concurrence, 0.0);
        assert!(half.quantum_discord > 0.0 && half.quantum_coherence > 0.0);
    }

    #[test]
    fn nearest_neighbour_extension() {
        // m = 1 at half filling: |Z| = 1/π, X± = 1/4 − 1/π².
        let r = all_measures(&ModelParams::unit_coupling(0.0, 0.0).unwrap(), 1).unwrap();
        let want = 2.0 * (1.0 / PI - (0.25 - 1.0 / (PI * PI)));
        assert!((r.concurrence - want).abs() < 1e-14);
        assert!(all_measures(&ModelParams::unit_coupling(0.0, 0.0).unwrap(), 5).is_err());
    }

    #[test]
    fn concurrence_routes_agree_on_grid() {
        for t in [0.0, 0.05, 0.3, 1.0] {
            for i in 0..=30 {
                let h = -1.5 + 0.1 * i as f64;
                for m in 1..=4 {
                    let r = point(h, t, m);
                    let a = concurrence(&r);
                    let b = concurrence_spin_flip(&r);
                    assert!((a - b).abs() < 1e-10, "T={t} h={h} m={m}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn coherence_monotone_in_temperature_at_zero_field() {
        for m in 2..=4 {
            let mut prev = f64::INFINITY;
            for k in 1..=40 {
                let t = 0.05 * k as f64;
                let qc = all_measures(&ModelParams::unit_coupling(0.0, t).unwrap(), m).unwrap().quantum_coherence;
                assert!(qc <= prev + 1e-9, "m={m} T={t}");
                prev = qc;
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn branch_identity_and_signs(h in -2.0f64..2.0, t in prop_oneof![Just(0.0), 0.01f64..3.0], m in 1usize..=4) {
            let r = all_measures(&ModelParams::unit_coupling(h, t).unwrap(), m).unwrap();
            prop_assert!((r.quantum_discord + r.classical_correlations - r.mutual_information).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&r.concurrence));
            prop_assert!((0.0..=1.0).contains(&r.quantum_coherence));
        }

        #[test]
        fn spin_flip_invariance(h in 0.0f64..2.0, t in prop_oneof![Just(0.0), 0.01f64..3.0], m in 1usize..=4) {
            let up = all_measures(&ModelParams::unit_coupling(h, t).unwrap(), m).unwrap();
            let down = all_measures(&ModelParams::unit_coupling(-h, t).unwrap(), m).unwrap();
            prop_assert!((up.concurrence - down.concurrence).abs() < 1e-9);
            prop_assert!((up.mutual_information - down.mutual_information).abs() < 1e-9);
            prop_assert!((up.classical_correlations - down.classical_correlations).abs() < 1e-9);
            prop_assert!((up.quantum_discord - down.quantum_discord).abs() < 1e-9);
            prop_assert!((up.quantum_coherence - down.quantum_coherence).abs() < 1e-9);
        }
    }
}
