//! The two-site X-state density matrix
//!
//! ```text
//! ⎡ X⁺  0   0   0  ⎤
//! ⎢ 0   Y⁺  Z*  0  ⎥
//! ⎢ 0   Z   Y⁻  0  ⎥
//! ⎣ 0   0   0   X⁻ ⎦
//! ```
//!
//! in the basis (↑↑, ↑↓, ↓↑, ↓↓), its spectrum and its single-site marginals.
//! Entropies are in bits.

use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::format::significant;
use crate::wick::TwoSiteElements;

/// Trace and eigenvalue slack tolerated by [`assemble`].
pub const STATE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSiteRDM {
    elements: TwoSiteElements,
}

/// Validates `e` and wraps it as a state.
pub fn assemble(e: TwoSiteElements) -> Result<TwoSiteRDM> {
    let entries = [e.x_plus, e.x_minus, e.y_plus, e.y_minus, e.z];
    if entries.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotAState(format!("non-finite entry in {e:?}")));
    }
    let trace = e.diagonal_sum();
    if (trace - 1.0).abs() > STATE_TOL {
        return Err(Error::NotAState(format!("trace {trace}")));
    }
    let min = raw_eigenvalues(&e).into_iter().fold(f64::INFINITY, f64::min);
    if min < -STATE_TOL {
        return Err(Error::NotAState(format!("eigenvalue {min}")));
    }
    Ok(TwoSiteRDM { elements: e })
}

/// Closed-form spectrum: `X⁺`, `X⁻` and the two central-block eigenvalues.
fn raw_eigenvalues(e: &TwoSiteElements) -> [f64; 4] {
    let mean = 0.5 * (e.y_plus + e.y_minus);
    let half_gap = 0.5 * (e.y_plus - e.y_minus);
    let r = half_gap.hypot(e.z.abs());
    [e.x_plus, e.x_minus, mean + r, mean - r]
}

impl TwoSiteRDM {
    pub fn elements(&self) -> &TwoSiteElements {
        &self.elements
    }

    pub fn separation(&self) -> usize {
        self.elements.separation
    }

    pub fn trace(&self) -> f64 {
        self.elements.diagonal_sum()
    }

    /// Dense 4×4 matrix. `Z` is real for this model, so `Z* = Z`.
    pub fn matrix(&self) -> Matrix4<f64> {
        let e = &self.elements;
        #[rustfmt::skip]
        let m = Matrix4::new(
            e.x_plus, 0.0,      0.0,       0.0,
            0.0,      e.y_plus, e.z,       0.0,
            0.0,      e.z,      e.y_minus, 0.0,
            0.0,      0.0,      0.0,       e.x_minus,
        );
        m
    }

    /// Diagonal part `ρ_d` (all coherences removed).
    pub fn diagonal(&self) -> [f64; 4] {
        let e = &self.elements;
        [e.x_plus, e.y_plus, e.y_minus, e.x_minus]
    }

    /// Spectrum in descending order. Round-off negatives (down to
    /// `-STATE_TOL`) are clamped to zero and the rest renormalized.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut ev = raw_eigenvalues(&self.elements);
        for v in &mut ev {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = ev.iter().sum();
        for v in &mut ev {
            *v /= sum;
        }
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    /// Diagonal of the single-site marginal, `(p↑, p↓)`. Both marginals of
    /// an X-state are diagonal.
    pub fn reduced_single_site(&self, site: Site) -> [f64; 2] {
        let e = &self.elements;
        match site {
            Site::First => [e.x_plus + e.y_plus, e.y_minus + e.x_minus],
            Site::Second => [e.x_plus + e.y_minus, e.y_plus + e.x_minus],
        }
    }

    pub fn entropy(&self) -> f64 {
        von_neumann_entropy(&self.eigenvalues())
    }

    /// Row-major printout with 6 significant digits.
    pub fn pretty(&self) -> String {
        let m = self.matrix();
        let cells: Vec<Vec<String>> = (0..4)
            .map(|i| (0..4).map(|j| significant(m[(i, j)], 6)).collect())
            .collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        let mut out = String::new();
        for row in cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            out.push_str(&line.join("  "));
            out.push('\n');
        }
        out
    }
}

/// `x log₂ x` with `0 log 0 = 0`; non-positive arguments contribute nothing.
pub fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Shannon/von Neumann entropy of a probability vector, in bits.
pub fn von_neumann_entropy(probabilities: &[f64]) -> f64 {
    -probabilities.iter().map(|&p| xlog2x(p)).sum::<f64>()
}

/// Binary entropy `H(x)`; arguments within 1e-12 outside `[0, 1]` are clamped.
pub fn binary_entropy(x: f64) -> f64 {
    debug_assert!((-1e-12..=1.0 + 1e-12).contains(&x), "H({x}) out of range");
    let x = x.clamp(0.0, 1.0);
    -(xlog2x(x) + xlog2x(1.0 - x))
}
