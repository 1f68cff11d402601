//! Free-fermion layer: after the Jordan-Wigner map the XX ring is a band of
//! spinless fermions with dispersion `ε(k) = J cos k − h`, and every
//! two-site quantity is a polynomial in the Fermi integrals
//! `f_m = (1/π) ∫₀^π cos(k m) g(k) dk`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature;

/// Absolute tolerance for the thermal Fermi integrals.
pub const QUADRATURE_TOL: f64 = 1e-12;
/// Bisection depth cap for the adaptive quadrature.
pub const QUADRATURE_MAX_DEPTH: u32 = 30;

/// Couplings, field and temperature of `H = J Σ (SˣSˣ + SʸSʸ) − h Σ Sᶻ`.
///
/// Temperature is in energy units (`k_B = 1`). `T = 0` selects the ground
/// state; `T = +∞` is accepted and means `β = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    coupling: f64,
    field: f64,
    temperature: f64,
}

impl ModelParams {
    pub fn new(coupling: f64, field: f64, temperature: f64) -> Result<Self> {
        if !coupling.is_finite() || coupling == 0.0 {
            return Err(Error::InvalidParams(format!(
                "coupling J must be finite and non-zero, got {coupling}"
            )));
        }
        if !field.is_finite() {
            return Err(Error::InvalidParams(format!("field h must be finite, got {field}")));
        }
        if temperature.is_nan() || temperature < 0.0 {
            return Err(Error::InvalidParams(format!(
                "temperature must be >= 0, got {temperature}"
            )));
        }
        Ok(Self {
            coupling,
            field,
            temperature,
        })
    }

    /// `J = 1`, the unit used throughout.
    pub fn unit_coupling(field: f64, temperature: f64) -> Result<Self> {
        Self::new(1.0, field, temperature)
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// Inverse temperature, `None` at `T = 0`.
    pub fn beta(&self) -> Option<f64> {
        if self.temperature == 0.0 {
            None
        } else {
            Some(1.0 / self.temperature)
        }
    }

    pub fn with_field(self, field: f64) -> Result<Self> {
        Self::new(self.coupling, field, self.temperature)
    }

    pub fn with_temperature(self, temperature: f64) -> Result<Self> {
        Self::new(self.coupling, self.field, temperature)
    }
}

/// `f_0 … f_mmax` for one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FermiCoefficients {
    values: Vec<f64>,
    params: Option<ModelParams>,
}

impl FermiCoefficients {
    /// Wraps an arbitrary coefficient vector, e.g. random points for
    /// polynomial identity checks.
    pub fn from_values(values: Vec<f64>) -> Self {
        Self {
            values,
            params: None,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn m_max(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn params(&self) -> Option<&ModelParams> {
        self.params.as_ref()
    }

    pub fn get(&self, m: usize) -> Option<f64> {
        self.values.get(m).copied()
    }
}

impl std::ops::Index<usize> for FermiCoefficients {
    type Output = f64;

    fn index(&self, m: usize) -> &f64 {
        &self.values[m]
    }
}

pub fn dispersion(k: f64, params: &ModelParams) -> f64 {
    params.coupling * k.cos() - params.field
}

/// Logistic `1/(1+e^x)` without overflow for large `|x|`.
fn logistic_complement(x: f64) -> f64 {
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Fermi-Dirac occupation `g(k)`; the zero-temperature step takes the value
/// 1/2 exactly on the Fermi surface.
pub fn fermi_occupation(k: f64, params: &ModelParams) -> f64 {
    let e = dispersion(k, params);
    match params.beta() {
        None => {
            if e < 0.0 {
                1.0
            } else if e > 0.0 {
                0.0
            } else {
                0.5
            }
        }
        Some(0.0) => 0.5,
        Some(beta) => logistic_complement(beta * e),
    }
}

/// Zero-temperature closed form.
fn ground_state_coefficient(m: usize, params: &ModelParams) -> f64 {
    let j = params.coupling;
    let ratio = params.field / j.abs();
    // J < 0 maps onto J > 0 by k -> π − k, which flips the sign of odd harmonics.
    let parity = if j < 0.0 && m % 2 == 1 { -1.0 } else { 1.0 };
    let value = if ratio >= 1.0 {
        if m == 0 {
            1.0
        } else {
            0.0
        }
    } else if ratio <= -1.0 {
        0.0
    } else {
        let k_fermi = ratio.acos();
        if m == 0 {
            (PI - k_fermi) / PI
        } else {
            let mf = m as f64;
            -(mf * k_fermi).sin() / (mf * PI)
        }
    };
    parity * value
}

/// Fermi integral `f_m` in the thermodynamic limit.
pub fn fermi_coefficient(m: usize, params: &ModelParams) -> Result<f64> {
    let beta = match params.beta() {
        None => return Ok(ground_state_coefficient(m, params)),
        Some(b) => b,
    };
    if beta == 0.0 {
        return Ok(if m == 0 { 0.5 } else { 0.0 });
    }
    let mf = m as f64;
    let integrand = |k: f64| (k * mf).cos() * fermi_occupation(k, params);

    // Split at the Fermi point, where the integrand steepens as T -> 0.
    let ratio = params.field / params.coupling;
    let mut edges = vec![0.0];
    if ratio.abs() < 1.0 {
        edges.push(ratio.acos());
    }
    edges.push(PI);

    let mut total = 0.0;
    for w in edges.windows(2) {
        let share = QUADRATURE_TOL * (w[1] - w[0]) / PI;
        total += quadrature::adaptive(&integrand, w[0], w[1], share, QUADRATURE_MAX_DEPTH)
            .map_err(|_| Error::QuadratureNotConverged {
                m,
                max_depth: QUADRATURE_MAX_DEPTH,
            })?;
    }
    Ok(total / PI)
}

/// `f_0 … f_mmax`; `m_max` must be at least 4.
pub fn fermi_coefficients(m_max: usize, params: &ModelParams) -> Result<FermiCoefficients> {
    if m_max < 4 {
        return Err(Error::InvalidParams(format!("m_max must be >= 4, got {m_max}")));
    }
    let values = (0..=m_max)
        .map(|m| fermi_coefficient(m, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(FermiCoefficients {
        values,
        params: Some(*params),
    })
}

/// Finite-ring analogue `(1/N) Σₙ cos(kₙ m) g(kₙ)` with `kₙ = 2πn/N`.
pub fn fermi_coefficient_finite(m: usize, params: &ModelParams, sites: usize) -> Result<f64> {
    if sites < 2 {
        return Err(Error::InvalidParams(format!("chain length must be >= 2, got {sites}")));
    }
    if params.temperature() == 0.0 {
        return Err(Error::InvalidParams(
            "finite-N momentum sums need T > 0".to_string(),
        ));
    }
    let n = sites as f64;
    let mf = m as f64;
    let sum: f64 = (0..sites)
        .map(|i| {
            let k = 2.0 * PI * i as f64 / n;
            (k * mf).cos() * fermi_occupation(k, params)
        })
        .sum();
    Ok(sum / n)
}
