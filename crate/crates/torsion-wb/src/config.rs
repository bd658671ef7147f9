//! Run configuration shared by the CLI and the verification suites.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    /// Rank decision threshold relative to the largest singular value.
    pub rank_tol: f64,
    /// Spectral-cut gap threshold relative to the largest |eigenvalue|.
    pub gap_tol: f64,
    /// Cauchy-Riemann residual threshold for holomorphy verdicts.
    pub cr_tol: f64,
    /// Generic relative comparison tolerance.
    pub rel_tol: f64,
    /// Agmon angle; None selects the default with auto-perturbation.
    pub theta: Option<f64>,
    /// Unit-modulus phase multiplying reported torsion values.
    pub phase_constant: Option<Complex64>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            rank_tol: 1e-10,
            gap_tol: 1e-6,
            cr_tol: 1e-8,
            rel_tol: 1e-9,
            theta: None,
            phase_constant: None,
            format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_tol", self.rank_tol),
            ("gap_tol", self.gap_tol),
            ("cr_tol", self.cr_tol),
            ("rel_tol", self.rel_tol),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::validation(format!("{name} must be positive")));
            }
        }
        if let Some(p) = self.phase_constant {
            if (p.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::validation("phase constant must have modulus 1"));
            }
        }
        if let Some(t) = self.theta {
            if !(t > -std::f64::consts::PI && t < 0.0) {
                return Err(Error::validation("theta must lie in (-pi, 0)"));
            }
        }
        Ok(())
    }
}

/// Thread-pool cap from the TORSION_WB_THREADS environment variable.
pub fn thread_cap() -> Option<usize> {
    std::env::var("TORSION_WB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn bad_phase_rejected() {
        let cfg = RunConfig {
            phase_constant: Some(Complex64::new(2.0, 0.0)),
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
