use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

pub type Mat2 = [[f64; 2]; 2];

const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CoefficientKind {
    Identity,
    ConstantMatrix {
        matrix: Mat2,
    },
    /// `A = m0` on cells with `⌊x/scale⌋ + ⌊y/scale⌋` even, `m1` otherwise.
    Checkerboard {
        scale: f64,
        m0: Mat2,
        m1: Mat2,
    },
    /// `A(x) = (1 + amplitude·sin(frequency·|x|))·I`.
    RadialOscillatory {
        amplitude: f64,
        frequency: f64,
    },
}

/// Uniformly elliptic coefficient matrix `A(x)`, possibly nonsymmetric.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientField {
    pub kind: CoefficientKind,
    /// `(λ, Λ)` with `λ|ξ|² ≤ ⟨A(x)ξ,ξ⟩ ≤ Λ|ξ|²`.
    pub ellipticity: (f64, f64),
}

/// Eigenvalue range of the symmetric part.
fn sym_bounds(m: &Mat2) -> (f64, f64) {
    let (a, d) = (m[0][0], m[1][1]);
    let b = 0.5 * (m[0][1] + m[1][0]);
    let mid = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    (mid - rad, mid + rad)
}

fn check_finite(m: &Mat2) -> Result<()> {
    if m.iter().flatten().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(
            "coefficient matrix has non-finite entries".into(),
        ))
    }
}

fn check_elliptic(lo: f64, hi: f64) -> Result<(f64, f64)> {
    if lo > 0.0 {
        Ok((lo, hi))
    } else {
        Err(Error::InvalidArgument(format!(
            "coefficient is not uniformly elliptic (lambda = {lo})"
        )))
    }
}

impl CoefficientField {
    pub fn identity() -> Self {
        Self {
            kind: CoefficientKind::Identity,
            ellipticity: (1.0, 1.0),
        }
    }

    pub fn constant(matrix: Mat2) -> Result<Self> {
        check_finite(&matrix)?;
        let (lo, hi) = sym_bounds(&matrix);
        Ok(Self {
            kind: CoefficientKind::ConstantMatrix { matrix },
            ellipticity: check_elliptic(lo, hi)?,
        })
    }

    pub fn checkerboard(scale: f64, m0: Mat2, m1: Mat2) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "checkerboard scale {scale}"
            )));
        }
        check_finite(&m0)?;
        check_finite(&m1)?;
        let (l0, h0) = sym_bounds(&m0);
        let (l1, h1) = sym_bounds(&m1);
        Ok(Self {
            kind: CoefficientKind::Checkerboard { scale, m0, m1 },
            ellipticity: check_elliptic(l0.min(l1), h0.max(h1))?,
        })
    }

    pub fn radial_oscillatory(amplitude: f64, frequency: f64) -> Result<Self> {
        if !(amplitude.abs() < 1.0 && frequency.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "radial oscillation needs |amplitude| < 1, got {amplitude}"
            )));
        }
        Ok(Self {
            kind: CoefficientKind::RadialOscillatory {
                amplitude,
                frequency,
            },
            ellipticity: (1.0 - amplitude.abs(), 1.0 + amplitude.abs()),
        })
    }

    /// Rebuilds a field from its kind, re-running the construction checks.
    pub fn from_kind(kind: CoefficientKind) -> Result<Self> {
        match kind {
            CoefficientKind::Identity => Ok(Self::identity()),
            CoefficientKind::ConstantMatrix { matrix } => Self::constant(matrix),
            CoefficientKind::Checkerboard { scale, m0, m1 } => Self::checkerboard(scale, m0, m1),
            CoefficientKind::RadialOscillatory {
                amplitude,
                frequency,
            } => Self::radial_oscillatory(amplitude, frequency),
        }
    }

    pub fn at(&self, p: Point) -> Mat2 {
        match &self.kind {
            CoefficientKind::Identity => IDENTITY,
            CoefficientKind::ConstantMatrix { matrix } => *matrix,
            CoefficientKind::Checkerboard { scale, m0, m1 } => {
                let parity = (p.x / scale).floor() as i64 + (p.y / scale).floor() as i64;
                if parity.rem_euclid(2) == 0 {
                    *m0
                } else {
                    *m1
                }
            }
            CoefficientKind::RadialOscillatory {
                amplitude,
                frequency,
            } => {
                let s = 1.0 + amplitude * (frequency * p.norm()).sin();
                [[s, 0.0], [0.0, s]]
            }
        }
    }

    pub fn is_symmetric(&self) -> bool {
        let sym = |m: &Mat2| m[0][1] == m[1][0];
        match &self.kind {
            CoefficientKind::Identity | CoefficientKind::RadialOscillatory { .. } => true,
            CoefficientKind::ConstantMatrix { matrix } => sym(matrix),
            CoefficientKind::Checkerboard { m0, m1, .. } => sym(m0) && sym(m1),
        }
    }
}
