//! Local stability from trace and determinant, and the tagged outcome of a certification.

use num_complex::Complex64;
use serde::Serialize;

use crate::embedding::Region;

/// Width of the band around a stability boundary reported as [`LocalStability::Marginal`].
pub const MARGINAL_BAND: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LocalStability {
    #[serde(rename = "LAS")]
    Las,
    Unstable,
    Marginal,
}

impl LocalStability {
    pub fn label(self) -> &'static str {
        match self {
            LocalStability::Las => "LAS",
            LocalStability::Unstable => "Unstable",
            LocalStability::Marginal => "Marginal",
        }
    }
}

/// Jury test for a real 2x2 matrix: both eigenvalues inside the unit disk iff
/// `|Tr| < 1 + Det < 2`.
pub fn jury(trace: f64, det: f64) -> LocalStability {
    let margins = [1.0 + det - trace.abs(), 1.0 - det];
    if margins.iter().any(|m| m.abs() < MARGINAL_BAND) {
        LocalStability::Marginal
    } else if margins.iter().all(|&m| m > 0.0) {
        LocalStability::Las
    } else {
        LocalStability::Unstable
    }
}

/// Roots of `lambda^2 - Tr lambda + Det`. Real pairs come larger first, complex pairs with
/// the positive imaginary part first.
pub fn eigenvalues(trace: f64, det: f64) -> [Complex64; 2] {
    let disc = trace * trace - 4.0 * det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [
            Complex64::new(0.5 * (trace + s), 0.0),
            Complex64::new(0.5 * (trace - s), 0.0),
        ]
    } else {
        let im = 0.5 * (-disc).sqrt();
        [
            Complex64::new(0.5 * trace, im),
            Complex64::new(0.5 * trace, -im),
        ]
    }
}

pub fn spectral_radius(trace: f64, det: f64) -> f64 {
    let [a, b] = eigenvalues(trace, det);
    a.norm().max(b.norm())
}

/// Where orbits eventually live.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum AbsorbingBounds {
    /// Every term eventually in `[lo, hi]`.
    Square { lo: f64, hi: f64 },
    /// Even-indexed terms eventually in `even`, odd-indexed terms in `odd`.
    EvenOdd { even: [f64; 2], odd: [f64; 2] },
}

impl AbsorbingBounds {
    pub fn contains_tail(&self, orbit: &[f64], first_index: usize, slack: f64) -> bool {
        orbit.iter().enumerate().all(|(k, &x)| {
            let [lo, hi] = match *self {
                AbsorbingBounds::Square { lo, hi } => [lo, hi],
                AbsorbingBounds::EvenOdd { even, odd } => {
                    if (first_index + k).is_multiple_of(2) {
                        even
                    } else {
                        odd
                    }
                }
            };
            x >= lo - slack && x <= hi + slack
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Verdict {
    GloballyStable,
    /// Locally stable; global behavior not settled by the available criteria.
    LocallyStableGlobalOpen,
    AbsorbingBox(AbsorbingBounds),
    Unstable {
        bounds: Option<AbsorbingBounds>,
    },
    NotApplicable,
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::GloballyStable => "GloballyStable",
            Verdict::LocallyStableGlobalOpen => "LocallyStableGlobalOpen",
            Verdict::AbsorbingBox(_) => "AbsorbingBox",
            Verdict::Unstable { .. } => "Unstable",
            Verdict::NotApplicable => "NotApplicable",
        }
    }

    pub fn bounds(&self) -> Option<AbsorbingBounds> {
        match *self {
            Verdict::AbsorbingBox(b) => Some(b),
            Verdict::Unstable { bounds } => bounds,
            _ => None,
        }
    }
}

/// Verdict plus the reasoning that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub local: Option<LocalStability>,
    /// Names of the rules that fired, in the order they were applied.
    pub provenance: Vec<String>,
    /// Box `(a, b)` used by the embedding argument, if one was built.
    pub witness: Option<Region<f64>>,
    pub notes: Vec<String>,
}

impl Classification {
    pub(crate) fn new(verdict: Verdict, local: Option<LocalStability>) -> Self {
        Self {
            verdict,
            local,
            provenance: Vec::new(),
            witness: None,
            notes: Vec::new(),
        }
    }

    pub(crate) fn rule(mut self, name: &str) -> Self {
        self.provenance.push(name.to_string());
        self
    }

    pub(crate) fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }
}
