//! Tight-binding model builders.
//!
//! Two representations coexist and are cross-checked against each other:
//! momentum-space Bloch maps `k -> H(k)` for translation-invariant bulk
//! physics, and explicit real-space / ribbon matrices for open boundaries.
//! Periodic real-space variants exist purely so tests can verify that both
//! representations carry the same spectrum.
//!
//! Conventions shared by every builder:
//!
//! * momentum components are measured per unit lattice constant, so every
//!   `H(k)` is 2*pi periodic in each component;
//! * a hopping block `T` from cell `x` to cell `x+1` enters the Bloch matrix
//!   as `T e^{-ik} + T^H e^{+ik}`, which is what makes the periodic
//!   real-space variants reproduce the Bloch spectra exactly;
//! * the qubit couples through a traceless +/-1 sublattice (or orbital)
//!   pattern, exposed as the model's `coupling` matrix.

pub mod km;
pub mod qwz;
pub mod ssh;
pub mod weyl;

pub use km::km_ribbon;
pub use qwz::{qwz_bloch, qwz_lattice, qwz_strip};
pub use ssh::{ssh_bloch, ssh_chain, ssh_open_chain};
pub use weyl::{weyl_bloch, WeylParams};

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::numkit::{cx, CMatrix};

/// Pauli matrix `sigma_i` for `i` in `0..=3` (`sigma_0` is the identity).
pub fn pauli(i: usize) -> CMatrix {
    let mut m = CMatrix::zeros((2, 2));
    match i {
        0 => {
            m[[0, 0]] = cx(1.0, 0.0);
            m[[1, 1]] = cx(1.0, 0.0);
        }
        1 => {
            m[[0, 1]] = cx(1.0, 0.0);
            m[[1, 0]] = cx(1.0, 0.0);
        }
        2 => {
            m[[0, 1]] = cx(0.0, -1.0);
            m[[1, 0]] = cx(0.0, 1.0);
        }
        3 => {
            m[[0, 0]] = cx(1.0, 0.0);
            m[[1, 1]] = cx(-1.0, 0.0);
        }
        _ => panic!("pauli index {i} out of range"),
    }
    m
}

/// Kronecker product; `a` indexes the outer (slow) factor.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    let mut out = CMatrix::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            for p in 0..br {
                for q in 0..bc {
                    out[[i * br + p, j * bc + q]] = aij * b[[p, q]];
                }
            }
        }
    }
    out
}

// ═══════════════════════════════════════════════════════════════════════
// Two-band Bloch Hamiltonians
// ═══════════════════════════════════════════════════════════════════════

/// Coefficients of a two-band Bloch Hamiltonian
/// `H(k) = r0 I + rx sx + ry sy + rz sz`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourVector {
    pub r0: f64,
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl FourVector {
    /// `R = |(rx, ry, rz)|`; half the direct gap.
    pub fn magnitude(&self) -> f64 {
        (self.rx * self.rx + self.ry * self.ry + self.rz * self.rz).sqrt()
    }

    /// `|(rx, ry, rz + delta)|`: the magnitude after the qubit shifts the
    /// z-component.
    pub fn magnitude_shifted(&self, delta: f64) -> f64 {
        let rz = self.rz + delta;
        (self.rx * self.rx + self.ry * self.ry + rz * rz).sqrt()
    }

    /// Dense 2x2 matrix form.
    pub fn matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros((2, 2));
        m[[0, 0]] = cx(self.r0 + self.rz, 0.0);
        m[[1, 1]] = cx(self.r0 - self.rz, 0.0);
        m[[0, 1]] = cx(self.rx, -self.ry);
        m[[1, 0]] = cx(self.rx, self.ry);
        m
    }

    /// Normalized lower-band eigenvector (energy `r0 - R`).
    ///
    /// Two algebraically equivalent gauges are stitched at `rz = 0` so the
    /// expression never divides by a vanishing `R -+ rz`; any gauge
    /// difference is a pure phase, which no downstream quantity depends on.
    /// Requires `R > 0`.
    pub fn lower_eigenvector(&self) -> [Complex64; 2] {
        let r = self.magnitude();
        assert!(r > 0.0, "lower eigenvector undefined at a degeneracy");
        if self.rz <= 0.0 {
            let norm = (2.0 * r * (r - self.rz)).sqrt();
            [
                cx((r - self.rz) / norm, 0.0),
                cx(-self.rx / norm, -self.ry / norm),
            ]
        } else {
            let norm = (2.0 * r * (r + self.rz)).sqrt();
            [
                cx(self.rx / norm, -self.ry / norm),
                cx(-(r + self.rz) / norm, 0.0),
            ]
        }
    }
}

/// A family `k -> H(k)` of two-band Bloch Hamiltonians.
pub struct TwoBandBloch {
    pub name: &'static str,
    /// Number of momentum components.
    pub dim_k: usize,
    /// True when `rz` vanishes identically (sublattice-symmetric models).
    /// At an exact degeneracy such models have a direction-independent
    /// occupied weight distribution, which the decoherence engines exploit.
    pub chiral: bool,
    params: Vec<(&'static str, f64)>,
    regime_warning: Option<String>,
    r: Arc<dyn Fn(&[f64]) -> FourVector + Send + Sync>,
}

impl TwoBandBloch {
    pub(crate) fn new(
        name: &'static str,
        dim_k: usize,
        chiral: bool,
        params: Vec<(&'static str, f64)>,
        regime_warning: Option<String>,
        r: impl Fn(&[f64]) -> FourVector + Send + Sync + 'static,
    ) -> Self {
        TwoBandBloch {
            name,
            dim_k,
            chiral,
            params,
            regime_warning,
            r: Arc::new(r),
        }
    }

    pub fn r_at(&self, k: &[f64]) -> FourVector {
        assert_eq!(k.len(), self.dim_k, "momentum dimension mismatch");
        (self.r)(k)
    }

    pub fn h_at(&self, k: &[f64]) -> CMatrix {
        self.r_at(k).matrix()
    }

    /// Direct gap `2R(k)`.
    pub fn gap_at(&self, k: &[f64]) -> f64 {
        2.0 * self.r_at(k).magnitude()
    }

    pub fn params(&self) -> &[(&'static str, f64)] {
        &self.params
    }

    /// Present when the builder was handed couplings outside the regime the
    /// model is characterized for. The model still evaluates.
    pub fn regime_warning(&self) -> Option<&str> {
        self.regime_warning.as_deref()
    }
}

impl fmt::Debug for TwoBandBloch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoBandBloch")
            .field("name", &self.name)
            .field("dim_k", &self.dim_k)
            .field("chiral", &self.chiral)
            .field("params", &self.params)
            .finish()
    }
}

// ═══════════════════════════════════════════════════════════════════════
// Multi-band Bloch Hamiltonians
// ═══════════════════════════════════════════════════════════════════════

/// A family `k -> H(k)` of `dim x dim` Bloch Hamiltonians together with the
/// qubit coupling matrix acting in the same internal space.
pub struct MultiBandBloch {
    pub name: &'static str,
    /// Internal dimension (number of bands).
    pub dim: usize,
    pub dim_k: usize,
    /// Qubit coupling `V`; the perturbed Hamiltonian is `H(k) + delta V`.
    pub coupling: CMatrix,
    params: Vec<(&'static str, f64)>,
    h: Arc<dyn Fn(&[f64]) -> CMatrix + Send + Sync>,
}

impl MultiBandBloch {
    pub(crate) fn new(
        name: &'static str,
        dim: usize,
        dim_k: usize,
        coupling: CMatrix,
        params: Vec<(&'static str, f64)>,
        h: impl Fn(&[f64]) -> CMatrix + Send + Sync + 'static,
    ) -> Self {
        MultiBandBloch {
            name,
            dim,
            dim_k,
            coupling,
            params,
            h: Arc::new(h),
        }
    }

    pub fn h_at(&self, k: &[f64]) -> CMatrix {
        assert_eq!(k.len(), self.dim_k, "momentum dimension mismatch");
        (self.h)(k)
    }

    pub fn params(&self) -> &[(&'static str, f64)] {
        &self.params
    }
}

impl fmt::Debug for MultiBandBloch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiBandBloch")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("dim_k", &self.dim_k)
            .field("params", &self.params)
            .finish()
    }
}

/// Either Bloch flavor, for analysis passes that only need `H(k)` and a
/// notion of the gap at half filling.
#[derive(Debug)]
pub enum BlochModel {
    TwoBand(TwoBandBloch),
    MultiBand(MultiBandBloch),
}

impl BlochModel {
    pub fn name(&self) -> &'static str {
        match self {
            BlochModel::TwoBand(m) => m.name,
            BlochModel::MultiBand(m) => m.name,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            BlochModel::TwoBand(_) => 2,
            BlochModel::MultiBand(m) => m.dim,
        }
    }

    pub fn dim_k(&self) -> usize {
        match self {
            BlochModel::TwoBand(m) => m.dim_k,
            BlochModel::MultiBand(m) => m.dim_k,
        }
    }

    pub fn h_at(&self, k: &[f64]) -> CMatrix {
        match self {
            BlochModel::TwoBand(m) => m.h_at(k),
            BlochModel::MultiBand(m) => m.h_at(k),
        }
    }
}

// ═══════════════════════════════════════════════════════════════════════
// Real-space and ribbon models
// ═══════════════════════════════════════════════════════════════════════

/// Boundary condition along the open (or nominally open) direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Open,
    /// Wrapped variant kept for spectrum oracles against the Bloch form.
    Periodic,
}

/// Geometry tag for one matrix index: real-space position and sublattice
/// sign (+1/-1, or 0 when the model has no sublattice structure).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteTag {
    pub x: f64,
    pub y: f64,
    pub sublattice: i8,
}

/// A finite lattice: one explicit Hermitian matrix plus the qubit coupling
/// pattern and per-index geometry.
#[derive(Debug, Clone)]
pub struct LatticeModel {
    pub name: &'static str,
    pub h: CMatrix,
    pub coupling: CMatrix,
    pub geometry: Vec<SiteTag>,
    pub boundary: Boundary,
}

impl LatticeModel {
    pub fn dim(&self) -> usize {
        self.h.nrows()
    }
}

/// A quasi-1D system: analytic in one momentum, explicit along the open
/// direction. `h_at(k)` returns the `dim x dim` slice Hamiltonian.
pub struct RibbonModel {
    pub name: &'static str,
    pub dim: usize,
    pub coupling: CMatrix,
    pub geometry: Vec<SiteTag>,
    pub boundary: Boundary,
    params: Vec<(&'static str, f64)>,
    h: Arc<dyn Fn(f64) -> CMatrix + Send + Sync>,
}

impl RibbonModel {
    pub(crate) fn new(
        name: &'static str,
        dim: usize,
        coupling: CMatrix,
        geometry: Vec<SiteTag>,
        boundary: Boundary,
        params: Vec<(&'static str, f64)>,
        h: impl Fn(f64) -> CMatrix + Send + Sync + 'static,
    ) -> Self {
        RibbonModel {
            name,
            dim,
            coupling,
            geometry,
            boundary,
            params,
            h: Arc::new(h),
        }
    }

    pub fn h_at(&self, k: f64) -> CMatrix {
        (self.h)(k)
    }

    pub fn params(&self) -> &[(&'static str, f64)] {
        &self.params
    }
}

impl fmt::Debug for RibbonModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RibbonModel")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("boundary", &self.boundary)
            .field("params", &self.params)
            .finish()
    }
}

/// Momentum grid `k_n = 2 pi n / n_points`, `n = 1..=n_points`, covering one
/// Brillouin zone period per axis.
pub fn momentum_grid(n_points: usize) -> Vec<f64> {
    (1..=n_points)
        .map(|n| 2.0 * PI * n as f64 / n_points as f64)
        .collect()
}
