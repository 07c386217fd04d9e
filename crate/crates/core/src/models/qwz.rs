//! Two-orbital square-lattice Chern insulator.
//!
//! `R(k) = (sin kx, sin ky, 2 + M - cos kx - cos ky)`. The gap closes at
//! `M = 0` (node at `(0,0)`), `M = -2` (nodes at `(pi,0)` and `(0,pi)`) and
//! `M = -4` (node at `(pi,pi)`); between those the occupied band carries
//! Chern number -1 for `-2 < M < 0` and +1 for `-4 < M < -2`, zero outside.
//!
//! Real-space decomposition (fixed by requiring the periodic variants to
//! reproduce the Bloch spectrum exactly): onsite `(2 + M) sz`, hopping block
//! `(i sx - sz) / 2` one step along x and `(i sy - sz) / 2` one step along
//! y, entering a Bloch phase as `T e^{-ik} + T^H e^{+ik}`.

use crate::models::{pauli, Boundary, FourVector, LatticeModel, RibbonModel, SiteTag, TwoBandBloch};
use crate::numkit::{cx, CMatrix};
use crate::{Error, Result};

/// Bloch Hamiltonian; two momentum components, not chiral.
pub fn qwz_bloch(m: f64) -> TwoBandBloch {
    let warning = (!(-5.0..=1.0).contains(&m)).then(|| {
        format!("mass M = {m} lies outside the characterized range [-5, 1]")
    });
    TwoBandBloch::new(
        "qwz",
        2,
        false,
        vec![("m", m)],
        warning,
        move |k: &[f64]| FourVector {
            r0: 0.0,
            rx: k[0].sin(),
            ry: k[1].sin(),
            rz: 2.0 + m - k[0].cos() - k[1].cos(),
        },
    )
}

/// Hopping block one step along x: `(i sx - sz) / 2`.
fn hop_x() -> CMatrix {
    half_block(pauli(1))
}

/// Hopping block one step along y: `(i sy - sz) / 2`.
fn hop_y() -> CMatrix {
    half_block(pauli(2))
}

fn half_block(s: CMatrix) -> CMatrix {
    let i = cx(0.0, 1.0);
    let sz = pauli(3);
    let mut t = CMatrix::zeros((2, 2));
    for r in 0..2 {
        for c in 0..2 {
            t[[r, c]] = 0.5 * (i * s[[r, c]] - sz[[r, c]]);
        }
    }
    t
}

/// Strip of `n_x` cells, open (or wrapped) along x, analytic in `k_y`.
///
/// The qubit coupling is `sz` in every cell. Geometry runs along x so edge
/// localization can be measured on the slice eigenvectors.
pub fn qwz_strip(n_x: usize, m: f64, boundary: Boundary) -> Result<RibbonModel> {
    if n_x < 2 {
        return Err(Error::InvalidParameter(format!(
            "strip needs at least 2 cells, got {n_x}"
        )));
    }
    let dim = 2 * n_x;
    let tx = hop_x();
    let sz = pauli(3);
    let sy = pauli(2);

    let mut coupling = CMatrix::zeros((dim, dim));
    let mut geometry = Vec::with_capacity(dim);
    for x in 0..n_x {
        for o in 0..2 {
            coupling[[2 * x + o, 2 * x + o]] = sz[[o, o]];
            geometry.push(SiteTag {
                x: x as f64,
                y: 0.0,
                sublattice: if o == 0 { 1 } else { -1 },
            });
        }
    }

    let h = move |ky: f64| -> CMatrix {
        let mut h = CMatrix::zeros((dim, dim));
        let onsite_z = 2.0 + m - ky.cos();
        for x in 0..n_x {
            for r in 0..2 {
                for c in 0..2 {
                    let val = sy[[r, c]] * ky.sin() + sz[[r, c]] * onsite_z;
                    h[[2 * x + r, 2 * x + c]] = val;
                }
            }
        }
        let mut place = |to: usize, from: usize| {
            for r in 0..2 {
                for c in 0..2 {
                    h[[2 * to + r, 2 * from + c]] = tx[[r, c]];
                    h[[2 * from + r, 2 * to + c]] = tx[[c, r]].conj();
                }
            }
        };
        for x in 0..n_x - 1 {
            place(x + 1, x);
        }
        if boundary == Boundary::Periodic {
            place(0, n_x - 1);
        }
        h
    };

    Ok(RibbonModel::new(
        "qwz-strip",
        dim,
        coupling,
        geometry,
        boundary,
        vec![("m", m), ("n_x", n_x as f64)],
        h,
    ))
}

/// Finite `n_x x n_y` lattice of two-orbital cells; the periodic variant
/// reproduces the Bloch spectrum on the matching momentum grid.
pub fn qwz_lattice(n_x: usize, n_y: usize, m: f64, boundary: Boundary) -> Result<LatticeModel> {
    if n_x < 2 || n_y < 2 {
        return Err(Error::InvalidParameter(format!(
            "lattice needs at least 2x2 cells, got {n_x}x{n_y}"
        )));
    }
    let cells = n_x * n_y;
    let dim = 2 * cells;
    let idx = |x: usize, y: usize| -> usize { 2 * (x * n_y + y) };
    let tx = hop_x();
    let ty = hop_y();
    let sz = pauli(3);

    let mut h = CMatrix::zeros((dim, dim));
    let mut coupling = CMatrix::zeros((dim, dim));
    let mut geometry = Vec::with_capacity(dim);

    for x in 0..n_x {
        for y in 0..n_y {
            let base = idx(x, y);
            let onsite = 2.0 + m;
            for o in 0..2 {
                h[[base + o, base + o]] = sz[[o, o]] * onsite;
                coupling[[base + o, base + o]] = sz[[o, o]];
                geometry.push(SiteTag {
                    x: x as f64,
                    y: y as f64,
                    sublattice: if o == 0 { 1 } else { -1 },
                });
            }
        }
    }

    let place = |h: &mut CMatrix, to: usize, from: usize, t: &CMatrix| {
        for r in 0..2 {
            for c in 0..2 {
                h[[to + r, from + c]] += t[[r, c]];
                h[[from + r, to + c]] += t[[c, r]].conj();
            }
        }
    };
    for x in 0..n_x {
        for y in 0..n_y {
            let here = idx(x, y);
            if x + 1 < n_x {
                place(&mut h, idx(x + 1, y), here, &tx);
            } else if boundary == Boundary::Periodic {
                place(&mut h, idx(0, y), here, &tx);
            }
            if y + 1 < n_y {
                place(&mut h, idx(x, y + 1), here, &ty);
            } else if boundary == Boundary::Periodic {
                place(&mut h, idx(x, 0), here, &ty);
            }
        }
    }

    Ok(LatticeModel {
        name: "qwz-lattice",
        h,
        coupling,
        geometry,
        boundary,
    })
}
