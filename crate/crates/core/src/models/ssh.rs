//! Dimerized two-site chain.
//!
//! Unit cell of two sites, hopping alternating between `-(1 + phi)` inside
//! the cell and `-(1 - phi)` between cells. The Bloch off-diagonal is
//! `-(1 + phi) - (1 - phi) e^{-ik}`, giving
//! `R(k) = 2 sqrt(cos^2(k/2) + phi^2 sin^2(k/2))`: the gap closes at
//! `k = pi` exactly at `phi = 0`, and the quantized Berry phase flips
//! between the two dimerization signs there.
//!
//! The finite chain terminates so that its first and last bonds are the
//! `-(1 - phi)` ones. Which dimerization sign hosts end states is a property
//! of the termination, not of the bulk: with this choice the mid-gap pair
//! appears for `phi > 0`, where the end bonds are the weak ones.

use crate::models::{Boundary, FourVector, LatticeModel, SiteTag, TwoBandBloch};
use crate::numkit::{cx, CMatrix};
use crate::{Error, Result};

/// Bloch Hamiltonian of the dimerized chain: chiral (`rz = 0`), one
/// momentum component.
pub fn ssh_bloch(phi: f64) -> TwoBandBloch {
    let warning = (phi.abs() > 1.0).then(|| {
        format!("dimerization phi = {phi} lies outside the characterized range [-1, 1]")
    });
    TwoBandBloch::new(
        "ssh",
        1,
        true,
        vec![("phi", phi)],
        warning,
        move |k: &[f64]| {
            let k = k[0];
            FourVector {
                r0: 0.0,
                rx: -(1.0 + phi) - (1.0 - phi) * k.cos(),
                ry: -(1.0 - phi) * k.sin(),
                rz: 0.0,
            }
        },
    )
}

/// Finite chain with alternating bonds, open boundary.
///
/// Sites are numbered from 0; bond `s -> s+1` carries `-1 + (-1)^s phi`,
/// i.e. `-(1 - phi)` for even `s` and `-(1 + phi)` for odd `s`. The chain
/// therefore terminates on the weaker bond when `phi > 0`, which is the
/// dimerization side hosting a pair of exponentially localized mid-gap end
/// states. The qubit coupling is the sublattice pattern
/// `diag(+1, -1, +1, -1, ...)`.
pub fn ssh_open_chain(n_sites: usize, phi: f64) -> Result<LatticeModel> {
    ssh_chain(n_sites, phi, Boundary::Open)
}

/// Finite chain with selectable boundary; the periodic variant exists so
/// spectrum oracles can compare it against [`ssh_bloch`].
pub fn ssh_chain(n_sites: usize, phi: f64, boundary: Boundary) -> Result<LatticeModel> {
    if n_sites < 4 || n_sites % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "chain length must be even and at least 4, got {n_sites}"
        )));
    }
    let mut h = CMatrix::zeros((n_sites, n_sites));
    let bond = |s: usize| -> f64 {
        if s % 2 == 0 {
            -(1.0 - phi)
        } else {
            -(1.0 + phi)
        }
    };
    for s in 0..n_sites - 1 {
        h[[s, s + 1]] = cx(bond(s), 0.0);
        h[[s + 1, s]] = cx(bond(s), 0.0);
    }
    if boundary == Boundary::Periodic {
        // closing bond starts at the last (odd) site
        h[[n_sites - 1, 0]] = cx(bond(n_sites - 1), 0.0);
        h[[0, n_sites - 1]] = cx(bond(n_sites - 1), 0.0);
    }

    let mut coupling = CMatrix::zeros((n_sites, n_sites));
    let mut geometry = Vec::with_capacity(n_sites);
    for s in 0..n_sites {
        let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
        coupling[[s, s]] = cx(sign, 0.0);
        geometry.push(SiteTag {
            x: s as f64,
            y: 0.0,
            sublattice: sign as i8,
        });
    }

    Ok(LatticeModel {
        name: "ssh-chain",
        h,
        coupling,
        geometry,
        boundary,
    })
}
