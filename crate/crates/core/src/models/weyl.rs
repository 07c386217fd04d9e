//! Four-band cubic-lattice semimetal with tunable node structure.
//!
//! Basis ordering is orbital (outer) tensor spin (inner), so operators are
//! assembled as `kron(orbital, spin)` and index `2*o + s`. The kinetic part
//! is
//!
//! ```text
//! H0(k) = 2 lambda  oz (sx sin ky - sy sin kx)
//!       + 2 lambda_z oy sin kz
//!       + ox M(k),            M(k) = eps - 2 t (cos kx + cos ky + cos kz)
//! ```
//!
//! and the internal fields add
//! `b0 oy sy - b1 ox sx + b2 ox sy + b3 sz`. With all `b` zero every band is
//! doubly degenerate; `b3` splits the touching in momentum, `b0` splits it
//! in energy or gaps it out depending on `eps`. The qubit couples through
//! `oz` (identity in spin).

use crate::models::{kron, pauli, MultiBandBloch};
use crate::numkit::CMatrix;

/// Couplings of the four-band semimetal. `Default` is the doubly degenerate
/// point: `lambda = lambda_z = 2`, `t = 1`, `eps = 6`, all `b` zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylParams {
    pub lambda: f64,
    pub lambda_z: f64,
    pub t: f64,
    pub eps: f64,
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

impl Default for WeylParams {
    fn default() -> Self {
        WeylParams {
            lambda: 2.0,
            lambda_z: 2.0,
            t: 1.0,
            eps: 6.0,
            b0: 0.0,
            b1: 0.0,
            b2: 0.0,
            b3: 0.0,
        }
    }
}

/// Bloch Hamiltonian of the four-band semimetal; three momentum components.
pub fn weyl_bloch(p: WeylParams) -> MultiBandBloch {
    let (o0, ox, oy, oz) = (pauli(0), pauli(1), pauli(2), pauli(3));
    let (s0, sx, sy, sz) = (pauli(0), pauli(1), pauli(2), pauli(3));

    let oz_sx = kron(&oz, &sx);
    let oz_sy = kron(&oz, &sy);
    let oy_s0 = kron(&oy, &s0);
    let ox_s0 = kron(&ox, &s0);
    let coupling = kron(&oz, &s0);

    // static internal-field part
    let mut internal = CMatrix::zeros((4, 4));
    internal += &kron(&oy, &sy).mapv(|z| z * p.b0);
    internal -= &kron(&ox, &sx).mapv(|z| z * p.b1);
    internal += &kron(&ox, &sy).mapv(|z| z * p.b2);
    internal += &kron(&o0, &sz).mapv(|z| z * p.b3);

    let params = vec![
        ("lambda", p.lambda),
        ("lambda_z", p.lambda_z),
        ("t", p.t),
        ("eps", p.eps),
        ("b0", p.b0),
        ("b1", p.b1),
        ("b2", p.b2),
        ("b3", p.b3),
    ];

    MultiBandBloch::new("weyl", 4, 3, coupling, params, move |k: &[f64]| {
        let (kx, ky, kz) = (k[0], k[1], k[2]);
        let mass = p.eps - 2.0 * p.t * (kx.cos() + ky.cos() + kz.cos());
        let mut h = internal.clone();
        h += &oz_sx.mapv(|z| z * (2.0 * p.lambda * ky.sin()));
        h -= &oz_sy.mapv(|z| z * (2.0 * p.lambda * kx.sin()));
        h += &oy_s0.mapv(|z| z * (2.0 * p.lambda_z * kz.sin()));
        h += &ox_s0.mapv(|z| z * mass);
        h
    })
}
