//! Modal coupling matrix between mechanical and electrical eigenbases.
//!
//! Entry (h, k) is the inner product of mechanical mode h with the Laplacian
//! of electrical mode k; a nonzero entry is necessary for energy exchange
//! between the two modes. Since the membrane eigenfunctions have analytic
//! Laplacians (-nu_k e_k), every entry reduces to -nu_k <m_h, e_k> and no
//! numerical differentiation is involved.

use crate::basis::{BasisKind, ModalBasis};
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};
use std::f64::consts::PI;

/// Default threshold for the coupling criterion.
pub const COUPLING_TOL: f64 = 1e-6;

/// Dense coupling matrix; rows index mechanical modes, columns electrical
/// modes (0-based in code, 1-based in reports).
#[derive(Debug, Clone)]
pub struct CouplingMatrix {
    n: usize,
    entries: Vec<f64>,
    pub mech_kind: BasisKind,
    pub elec_kind: BasisKind,
}

impl CouplingMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry C[h][k], 0-based.
    pub fn get(&self, h: usize, k: usize) -> f64 {
        self.entries[h * self.n + k]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|h| self.get(h, h)).collect()
    }
}

/// Closed-form coupling matrix of the simply supported plate with the
/// membrane network: diagonal with entries -pi^2 (i_k^2 + j_k^2).
pub fn coupling_analytic_ss(n: usize) -> CouplingMatrix {
    assert!(n >= 1);
    let mut entries = vec![0.0; n * n];
    for h in 0..n {
        let idx = crate::basis::mode_index(h + 1);
        let s = (idx.i * idx.i + idx.j * idx.j) as f64;
        entries[h * n + h] = -PI * PI * s;
    }
    CouplingMatrix {
        n,
        entries,
        mech_kind: BasisKind::MechanicalSimplySupported,
        elec_kind: BasisKind::ElectricalMembrane,
    }
}

/// Coupling matrix by tensor quadrature: C[h][k] = -nu_k ∫ e_k m_h.
///
/// The integral is recomputed at twice the quadrature order; if any entry
/// moves by more than 1e-6 the order is insufficient and an error is
/// returned.
pub fn coupling_quadrature(
    mech: &ModalBasis,
    elec: &ModalBasis,
    n: usize,
    quad: &GaussLegendre,
) -> Result<CouplingMatrix> {
    if mech.len() < n || elec.len() < n {
        return Err(Error::DimensionMismatch(format!(
            "requested {n} modes, bases hold {} (mech) and {} (elec)",
            mech.len(),
            elec.len()
        )));
    }
    if elec.kind != BasisKind::ElectricalMembrane {
        return Err(Error::invalid(
            "electrical basis must be the membrane basis (analytic Laplacian required)",
        ));
    }
    let fine = GaussLegendre::new(2 * quad.order());
    let mut entries = vec![0.0; n * n];
    for h in 0..n {
        for k in 0..n {
            let coarse = entry(mech, elec, h, k, quad);
            let refined = entry(mech, elec, h, k, &fine);
            if (coarse - refined).abs() > 1e-6 {
                return Err(Error::numerical(format!(
                    "quadrature order {} insufficient for coupling entry ({h},{k}): \
                     changes by {:.3e} when doubled",
                    quad.order(),
                    (coarse - refined).abs()
                )));
            }
            entries[h * n + k] = coarse;
        }
    }
    Ok(CouplingMatrix {
        n,
        entries,
        mech_kind: mech.kind,
        elec_kind: elec.kind,
    })
}

fn entry(mech: &ModalBasis, elec: &ModalBasis, h: usize, k: usize, quad: &GaussLegendre) -> f64 {
    let m = &mech.modes[h];
    let e = &elec.modes[k];
    let nu = e.eigenvalue;
    -nu * quad.integrate_2d(|x1, x2| e.shape.eval(x1, x2) * m.shape.eval(x1, x2))
}

/// Coupling criterion: modes (h, k) can exchange energy only if |C_hk| > tol.
pub fn is_coupled(c: &CouplingMatrix, h: usize, k: usize, tol: f64) -> bool {
    assert!(h < c.n() && k < c.n(), "mode index out of range");
    assert!(tol > 0.0, "tolerance must be positive");
    c.get(h, k).abs() > tol
}

/// All coupled pairs (0-based) under the criterion.
pub fn coupled_pairs(c: &CouplingMatrix, tol: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for h in 0..c.n() {
        for k in 0..c.n() {
            if is_coupled(c, h, k, tol) {
                out.push((h, k));
            }
        }
    }
    out
}
