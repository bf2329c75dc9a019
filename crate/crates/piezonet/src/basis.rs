//! Eigenbases of the mechanical operator (double Laplacian) and the
//! electrical operator (negative Laplacian) on the unit square.
//!
//! Simply supported plates and the grounded membrane-like network share the
//! same sine-product eigenfunctions; the clamped plate uses the classical
//! product of clamped-clamped beam shapes as a close approximation, with
//! eigenvalues estimated by the Rayleigh quotient.

use crate::quadrature::GaussLegendre;
use crate::{Error, Result};
use std::f64::consts::PI;

/// Canonical labeling of the first nine modes: half-wave counts (i, j).
pub const TABLE_ORDER: [(u32, u32); 9] = [
    (1, 1),
    (1, 2),
    (2, 1),
    (2, 2),
    (1, 3),
    (3, 1),
    (2, 3),
    (3, 2),
    (3, 3),
];

/// A mode ordinal together with its half-wave counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeIndex {
    /// 1-based ordinal in the canonical ordering.
    pub k: usize,
    /// Half-wave count along x1.
    pub i: u32,
    /// Half-wave count along x2.
    pub j: u32,
}

/// Maps a 1-based ordinal to its half-wave counts.
///
/// Ordinals 1..=9 follow the canonical table; beyond that, pairs are taken in
/// ascending i^2 + j^2 with ties broken by ascending i. The extension starts
/// from the pairs not already listed, so nu_10 (pair (1,4), value 17) is
/// slightly below nu_9 (pair (3,3), value 18); the table rows are kept
/// authoritative for the first nine ordinals.
///
/// # Panics
///
/// Panics if `k == 0`.
pub fn mode_index(k: usize) -> ModeIndex {
    assert!(k >= 1, "mode ordinals are 1-based");
    if k <= 9 {
        let (i, j) = TABLE_ORDER[k - 1];
        return ModeIndex { k, i, j };
    }
    // enumerate pairs not in the table, sorted by (i^2+j^2, i)
    let needed = k - 9;
    let mut bound = 32u32;
    loop {
        let mut extra: Vec<(u32, u32, u32)> = Vec::new();
        for i in 1..=bound {
            for j in 1..=bound {
                if i <= 3 && j <= 3 {
                    continue;
                }
                extra.push((i * i + j * j, i, j));
            }
        }
        extra.sort_unstable();
        // candidates with s beyond bound^2 + 1 might be missing; make sure the
        // needed entry is safely inside the enumerated square
        if extra.len() >= needed && extra[needed - 1].0 <= bound * bound + 1 {
            let (_, i, j) = extra[needed - 1];
            return ModeIndex { k, i, j };
        }
        bound *= 2;
    }
}

/// Which operator/boundary combination a basis diagonalizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    MechanicalSimplySupported,
    MechanicalClamped,
    ElectricalMembrane,
}

/// One clamped-clamped beam eigenfunction.
///
/// Shape: cosh(bx) - cos(bx) - sigma (sinh(bx) - sin(bx)) with b the n-th
/// root of cos(b) cosh(b) = 1 and sigma = (cosh b - cos b)/(sinh b - sin b).
/// Evaluation rewrites cosh - sigma sinh in decaying-exponential form; the
/// naive form loses all significant digits near x = 1 once b is large.
/// With this sigma the shape already has a unit L2 norm on [0, 1].
#[derive(Debug, Clone, Copy)]
pub struct BeamMode {
    /// 1-based beam mode number.
    pub n: u32,
    /// Frequency root beta_n.
    pub root: f64,
    sigma: f64,
    one_minus_sigma: f64,
}

impl BeamMode {
    pub fn new(n: u32) -> Self {
        let root = clamped_beam_root(n);
        let sigma = (root.cosh() - root.cos()) / (root.sinh() - root.sin());
        // 1 - sigma = (cos b - sin b - exp(-b)) / (sinh b - sin b), all O(1) terms
        let one_minus_sigma = (root.cos() - root.sin() - (-root).exp()) / (root.sinh() - root.sin());
        BeamMode {
            n,
            root,
            sigma,
            one_minus_sigma,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = self.root * x;
        self.hyperbolic(t) - t.cos() + self.sigma * t.sin()
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let t = self.root * x;
        self.root * (self.hyperbolic_odd(t) + t.sin() + self.sigma * t.cos())
    }

    pub fn second_deriv(&self, x: f64) -> f64 {
        let t = self.root * x;
        self.root * self.root * (self.hyperbolic(t) + t.cos() - self.sigma * t.sin())
    }

    /// cosh t - sigma sinh t, stable for large t.
    fn hyperbolic(&self, t: f64) -> f64 {
        0.5 * (t.exp() * self.one_minus_sigma + (-t).exp() * (1.0 + self.sigma))
    }

    /// sinh t - sigma cosh t, stable for large t.
    fn hyperbolic_odd(&self, t: f64) -> f64 {
        0.5 * (t.exp() * self.one_minus_sigma - (-t).exp() * (1.0 + self.sigma))
    }
}

/// n-th positive root of cos(b) cosh(b) = 1, solved as cos(b) = sech(b) by
/// bisection on (n pi, (n+1) pi) to 1e-12.
pub fn clamped_beam_root(n: u32) -> f64 {
    assert!(n >= 1, "beam mode numbers are 1-based");
    let f = |b: f64| b.cos() - 1.0 / b.cosh();
    let mut lo = n as f64 * PI;
    let mut hi = (n as f64 + 1.0) * PI;
    let flo = f(lo);
    debug_assert!(flo * f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-13 {
            return mid;
        }
        if f(mid) * flo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Analytic eigenfunction evaluator with its Laplacian.
#[derive(Debug, Clone)]
pub enum ModeShape {
    /// 2 sin(i pi x1) sin(j pi x2), unit L2 norm.
    SineProduct { i: u32, j: u32 },
    /// Product of clamped-clamped beam shapes, unit L2 norm.
    BeamProduct { x1: BeamMode, x2: BeamMode },
}

impl ModeShape {
    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        match self {
            ModeShape::SineProduct { i, j } => {
                2.0 * (*i as f64 * PI * x1).sin() * (*j as f64 * PI * x2).sin()
            }
            ModeShape::BeamProduct { x1: bx, x2: by } => bx.eval(x1) * by.eval(x2),
        }
    }

    pub fn laplacian(&self, x1: f64, x2: f64) -> f64 {
        match self {
            ModeShape::SineProduct { i, j } => {
                let s = (*i as f64).powi(2) + (*j as f64).powi(2);
                -PI * PI * s * self.eval(x1, x2)
            }
            ModeShape::BeamProduct { x1: bx, x2: by } => {
                bx.second_deriv(x1) * by.eval(x2) + bx.eval(x1) * by.second_deriv(x2)
            }
        }
    }

    /// Gradient, for boundary-condition checks.
    pub fn gradient(&self, x1: f64, x2: f64) -> (f64, f64) {
        match self {
            ModeShape::SineProduct { i, j } => {
                let (fi, fj) = (*i as f64 * PI, *j as f64 * PI);
                (
                    2.0 * fi * (fi * x1).cos() * (fj * x2).sin(),
                    2.0 * fj * (fi * x1).sin() * (fj * x2).cos(),
                )
            }
            ModeShape::BeamProduct { x1: bx, x2: by } => (
                bx.deriv(x1) * by.eval(x2),
                bx.eval(x1) * by.deriv(x2),
            ),
        }
    }
}

/// A single eigenpair.
#[derive(Debug, Clone)]
pub struct Mode {
    pub index: ModeIndex,
    pub eigenvalue: f64,
    pub shape: ModeShape,
}

/// Ordered eigenpairs of one operator/boundary combination.
#[derive(Debug, Clone)]
pub struct ModalBasis {
    pub kind: BasisKind,
    pub modes: Vec<Mode>,
}

impl ModalBasis {
    /// Mechanical basis of the simply supported plate:
    /// lambda_k = pi^4 (i^2+j^2)^2 with sine-product eigenfunctions.
    pub fn simply_supported(n: usize) -> Self {
        let modes = (1..=n)
            .map(|k| {
                let (eigenvalue, shape) = ss_mech_eigenpair(mode_index(k));
                Mode {
                    index: mode_index(k),
                    eigenvalue,
                    shape,
                }
            })
            .collect();
        ModalBasis {
            kind: BasisKind::MechanicalSimplySupported,
            modes,
        }
    }

    /// Electrical basis of the edge-grounded membrane-like network:
    /// nu_k = pi^2 (i^2+j^2), same eigenfunctions as the simply supported
    /// plate.
    pub fn membrane(n: usize) -> Self {
        let modes = (1..=n)
            .map(|k| {
                let (eigenvalue, shape) = membrane_eigenpair(mode_index(k));
                Mode {
                    index: mode_index(k),
                    eigenvalue,
                    shape,
                }
            })
            .collect();
        ModalBasis {
            kind: BasisKind::ElectricalMembrane,
            modes,
        }
    }

    /// Approximate mechanical basis of the clamped plate: products of
    /// clamped-clamped beam shapes with Rayleigh-quotient eigenvalues.
    pub fn clamped(n: usize, quad: &GaussLegendre) -> Result<Self> {
        let mut modes = Vec::with_capacity(n);
        for k in 1..=n {
            let index = mode_index(k);
            let shape = clamped_mech_mode(index);
            let eigenvalue = rayleigh_quotient(
                |x1, x2| shape.eval(x1, x2),
                |x1, x2| shape.laplacian(x1, x2),
                quad,
            )?;
            modes.push(Mode {
                index,
                eigenvalue,
                shape,
            });
        }
        Ok(ModalBasis {
            kind: BasisKind::MechanicalClamped,
            modes,
        })
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.eigenvalue).collect()
    }
}

/// Eigenpair of the simply supported mechanical operator.
pub fn ss_mech_eigenpair(k: ModeIndex) -> (f64, ModeShape) {
    let s = (k.i * k.i + k.j * k.j) as f64;
    (PI.powi(4) * s * s, ModeShape::SineProduct { i: k.i, j: k.j })
}

/// Eigenpair of the membrane-like electrical operator.
pub fn membrane_eigenpair(k: ModeIndex) -> (f64, ModeShape) {
    let s = (k.i * k.i + k.j * k.j) as f64;
    (PI * PI * s, ModeShape::SineProduct { i: k.i, j: k.j })
}

/// Approximate clamped-plate eigenfunction: product of clamped-clamped beam
/// shapes.
pub fn clamped_mech_mode(k: ModeIndex) -> ModeShape {
    ModeShape::BeamProduct {
        x1: BeamMode::new(k.i),
        x2: BeamMode::new(k.j),
    }
}

/// Rayleigh quotient of the double-Laplacian operator on a candidate
/// eigenfunction given with its analytic Laplacian.
pub fn rayleigh_quotient(
    f: impl Fn(f64, f64) -> f64,
    laplacian: impl Fn(f64, f64) -> f64,
    quad: &GaussLegendre,
) -> Result<f64> {
    let num = quad.integrate_2d(|x1, x2| laplacian(x1, x2).powi(2));
    let den = quad.integrate_2d(|x1, x2| f(x1, x2).powi(2));
    if den < 1e-300 {
        return Err(Error::numerical(
            "Rayleigh quotient denominator underflow: candidate is numerically zero",
        ));
    }
    Ok(num / den)
}

/// Stiffening ratio c_k: clamped Rayleigh eigenvalue over the simply
/// supported eigenvalue of the same mode label.
pub fn stiffening_ratio(k: ModeIndex, quad: &GaussLegendre) -> Result<f64> {
    let shape = clamped_mech_mode(k);
    let lam_clamped = rayleigh_quotient(
        |x1, x2| shape.eval(x1, x2),
        |x1, x2| shape.laplacian(x1, x2),
        quad,
    )?;
    let (lam_ss, _) = ss_mech_eigenpair(k);
    Ok(lam_clamped / lam_ss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{GaussLegendre, DEFAULT_ORDER};
    use approx::assert_relative_eq;

    // frozen from a 40-digit bisection of cos(b) cosh(b) = 1
    const BETA: [f64; 4] = [
        4.730040744862704,
        7.8532046240958376,
        10.995607838001671,
        14.137165491257464,
    ];
    // frozen 40-digit Rayleigh quotients of the beam-product shapes
    const LAMBDA_CLAMPED: [f64; 9] = [
        1303.836653445165,
        5437.1751135730472,
        5437.1751135730472,
        11848.301291459236,
        17551.770136132496,
        17551.770136132496,
        27530.32318632838,
        27530.32318632838,
        48799.579743171288,
    ];

    #[test]
    fn canonical_ordering_matches_table() {
        let expect = [
            (1, 1),
            (1, 2),
            (2, 1),
            (2, 2),
            (1, 3),
            (3, 1),
            (2, 3),
            (3, 2),
            (3, 3),
        ];
        for (k, &(i, j)) in expect.iter().enumerate() {
            let m = mode_index(k + 1);
            assert_eq!((m.i, m.j), (i, j), "ordinal {}", k + 1);
        }
    }

    #[test]
    fn ordering_extension_beyond_table() {
        // first pairs after the 3x3 block, ascending i^2+j^2, ties by i
        let m10 = mode_index(10);
        let m11 = mode_index(11);
        let m12 = mode_index(12);
        assert_eq!((m10.i, m10.j), (1, 4));
        assert_eq!((m11.i, m11.j), (4, 1));
        assert_eq!((m12.i, m12.j), (2, 4));
        // deep into the extension, still well-defined and sorted
        let far: Vec<_> = (10..200).map(|k| {
            let m = mode_index(k);
            m.i * m.i + m.j * m.j
        }).collect();
        assert!(far.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn ss_eigenvalues_match_closed_form() {
        let (l1, _) = ss_mech_eigenpair(mode_index(1));
        assert_relative_eq!(l1, 4.0 * PI.powi(4), max_relative = 1e-15);
        let (l5, _) = ss_mech_eigenpair(mode_index(5));
        assert_relative_eq!(l5, 100.0 * PI.powi(4), max_relative = 1e-15);
    }

    #[test]
    fn membrane_eigenvalues_match_closed_form() {
        let (n1, _) = membrane_eigenpair(mode_index(1));
        assert_relative_eq!(n1, 2.0 * PI * PI, max_relative = 1e-15);
        let (n4, _) = membrane_eigenpair(mode_index(4));
        assert_relative_eq!(n4, 8.0 * PI * PI, max_relative = 1e-15);
    }

    #[test]
    fn ss_eigenvalue_is_square_of_membrane_eigenvalue() {
        for k in 1..=9 {
            let (lam, _) = ss_mech_eigenpair(mode_index(k));
            let (nu, _) = membrane_eigenpair(mode_index(k));
            assert_relative_eq!(lam, nu * nu, max_relative = 1e-14);
        }
    }

    #[test]
    fn sine_modes_vanish_on_the_boundary() {
        let (_, shape) = ss_mech_eigenpair(mode_index(1));
        assert_eq!(shape.eval(0.0, 0.37), 0.0);
        for k in 1..=9 {
            let (_, shape) = ss_mech_eigenpair(mode_index(k));
            for t in [0.0, 0.21, 0.5, 0.83, 1.0] {
                for (x1, x2) in [(0.0, t), (1.0, t), (t, 0.0), (t, 1.0)] {
                    assert!(shape.eval(x1, x2).abs() < 1e-10, "mode {k} at ({x1},{x2})");
                }
            }
        }
    }

    #[test]
    fn membrane_mode_two_has_center_nodal_line() {
        let (_, shape) = membrane_eigenpair(mode_index(2));
        assert!(shape.eval(0.5, 0.5).abs() < 1e-12);
    }

    #[test]
    fn beam_roots_match_bisection_oracle() {
        for (n, expect) in BETA.iter().enumerate() {
            let b = clamped_beam_root(n as u32 + 1);
            assert_relative_eq!(b, expect, max_relative = 1e-12);
            assert!((b.cos() * b.cosh() - 1.0).abs() < 1e-6 * b.cosh() * 1e-6);
        }
    }

    #[test]
    fn beam_roots_approach_asymptote() {
        for n in 4..=12u32 {
            let b = clamped_beam_root(n);
            let asym = (n as f64 + 0.5) * PI;
            assert!((b - asym).abs() < 1e-4, "n={n}: {b} vs {asym}");
        }
    }

    #[test]
    fn beam_shape_is_clamped_and_normalized() {
        let quad = GaussLegendre::new(DEFAULT_ORDER);
        for n in 1..=4u32 {
            let mode = BeamMode::new(n);
            assert!(mode.eval(0.0).abs() < 1e-9);
            assert!(mode.eval(1.0).abs() < 1e-9);
            assert!(mode.deriv(0.0).abs() < 1e-9 * mode.root);
            assert!(mode.deriv(1.0).abs() < 1e-9 * mode.root);
            let norm = quad.integrate(|x| mode.eval(x).powi(2));
            assert_relative_eq!(norm, 1.0, max_relative = 1e-8);
        }
    }

    #[test]
    fn clamped_product_is_clamped_and_normalized() {
        let quad = GaussLegendre::new(DEFAULT_ORDER);
        let shape = clamped_mech_mode(mode_index(1));
        for t in [0.0, 0.3, 0.77, 1.0] {
            for (x1, x2) in [(0.0, t), (1.0, t), (t, 0.0), (t, 1.0)] {
                assert!(shape.eval(x1, x2).abs() < 1e-9);
                let (g1, g2) = shape.gradient(x1, x2);
                // normal derivative at the boundary
                let gn = if x1 == 0.0 || x1 == 1.0 { g1 } else { g2 };
                assert!(gn.abs() < 1e-8, "normal derivative at ({x1},{x2}): {gn}");
            }
        }
        let norm = quad.integrate_2d(|x1, x2| shape.eval(x1, x2).powi(2));
        assert_relative_eq!(norm, 1.0, max_relative = 1e-8);
    }

    #[test]
    fn clamped_fundamental_is_symmetric() {
        let shape = clamped_mech_mode(mode_index(1));
        for (x1, x2) in [(0.1, 0.3), (0.25, 0.7), (0.4, 0.45)] {
            let v = shape.eval(x1, x2);
            assert!((v - shape.eval(x2, x1)).abs() < 1e-10);
            assert!((v - shape.eval(1.0 - x1, x2)).abs() < 1e-10);
            assert!((v - shape.eval(x1, 1.0 - x2)).abs() < 1e-10);
        }
    }

    #[test]
    fn rayleigh_quotient_exact_on_true_eigenfunction() {
        let quad = GaussLegendre::new(DEFAULT_ORDER);
        let (lam, shape) = ss_mech_eigenpair(mode_index(1));
        let est = rayleigh_quotient(
            |x1, x2| shape.eval(x1, x2),
            |x1, x2| shape.laplacian(x1, x2),
            &quad,
        )
        .unwrap();
        assert_relative_eq!(est, lam, max_relative = 1e-12);
    }

    #[test]
    fn rayleigh_quotient_rejects_null_candidate() {
        let quad = GaussLegendre::new(8);
        assert!(rayleigh_quotient(|_, _| 0.0, |_, _| 0.0, &quad).is_err());
    }

    #[test]
    fn clamped_eigenvalues_match_frozen_oracle() {
        let quad = GaussLegendre::new(DEFAULT_ORDER);
        let basis = ModalBasis::clamped(9, &quad).unwrap();
        for (mode, expect) in basis.modes.iter().zip(LAMBDA_CLAMPED) {
            assert_relative_eq!(mode.eigenvalue, expect, max_relative = 1e-10);
        }
    }

    #[test]
    fn clamped_rayleigh_values_published_rounding() {
        let quad = GaussLegendre::new(DEFAULT_ORDER);
        let published = [13.4, 55.8, 55.8, 121.6, 180.2, 180.2, 282.6, 282.6, 501.0];
        let basis = ModalBasis::clamped(9, &quad).unwrap();
        for (mode, expect) in basis.modes.iter().zip(published) {
            let got = mode.eigenvalue / PI.powi(4);
            assert!(
                (got - expect).abs() / expect < 0.01,
                "mode {}: {got} vs {expect}",
                mode.index.k
            );
        }
    }

    #[test]
    fn stiffening_ratios_published_rounding() {
        let quad = GaussLegendre::new(DEFAULT_ORDER);
        let published = [3.35, 2.23, 2.23, 1.90, 1.80, 1.80, 1.67, 1.67, 1.55];
        let mut prev = f64::INFINITY;
        for (k, expect) in published.iter().enumerate() {
            let c = stiffening_ratio(mode_index(k + 1), &quad).unwrap();
            assert!((c - expect).abs() / expect < 0.01, "c_{}: {c}", k + 1);
            assert!(c <= prev + 1e-12, "c_k must not increase");
            prev = c;
        }
    }

    #[test]
    fn gram_matrices_are_identity() {
        let quad = GaussLegendre::new(DEFAULT_ORDER);
        let ss = ModalBasis::simply_supported(9);
        let clamped = ModalBasis::clamped(9, &quad).unwrap();
        for (basis, tol) in [(&ss, 1e-8), (&clamped, 1e-3)] {
            for (a, ma) in basis.modes.iter().enumerate() {
                for (b, mb) in basis.modes.iter().enumerate() {
                    let g = quad.integrate_2d(|x1, x2| ma.shape.eval(x1, x2) * mb.shape.eval(x1, x2));
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!(
                        (g - expect).abs() < tol,
                        "{:?} gram[{a}][{b}] = {g}",
                        basis.kind
                    );
                }
            }
        }
    }
}
