//! Laplace invariants and factor-function equivalence checks.
//!
//! Both the hodograph equation for `x(r1, r2)` and the pair equation for
//! `phi(r1, r2)` are second-order hyperbolic equations
//! `V_{r1 r2} + C1 V_{r1} + C2 V_{r2} + C3 V = 0` whose Laplace invariants
//!
//! ```text
//! h = d(C1)/d(r1) + C1 C2 - C3,    k = d(C2)/d(r2) + C1 C2 - C3
//! ```
//!
//! decide equivalence up to a reparameterization and a factor function `w`.
//! The cross identities `h_x = k_phi` and `k_x = h_phi` hold for every
//! system; `h_x = k_x` additionally (the eigenvalue relation below) means
//! `phi = w x` for a pure factor `w`, which is how conservation-law
//! components become hodograph solutions in disguise.
//!
//! All lambda derivatives are central differences; closed forms for the
//! linear-speed systems back them up in the tests.

use crate::error::{Error, Result};
use crate::systems::{RiemannPoint, SystemDescriptor};

/// Which second-order equation the invariants belong to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquationKind {
    /// Hodograph coordinate equation (for `x(r1, r2)`).
    EqX,
    /// Conservation-pair equation (for `phi(r1, r2)`).
    EqPhi,
}

/// Laplace invariants of one equation at one point.
#[derive(Clone, Copy, Debug)]
pub struct LaplaceInvariants {
    pub h: f64,
    pub k: f64,
    pub at: RiemannPoint,
    pub equation: EquationKind,
}

/// Default finite-difference step for the lambda derivatives. Each
/// derivative is a Richardson-extrapolated pair of central differences
/// (steps `h` and `h/2`), so truncation falls as `h^4` while rounding stays
/// near `eps / (h/2)^2`; 1e-3 puts both around 1e-9 for speeds of order one.
pub const DEFAULT_FD_STEP: f64 = 1e-3;

/// First and mixed-second derivatives of both speeds at a point.
struct SpeedDerivs {
    l1: f64,
    l2: f64,
    l1_1: f64,
    l1_2: f64,
    l2_1: f64,
    l2_2: f64,
    l1_12: f64,
    l2_12: f64,
}

type Speed<'a> = dyn Fn(RiemannPoint) -> f64 + 'a;

/// One step of Richardson extrapolation on a second-order difference rule.
fn richardson(rule: impl Fn(f64) -> f64, h: f64) -> f64 {
    (4.0 * rule(0.5 * h) - rule(h)) / 3.0
}

fn speed_derivs(l1: &Speed, l2: &Speed, pt: RiemannPoint, h: f64) -> Result<SpeedDerivs> {
    if !(h > 0.0) {
        return Err(Error::Domain {
            what: "laplace derivatives",
            why: format!("finite-difference step {h} must be positive"),
        });
    }
    let at = |f: &Speed, dr1: f64, dr2: f64| f(RiemannPoint::new(pt.r1 + dr1, pt.r2 + dr2));
    let d1 = |f: &Speed| richardson(|s| (at(f, s, 0.0) - at(f, -s, 0.0)) / (2.0 * s), h);
    let d2 = |f: &Speed| richardson(|s| (at(f, 0.0, s) - at(f, 0.0, -s)) / (2.0 * s), h);
    let d12 = |f: &Speed| {
        richardson(
            |s| (at(f, s, s) - at(f, s, -s) - at(f, -s, s) + at(f, -s, -s)) / (4.0 * s * s),
            h,
        )
    };
    let out = SpeedDerivs {
        l1: l1(pt),
        l2: l2(pt),
        l1_1: d1(l1),
        l1_2: d2(l1),
        l2_1: d1(l2),
        l2_2: d2(l2),
        l1_12: d12(l1),
        l2_12: d12(l2),
    };
    let gap = out.l1 - out.l2;
    if !gap.is_finite() || gap.abs() < 1e-10 {
        return Err(Error::Degeneracy {
            r1: pt.r1,
            r2: pt.r2,
            gap: gap.abs(),
        });
    }
    Ok(out)
}

/// First-order coefficients `(C1, C2)` of the requested equation.
fn coefficients(eq: EquationKind, d: &SpeedDerivs) -> (f64, f64) {
    let dl = d.l1 - d.l2;
    match eq {
        EquationKind::EqX => (-d.l2_2 / dl, d.l1_1 / dl),
        EquationKind::EqPhi => (d.l1_2 / dl, -d.l2_1 / dl),
    }
}

fn invariants_from_derivs(eq: EquationKind, d: &SpeedDerivs) -> (f64, f64) {
    let dl = d.l1 - d.l2;
    let dl1 = d.l1_1 - d.l2_1; // d(dl)/d(r1)
    let dl2 = d.l1_2 - d.l2_2; // d(dl)/d(r2)
    let (c1, c2) = coefficients(eq, d);
    // quotient-rule expansions of d(C1)/d(r1) and d(C2)/d(r2)
    let (dc1_dr1, dc2_dr2) = match eq {
        EquationKind::EqX => (
            -d.l2_12 / dl + d.l2_2 * dl1 / (dl * dl),
            d.l1_12 / dl - d.l1_1 * dl2 / (dl * dl),
        ),
        EquationKind::EqPhi => (
            d.l1_12 / dl - d.l1_2 * dl1 / (dl * dl),
            -d.l2_12 / dl + d.l2_1 * dl2 / (dl * dl),
        ),
    };
    (dc1_dr1 + c1 * c2, dc2_dr2 + c1 * c2)
}

fn laplace_invariants_from_speeds(
    l1: &Speed,
    l2: &Speed,
    equation: EquationKind,
    pt: RiemannPoint,
    h_fd: f64,
) -> Result<LaplaceInvariants> {
    let d = speed_derivs(l1, l2, pt, h_fd)?;
    let (h, k) = invariants_from_derivs(equation, &d);
    Ok(LaplaceInvariants {
        h,
        k,
        at: pt,
        equation,
    })
}

/// Laplace invariants of `equation` for `sys` at `pt`.
pub fn laplace_invariants(
    sys: &SystemDescriptor,
    equation: EquationKind,
    pt: RiemannPoint,
    h_fd: f64,
) -> Result<LaplaceInvariants> {
    laplace_invariants_from_speeds(
        &|p| sys.lambda1(p),
        &|p| sys.lambda2(p),
        equation,
        pt,
        h_fd,
    )
}

/// Residual of the eigenvalue relation
/// `(l1 - l2) d2(l1 + l2)/dr1 dr2 - (dl1/dr1 dl1/dr2 - dl2/dr1 dl2/dr2)`.
///
/// Zero exactly when `h = k` for the hodograph equation, i.e. when the pair
/// component is a pure factor multiple of a hodograph solution.
pub fn lambda_relation_residual(sys: &SystemDescriptor, pt: RiemannPoint, h_fd: f64) -> Result<f64> {
    let d = speed_derivs(&|p| sys.lambda1(p), &|p| sys.lambda2(p), pt, h_fd)?;
    Ok((d.l1 - d.l2) * (d.l1_12 + d.l2_12) - (d.l1_1 * d.l1_2 - d.l2_1 * d.l2_2))
}

/// Residuals of the factor-function system for a candidate `w`:
/// the two logarithmic-gradient equations and the second-order closure.
pub fn w_residual(
    sys: &SystemDescriptor,
    w: &dyn Fn(RiemannPoint) -> f64,
    pt: RiemannPoint,
    h_fd: f64,
) -> Result<(f64, f64, f64)> {
    w_residual_from_speeds(&|p| sys.lambda1(p), &|p| sys.lambda2(p), w, pt, h_fd)
}

fn w_residual_from_speeds(
    l1: &Speed,
    l2: &Speed,
    w: &dyn Fn(RiemannPoint) -> f64,
    pt: RiemannPoint,
    h_fd: f64,
) -> Result<(f64, f64, f64)> {
    let w0 = w(pt);
    if !(w0 > 0.0) {
        return Err(Error::Domain {
            what: "w_residual",
            why: format!("factor function must be positive near the point, got {w0}"),
        });
    }
    let h = h_fd;
    let at = |dr1: f64, dr2: f64| w(RiemannPoint::new(pt.r1 + dr1, pt.r2 + dr2));
    let w1 = richardson(|s| (at(s, 0.0) - at(-s, 0.0)) / (2.0 * s), h);
    let w2 = richardson(|s| (at(0.0, s) - at(0.0, -s)) / (2.0 * s), h);
    let w12 = richardson(
        |s| (at(s, s) - at(s, -s) - at(-s, s) + at(-s, -s)) / (4.0 * s * s),
        h,
    );
    let d = speed_derivs(l1, l2, pt, h_fd)?;
    let (c1x, c2x) = coefficients(EquationKind::EqX, &d);
    let (c1p, c2p) = coefficients(EquationKind::EqPhi, &d);
    Ok((
        w1 / w0 - (c2x - c2p),
        w2 / w0 - (c1x - c1p),
        w12 + c1p * w1 + c2p * w2,
    ))
}

/// The two shortcut pairings, decided by sampling the admissible domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PairingClass {
    /// `det Lambda` constant: `(phi, psi) = (y, K x)`.
    DetConst { k: f64 },
    /// `lambda1 = -lambda2`: `(phi, psi) = (x, -y)`.
    Antisymmetric,
    General,
}

/// Classify `sys` by sampling `det Lambda` and `lambda1 + lambda2` over the
/// admissible domain (constant within 1e-10 selects the special cases).
pub fn simplest_case_pairing(sys: &SystemDescriptor) -> PairingClass {
    let samples = sys.sample_invariants(128);
    let dets: Vec<f64> = samples
        .iter()
        .map(|&p| sys.lambda1(p) * sys.lambda2(p))
        .collect();
    let sums: Vec<f64> = samples
        .iter()
        .map(|&p| sys.lambda1(p) + sys.lambda2(p))
        .collect();
    let spread = |v: &[f64]| -> f64 {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    };
    let det0 = dets[0];
    if spread(&dets) <= 1e-10 * (1.0 + det0.abs()) {
        return PairingClass::DetConst { k: det0 };
    }
    let sum_scale = sums.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let lam_scale = samples
        .iter()
        .map(|&p| sys.lambda1(p).abs())
        .fold(1.0f64, f64::max);
    if sum_scale <= 1e-10 * lam_scale {
        return PairingClass::Antisymmetric;
    }
    PairingClass::General
}
