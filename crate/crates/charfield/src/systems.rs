//! The six worked hyperbolic systems.
//!
//! Each system is a bundle of characteristic speeds `lambda1`, `lambda2`,
//! the invariant map between the physical state `(u, v)` and the Riemann
//! invariants `(r1, r2)`, its parameter set and its admissible domain.
//! Everything is immutable data plus pure functions, safe to share across
//! threads.
//!
//! State conventions per system:
//!
//! | system       | `u`                  | `v`                     |
//! |--------------|----------------------|-------------------------|
//! | plasticity   | hydrostatic pressure | slip-line angle         |
//! | coulomb      | pressure             | angle (internal shift of pi/4) |
//! | heat         | temperature-like, > 0| potential gradient      |
//! | gas          | first invariant      | second invariant        |
//! | beam         | tension, > 0         | particle velocity       |
//! | born_infeld  | w_x                  | w_t                     |

use crate::error::{Error, Result};
use crate::specfun::adaptive_quad;

/// Physical state `(u, v)` of a system; units are system-dependent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalState {
    pub u: f64,
    pub v: f64,
}

impl PhysicalState {
    pub fn new(u: f64, v: f64) -> Self {
        PhysicalState { u, v }
    }
}

/// Coordinates in Riemann-invariant space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiemannPoint {
    pub r1: f64,
    pub r2: f64,
}

impl RiemannPoint {
    pub fn new(r1: f64, r2: f64) -> Self {
        RiemannPoint { r1, r2 }
    }
}

/// Names of the shipped systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SystemName {
    Plasticity,
    Coulomb,
    Heat,
    Gas,
    Beam,
    BornInfeld,
}

impl SystemName {
    pub fn as_str(self) -> &'static str {
        match self {
            SystemName::Plasticity => "plasticity",
            SystemName::Coulomb => "coulomb",
            SystemName::Heat => "heat",
            SystemName::Gas => "gas",
            SystemName::Beam => "beam",
            SystemName::BornInfeld => "born_infeld",
        }
    }
}

/// Stress law `a(sigma)` of the beam system.
///
/// The closed-form kernels exist for `a = sqrt(sigma)`; a tabulated law is
/// accepted for the invariant map and characteristic speeds, with the
/// integral `A(sigma) = int_0^sigma d s / a(s)` evaluated segment-exactly on
/// the linear interpolant.
#[derive(Clone, Debug)]
pub enum BeamLaw {
    SqrtStress,
    /// Strictly positive samples `(sigma_i, a_i)` on a strictly increasing
    /// grid starting at `sigma_0 = 0`; `a` is interpolated linearly.
    Tabulated(Vec<(f64, f64)>),
}

impl BeamLaw {
    fn validate(&self) -> Result<()> {
        if let BeamLaw::Tabulated(rows) = self {
            if rows.len() < 2 {
                return Err(Error::Config("beam law table needs >= 2 rows".into()));
            }
            if rows[0].0 != 0.0 {
                return Err(Error::Config("beam law table must start at sigma = 0".into()));
            }
            for w in rows.windows(2) {
                if w[1].0 <= w[0].0 {
                    return Err(Error::Config("beam law table sigma not increasing".into()));
                }
            }
            if rows.iter().any(|&(_, a)| a <= 0.0) {
                return Err(Error::Config("beam law a(sigma) must be positive".into()));
            }
        }
        Ok(())
    }

    fn a(&self, sigma: f64) -> f64 {
        match self {
            BeamLaw::SqrtStress => sigma.sqrt(),
            BeamLaw::Tabulated(rows) => {
                let last = rows.len() - 1;
                if sigma >= rows[last].0 {
                    return rows[last].1;
                }
                let i = rows.partition_point(|&(s, _)| s <= sigma).max(1) - 1;
                let (s0, a0) = rows[i];
                let (s1, a1) = rows[i + 1];
                a0 + (a1 - a0) * (sigma - s0) / (s1 - s0)
            }
        }
    }

    /// `A(sigma) = int_0^sigma d s / a(s)`.
    fn integral(&self, sigma: f64) -> f64 {
        match self {
            BeamLaw::SqrtStress => 2.0 * sigma.sqrt(),
            BeamLaw::Tabulated(rows) => {
                // exact on each linear segment: int ds/(a0 + m (s - s0))
                let mut acc = 0.0;
                let mut s = 0.0;
                for w in rows.windows(2) {
                    let (s0, a0) = w[0];
                    let (s1, a1) = w[1];
                    let hi = sigma.min(s1);
                    if hi <= s0 {
                        break;
                    }
                    let m = (a1 - a0) / (s1 - s0);
                    acc += if m.abs() < 1e-14 {
                        (hi - s0) / a0
                    } else {
                        ((a0 + m * (hi - s0)) / a0).ln() / m
                    };
                    s = hi;
                    if hi < s1 {
                        break;
                    }
                }
                if sigma > s {
                    // beyond the table: constant extrapolation of a
                    acc += (sigma - s) / self.a(sigma);
                }
                acc
            }
        }
    }

    /// Inverse of [`BeamLaw::integral`] by bisection.
    fn invert_integral(&self, target: f64) -> Result<f64> {
        match self {
            BeamLaw::SqrtStress => Ok((target / 2.0) * (target / 2.0)),
            BeamLaw::Tabulated(_) => {
                if target < 0.0 {
                    return Err(Error::Domain {
                        what: "beam invariant inversion",
                        why: format!("negative invariant gap {target}"),
                    });
                }
                let mut hi = 1.0f64;
                while self.integral(hi) < target {
                    hi *= 2.0;
                    if hi > 1e12 {
                        return Err(Error::Domain {
                            what: "beam invariant inversion",
                            why: "target beyond tabulated range".into(),
                        });
                    }
                }
                let mut lo = 0.0f64;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.integral(mid) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
        }
    }
}

/// Typed parameter sets of the six systems.
#[derive(Clone, Debug)]
enum SystemKind {
    Plasticity { k: f64 },
    Coulomb { alpha: f64, cohesion: f64 },
    Heat { chi0: f64, tau0: f64 },
    Gas { gamma: f64 },
    Beam { law: BeamLaw },
    BornInfeld,
}

/// Gas coefficients derived from the polytrope constant.
#[derive(Clone, Copy, Debug)]
pub struct GasCoefficients {
    pub alpha: f64,
    pub beta: f64,
    /// kernel exponent `K = (gamma + 1) / (2 (1 - gamma))`
    pub kcap: f64,
}

impl GasCoefficients {
    pub fn from_gamma(gamma: f64) -> Self {
        GasCoefficients {
            alpha: 0.5 + (gamma - 1.0) / 4.0,
            beta: 0.5 - (gamma - 1.0) / 4.0,
            kcap: (gamma + 1.0) / (2.0 * (1.0 - gamma)),
        }
    }
}

/// One of the six worked systems: characteristic speeds, invariant maps,
/// parameters and admissible domain.
#[derive(Clone, Debug)]
pub struct SystemDescriptor {
    kind: SystemKind,
}

/// Guard for `|lambda1 - lambda2|` in [`SystemDescriptor::eigenvalues`].
pub const DEGENERACY_TOL: f64 = 1e-12;

impl SystemDescriptor {
    /// Ideal plane plasticity; `k` is the plasticity constant.
    pub fn plasticity(k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::Config(format!("plasticity constant k = {k} must be > 0")));
        }
        Ok(SystemDescriptor { kind: SystemKind::Plasticity { k } })
    }

    /// Soil plasticity under a Coulomb criterion; `alpha` in `(0, pi/2)`,
    /// `alpha != pi/4`, `cohesion > 0`.
    pub fn coulomb(alpha: f64, cohesion: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < std::f64::consts::FRAC_PI_2) {
            return Err(Error::Config(format!("coulomb angle {alpha} outside (0, pi/2)")));
        }
        if (alpha - std::f64::consts::FRAC_PI_4).abs() < 1e-9 {
            return Err(Error::Config(
                "coulomb angle pi/4 degenerates to the plasticity system".into(),
            ));
        }
        if !(cohesion > 0.0) {
            return Err(Error::Config(format!("cohesion {cohesion} must be > 0")));
        }
        Ok(SystemDescriptor { kind: SystemKind::Coulomb { alpha, cohesion } })
    }

    /// Hyperbolic heat flow; both constants positive.
    pub fn heat(chi0: f64, tau0: f64) -> Result<Self> {
        if !(chi0 > 0.0 && tau0 > 0.0) {
            return Err(Error::Config(format!("heat constants chi0 = {chi0}, tau0 = {tau0} must be > 0")));
        }
        Ok(SystemDescriptor { kind: SystemKind::Heat { chi0, tau0 } })
    }

    /// Isentropic polytropic gas; `gamma != +-1`.
    pub fn gas(gamma: f64) -> Result<Self> {
        if (gamma - 1.0).abs() < 1e-12 || (gamma + 1.0).abs() < 1e-12 {
            return Err(Error::Config(format!("polytrope gamma = {gamma} must differ from +-1")));
        }
        Ok(SystemDescriptor { kind: SystemKind::Gas { gamma } })
    }

    /// Elastic-plastic beam with the square-root stress law.
    pub fn beam() -> Self {
        SystemDescriptor { kind: SystemKind::Beam { law: BeamLaw::SqrtStress } }
    }

    /// Beam with a tabulated stress law (invariant maps and speeds only;
    /// conservation pairs require the square-root law).
    pub fn beam_with_law(law: BeamLaw) -> Result<Self> {
        law.validate()?;
        Ok(SystemDescriptor { kind: SystemKind::Beam { law } })
    }

    /// Plane-polarized Born-Infeld waves.
    pub fn born_infeld() -> Self {
        SystemDescriptor { kind: SystemKind::BornInfeld }
    }

    /// Build a system from its registry name and a named-parameter map.
    /// Unknown names and parameters are rejected; missing parameters take
    /// the documented defaults (`k = 1/2`, `alpha_c = pi/3`, `cohesion = 1`,
    /// `chi0 = tau0 = 1`, `gamma = 2`).
    pub fn by_name(name: &str, params: &std::collections::BTreeMap<String, f64>) -> Result<Self> {
        let get = |key: &str, default: f64| params.get(key).copied().unwrap_or(default);
        let allowed: &[&str] = match name {
            "plasticity" => &["k"],
            "coulomb" => &["alpha_c", "cohesion"],
            "heat" => &["chi0", "tau0"],
            "gas" => &["gamma"],
            "beam" | "born_infeld" => &[],
            other => {
                return Err(Error::Config(format!(
                    "unknown system {other:?}; expected one of plasticity, coulomb, heat, gas, beam, born_infeld"
                )))
            }
        };
        for key in params.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Config(format!("parameter {key:?} not accepted by {name}")));
            }
        }
        match name {
            "plasticity" => Self::plasticity(get("k", 0.5)),
            "coulomb" => Self::coulomb(
                get("alpha_c", std::f64::consts::FRAC_PI_3),
                get("cohesion", 1.0),
            ),
            "heat" => Self::heat(get("chi0", 1.0), get("tau0", 1.0)),
            "gas" => Self::gas(get("gamma", 2.0)),
            "beam" => Ok(Self::beam()),
            _ => Ok(Self::born_infeld()),
        }
    }

    pub fn name(&self) -> SystemName {
        match self.kind {
            SystemKind::Plasticity { .. } => SystemName::Plasticity,
            SystemKind::Coulomb { .. } => SystemName::Coulomb,
            SystemKind::Heat { .. } => SystemName::Heat,
            SystemKind::Gas { .. } => SystemName::Gas,
            SystemKind::Beam { .. } => SystemName::Beam,
            SystemKind::BornInfeld => SystemName::BornInfeld,
        }
    }

    /// Named parameters of this instance (for reports and serialization).
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match &self.kind {
            SystemKind::Plasticity { k } => vec![("k", *k)],
            SystemKind::Coulomb { alpha, cohesion } => {
                vec![("alpha_c", *alpha), ("cohesion", *cohesion)]
            }
            SystemKind::Heat { chi0, tau0 } => vec![("chi0", *chi0), ("tau0", *tau0)],
            SystemKind::Gas { gamma } => vec![("gamma", *gamma)],
            SystemKind::Beam { .. } | SystemKind::BornInfeld => vec![],
        }
    }

    /// Gas-kernel coefficients, present for the gas system only.
    pub fn gas_coefficients(&self) -> Option<GasCoefficients> {
        match self.kind {
            SystemKind::Gas { gamma } => Some(GasCoefficients::from_gamma(gamma)),
            _ => None,
        }
    }

    pub(crate) fn coulomb_params(&self) -> Option<(f64, f64)> {
        match self.kind {
            SystemKind::Coulomb { alpha, cohesion } => Some((alpha, cohesion)),
            _ => None,
        }
    }

    pub(crate) fn heat_chi0(&self) -> Option<f64> {
        match self.kind {
            SystemKind::Heat { chi0, .. } => Some(chi0),
            _ => None,
        }
    }

    /// Check the admissible domain of a physical state; the error names the
    /// violated constraint.
    pub fn check_state(&self, state: PhysicalState) -> Result<()> {
        let fail = |constraint: &'static str| -> Result<()> {
            Err(Error::InadmissibleState {
                system: self.name().as_str(),
                constraint,
                u: state.u,
                v: state.v,
            })
        };
        if !state.u.is_finite() || !state.v.is_finite() {
            return fail("state must be finite");
        }
        match &self.kind {
            // the invariant map itself is linear; the excluded angles only
            // degenerate the speeds and are guarded in `eigenvalues`
            SystemKind::Plasticity { .. } => {}
            SystemKind::Coulomb { alpha, cohesion } => {
                let c2a = (2.0 * alpha).tan().recip();
                if state.u * c2a + cohesion <= 0.0 {
                    return fail("sigma cot(2 alpha) + cohesion > 0");
                }
            }
            SystemKind::Heat { .. } => {
                if state.u <= 0.0 {
                    return fail("u > 0");
                }
            }
            SystemKind::Gas { .. } => {
                if state.v <= state.u {
                    return fail("r2 > r1 (state is already the invariant pair)");
                }
            }
            SystemKind::Beam { .. } => {
                if state.u <= 0.0 {
                    return fail("sigma > 0");
                }
            }
            SystemKind::BornInfeld => {
                if 1.0 + state.u * state.u - state.v * state.v <= 0.0 {
                    return fail("hyperbolicity 1 + u^2 - v^2 > 0");
                }
            }
        }
        Ok(())
    }

    /// Check that an invariant point lies in the image of the invariant map
    /// (for pair evaluation; [`SystemDescriptor::from_invariants`] enforces
    /// the stricter preimage conditions itself).
    pub fn check_invariants(&self, pt: RiemannPoint) -> Result<()> {
        let fail = |constraint: &'static str| -> Result<()> {
            Err(Error::InadmissibleInvariants {
                system: self.name().as_str(),
                constraint,
                r1: pt.r1,
                r2: pt.r2,
            })
        };
        if !pt.r1.is_finite() || !pt.r2.is_finite() {
            return fail("invariants must be finite");
        }
        match &self.kind {
            SystemKind::Plasticity { .. } | SystemKind::Coulomb { .. } => {}
            SystemKind::Heat { .. } => {
                if pt.r1 <= 0.0 || pt.r2 <= 0.0 {
                    return fail("r1 > 0 and r2 > 0");
                }
            }
            SystemKind::Gas { .. } => {
                if pt.r2 <= pt.r1 {
                    return fail("r2 > r1");
                }
            }
            SystemKind::Beam { .. } => {
                if pt.r1 <= pt.r2 {
                    return fail("r1 > r2 (sigma > 0)");
                }
            }
            SystemKind::BornInfeld => {
                if pt.r1 == pt.r2 {
                    return fail("r1 != r2");
                }
            }
        }
        Ok(())
    }

    /// Map a physical state to Riemann invariants.
    pub fn to_invariants(&self, state: PhysicalState) -> Result<RiemannPoint> {
        self.check_state(state)?;
        let (u, v) = (state.u, state.v);
        Ok(match &self.kind {
            SystemKind::Plasticity { k } => {
                RiemannPoint::new(u / (2.0 * k) - v, u / (2.0 * k) + v)
            }
            SystemKind::Coulomb { alpha, cohesion } => {
                let t2a = (2.0 * alpha).tan();
                let theta_big = v + std::f64::consts::FRAC_PI_4;
                let m = 0.5 * t2a * (u / t2a + cohesion).ln();
                RiemannPoint::new(m + theta_big, m - theta_big)
            }
            SystemKind::Heat { chi0, .. } => {
                RiemannPoint::new(u * (-v / chi0).exp(), u * (v / chi0).exp())
            }
            SystemKind::Gas { .. } => RiemannPoint::new(u, v),
            SystemKind::Beam { law } => {
                let a_int = law.integral(u);
                RiemannPoint::new(v + a_int, v - a_int)
            }
            SystemKind::BornInfeld => {
                let d = 1.0 + u * u;
                let root = (d - v * v).sqrt();
                RiemannPoint::new((-u * v - root) / d, (-u * v + root) / d)
            }
        })
    }

    /// Map invariants back to a physical state, inverting
    /// [`SystemDescriptor::to_invariants`] to 1e-12.
    ///
    /// The Born-Infeld hodograph is many-to-one: both `(u, v)` and
    /// `(-u, -v)` share one invariant pair, and two distinct magnitudes of
    /// `u` can as well. The canonical preimage returned here has `v >= 0`
    /// (and `u >= 0` when `v = 0`) with the smaller admissible `u^2`.
    pub fn from_invariants(&self, pt: RiemannPoint) -> Result<PhysicalState> {
        self.check_invariants(pt)?;
        let (r1, r2) = (pt.r1, pt.r2);
        match &self.kind {
            SystemKind::Plasticity { k } => Ok(PhysicalState::new(
                k * (r1 + r2),
                0.5 * (r2 - r1),
            )),
            SystemKind::Coulomb { alpha, cohesion } => {
                let t2a = (2.0 * alpha).tan();
                let theta_big = 0.5 * (r1 - r2);
                let m = 0.5 * (r1 + r2);
                let sigma = ((2.0 * m / t2a).exp() - cohesion) * t2a;
                Ok(PhysicalState::new(
                    sigma,
                    theta_big - std::f64::consts::FRAC_PI_4,
                ))
            }
            SystemKind::Heat { chi0, .. } => Ok(PhysicalState::new(
                (r1 * r2).sqrt(),
                0.5 * chi0 * (r2 / r1).ln(),
            )),
            SystemKind::Gas { .. } => Ok(PhysicalState::new(r1, r2)),
            SystemKind::Beam { law } => {
                let sigma = law.invert_integral(0.5 * (r1 - r2))?;
                Ok(PhysicalState::new(sigma, 0.5 * (r1 + r2)))
            }
            SystemKind::BornInfeld => born_infeld_preimage(pt),
        }
    }

    /// Characteristic speeds `(lambda1, lambda2)` at an invariant point.
    pub fn eigenvalues(&self, pt: RiemannPoint) -> Result<(f64, f64)> {
        self.check_invariants(pt)?;
        let degenerate = |constraint: &'static str| Error::InadmissibleInvariants {
            system: self.name().as_str(),
            constraint,
            r1: pt.r1,
            r2: pt.r2,
        };
        // excluded angles where a speed leaves the finite chart
        match &self.kind {
            SystemKind::Plasticity { .. } => {
                if (pt.r2 - pt.r1).sin().abs() < 1e-12 {
                    return Err(degenerate("sin(r2 - r1) != 0 (finite speeds)"));
                }
            }
            SystemKind::Coulomb { alpha, .. } => {
                let theta_big = 0.5 * (pt.r1 - pt.r2);
                if (theta_big + alpha).cos().abs() < 1e-12
                    || (theta_big - alpha).cos().abs() < 1e-12
                {
                    return Err(degenerate("cos((r1 - r2)/2 +- alpha) != 0 (finite speeds)"));
                }
            }
            _ => {}
        }
        let l1 = self.lambda1(pt);
        let l2 = self.lambda2(pt);
        let gap = (l1 - l2).abs();
        if !(gap > DEGENERACY_TOL) || !l1.is_finite() || !l2.is_finite() {
            return Err(Error::Degeneracy {
                r1: pt.r1,
                r2: pt.r2,
                gap,
            });
        }
        Ok((l1, l2))
    }

    /// First characteristic speed (unchecked; see [`Self::eigenvalues`]).
    pub fn lambda1(&self, pt: RiemannPoint) -> f64 {
        match &self.kind {
            SystemKind::Plasticity { .. } => (0.5 * (pt.r2 - pt.r1)).tan(),
            SystemKind::Coulomb { alpha, .. } => (0.5 * (pt.r1 - pt.r2) + alpha).tan(),
            SystemKind::Heat { chi0, .. } => chi0 / (pt.r1 * pt.r2).sqrt(),
            SystemKind::Gas { gamma } => {
                let c = GasCoefficients::from_gamma(*gamma);
                c.alpha * pt.r1 + c.beta * pt.r2
            }
            SystemKind::Beam { law } => {
                -law.a(sigma_of_beam(law, pt))
            }
            SystemKind::BornInfeld => pt.r2,
        }
    }

    /// Second characteristic speed (unchecked; see [`Self::eigenvalues`]).
    pub fn lambda2(&self, pt: RiemannPoint) -> f64 {
        match &self.kind {
            SystemKind::Plasticity { .. } => {
                let v = 0.5 * (pt.r2 - pt.r1);
                -1.0 / v.tan()
            }
            SystemKind::Coulomb { alpha, .. } => (0.5 * (pt.r1 - pt.r2) - alpha).tan(),
            SystemKind::Heat { chi0, .. } => -chi0 / (pt.r1 * pt.r2).sqrt(),
            SystemKind::Gas { gamma } => {
                let c = GasCoefficients::from_gamma(*gamma);
                c.alpha * pt.r2 + c.beta * pt.r1
            }
            SystemKind::Beam { law } => law.a(sigma_of_beam(law, pt)),
            SystemKind::BornInfeld => pt.r1,
        }
    }

    /// Deterministic admissible invariant sample points for property checks
    /// and domain sampling; `n` points spread over a canonical box.
    pub fn sample_invariants(&self, n: usize) -> Vec<RiemannPoint> {
        let mut out = Vec::with_capacity(n);
        // low-discrepancy lattice on the unit square
        for i in 0..n {
            let s = (i as f64 + 0.5) / n as f64;
            let t = (i as f64 * 0.618_033_988_749_894_9).fract();
            out.push(match &self.kind {
                SystemKind::Plasticity { .. } => {
                    // v in (0.15, pi/2 - 0.15)
                    let v = 0.15 + s * (std::f64::consts::FRAC_PI_2 - 0.3);
                    let mid = -1.0 + 2.0 * t;
                    RiemannPoint::new(mid - v, mid + v)
                }
                SystemKind::Coulomb { alpha, .. } => {
                    // Theta keeping both tangents finite
                    let lo = -alpha.min(std::f64::consts::FRAC_PI_2 - alpha) + 0.15;
                    let hi = -lo;
                    let theta_big = lo + s * (hi - lo);
                    let m = -0.5 + t;
                    RiemannPoint::new(m + theta_big, m - theta_big)
                }
                SystemKind::Heat { .. } => RiemannPoint::new(0.3 + 2.0 * s, 0.4 + 2.0 * t),
                SystemKind::Gas { .. } => {
                    let r1 = -1.0 + 2.0 * t;
                    RiemannPoint::new(r1, r1 + 0.5 + 2.0 * s)
                }
                SystemKind::Beam { .. } => {
                    let r2 = -1.0 + 2.0 * t;
                    RiemannPoint::new(r2 + 0.5 + 2.0 * s, r2)
                }
                SystemKind::BornInfeld => {
                    let r1 = -0.9 + 1.2 * t;
                    RiemannPoint::new(r1, r1 + 0.05 + 0.8 * s)
                }
            });
        }
        out
    }
}

fn sigma_of_beam(law: &BeamLaw, pt: RiemannPoint) -> f64 {
    match law {
        BeamLaw::SqrtStress => {
            let q = 0.25 * (pt.r1 - pt.r2);
            q * q
        }
        BeamLaw::Tabulated(_) => law
            .invert_integral(0.5 * (pt.r1 - pt.r2))
            .unwrap_or(f64::NAN),
    }
}

/// Canonical Born-Infeld preimage: smaller `u^2` root, `v >= 0` orientation.
fn born_infeld_preimage(pt: RiemannPoint) -> Result<PhysicalState> {
    let (r1, r2) = (pt.r1, pt.r2);
    let fail = |why: &'static str| Error::InadmissibleInvariants {
        system: "born_infeld",
        constraint: why,
        r1,
        r2,
    };
    if r1 >= r2 {
        return Err(fail("image requires r1 < r2"));
    }
    let p = r1 * r2;
    let s = r1 + r2;
    let c = 0.5 * (r2 - r1);
    // (p - s^2/4) w^2 + (p + 1 - s^2/2) w - s^2/4 = 0 for w = u^2
    let qa = -c * c;
    let qb = p + 1.0 - 0.5 * s * s;
    let qc = -0.25 * s * s;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Err(fail("no real preimage (discriminant < 0)"));
    }
    // roots of qa w^2 + qb w + qc; qa < 0
    let sq = disc.sqrt();
    let w1 = (-qb + sq) / (2.0 * qa);
    let w2 = (-qb - sq) / (2.0 * qa);
    let w = [w1, w2]
        .into_iter()
        .filter(|w| *w >= -1e-15)
        .fold(f64::INFINITY, f64::min);
    if !w.is_finite() {
        return Err(fail("no nonnegative u^2 root"));
    }
    let w = w.max(0.0);
    let d = 1.0 + w;
    let v2 = p * d + 1.0;
    if v2 < -1e-12 {
        return Err(fail("no real v (v^2 < 0)"));
    }
    let v = v2.max(0.0).sqrt();
    let u = if v > 0.0 {
        // sign pinned by r1 + r2 = -2 u v / d
        -s * d / (2.0 * v)
    } else {
        w.sqrt()
    };
    let state = PhysicalState::new(u, v);
    if 1.0 + u * u - v * v <= 0.0 {
        return Err(fail("preimage not hyperbolic"));
    }
    Ok(state)
}

/// All six systems with their documented default parameters.
pub fn default_systems() -> Vec<SystemDescriptor> {
    vec![
        SystemDescriptor::plasticity(0.5).unwrap(),
        SystemDescriptor::coulomb(std::f64::consts::FRAC_PI_3, 1.0).unwrap(),
        SystemDescriptor::heat(1.0, 1.0).unwrap(),
        SystemDescriptor::gas(2.0).unwrap(),
        SystemDescriptor::beam(),
        SystemDescriptor::born_infeld(),
    ]
}

/// Deterministic admissible physical states for round-trip checks, drawn
/// through the inverse map so that multi-valued hodographs (Born-Infeld)
/// sample their canonical branch.
pub fn sample_states(sys: &SystemDescriptor, n: usize) -> Vec<PhysicalState> {
    sys.sample_invariants(n)
        .into_iter()
        .filter_map(|pt| sys.from_invariants(pt).ok())
        .collect()
}

/// Quadrature-backed check of a tabulated beam law against a closed form,
/// used by tests; returns the largest mismatch of `A(sigma)` over the grid.
pub fn beam_integral_mismatch(law: &BeamLaw, reference: impl Fn(f64) -> f64, max_sigma: f64) -> f64 {
    let mut worst = 0.0f64;
    for i in 1..=40 {
        let sigma = max_sigma * i as f64 / 40.0;
        let direct = law.integral(sigma);
        let quad = adaptive_quad(|s| 1.0 / law.a(s), 1e-12, sigma, 1e-11)
            .map(|r| r.value)
            .unwrap_or(f64::NAN);
        worst = worst.max((direct - quad).abs().max((direct - reference(sigma)).abs()));
    }
    worst
}
