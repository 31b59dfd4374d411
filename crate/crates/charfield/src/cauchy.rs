//! Boundary curves and the Cauchy solver.
//!
//! A [`BoundaryCurve`] is a non-characteristic arc carrying Cauchy data.
//! The position of the characteristic intersection point for a parameter
//! pair `(tau_p, tau_q)` comes from one line integral of the x-problem pair
//! and one of the y-problem pair along the arc:
//!
//! ```text
//! M_x = x(tau_q) - int (psi x' - phi y') d tau      (x-problem pair)
//! M_y = y(tau_q) - int (psi x' - phi y') d tau      (y-problem pair)
//! ```
//!
//! with the pair's base point `(r1(tau_q), r2(tau_p))`. Nothing here needs
//! the hodograph Jacobian, so arcs with constant data (simple-wave regions)
//! solve exactly like any other.
//!
//! Data jumps at breakpoints are closed with centered fans: the curve is
//! reparameterized so that each jump occupies a parameter interval of zero
//! geometric length on which the invariants interpolate linearly. Fan
//! intervals contribute nothing to the arc integrals (`x' = y' = 0`) but
//! give the fan characteristics addressable launch parameters.

use std::cell::Cell;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pairs::{pair_with_tol, BasePoint, ConservationPair, ProblemKind};
use crate::specfun::adaptive_quad;
use crate::systems::{PhysicalState, RiemannPoint, SystemDescriptor};

pub type PositionFn = dyn Fn(f64) -> (f64, f64) + Send + Sync;
pub type StateFn = dyn Fn(f64) -> PhysicalState + Send + Sync;
pub type InvariantFn = dyn Fn(f64) -> RiemannPoint + Send + Sync;

/// Cauchy data along the curve, either as physical states or directly as
/// invariants (for fixtures posed in invariant space).
#[derive(Clone)]
pub enum CurveData {
    States(Arc<StateFn>),
    Invariants(Arc<InvariantFn>),
}

/// User-facing description of a boundary arc in its own parameter `t`.
#[derive(Clone)]
pub struct CurveSpec {
    pub range: (f64, f64),
    /// Interior parameters where smoothness may fail; data jumps are probed
    /// here and closed with fans.
    pub breakpoints: Vec<f64>,
    pub position: Arc<PositionFn>,
    pub velocity: Arc<PositionFn>,
    pub data: CurveData,
}

#[derive(Clone, Debug)]
enum PieceKind {
    /// Maps solver parameter `s` back to the original parameter
    /// `t = t0 + (s - s0)`.
    Smooth { t0: f64 },
    /// Zero-length fan at a fixed point with linearly interpolated
    /// invariants.
    Fan {
        x: f64,
        y: f64,
        inv0: RiemannPoint,
        inv1: RiemannPoint,
    },
}

#[derive(Clone, Debug)]
struct Piece {
    s0: f64,
    s1: f64,
    kind: PieceKind,
}

/// A compiled boundary curve in the solver parameterization.
#[derive(Clone)]
pub struct BoundaryCurve {
    sys: SystemDescriptor,
    pieces: Vec<Piece>,
    position: Arc<PositionFn>,
    velocity: Arc<PositionFn>,
    data: CurveData,
    s_lo: f64,
    s_hi: f64,
}

/// Invariant jumps larger than this at a breakpoint get a fan inserted.
const JUMP_TOL: f64 = 1e-8;

impl BoundaryCurve {
    /// Compile a curve description for `sys`, probing each breakpoint for
    /// data jumps and inserting fan intervals where they occur.
    pub fn build(sys: &SystemDescriptor, spec: CurveSpec) -> Result<Self> {
        let (t_lo, t_hi) = spec.range;
        if !(t_lo < t_hi) {
            return Err(Error::Curve(format!("empty parameter range [{t_lo}, {t_hi}]")));
        }
        let mut breaks: Vec<f64> = spec
            .breakpoints
            .iter()
            .copied()
            .filter(|t| *t > t_lo && *t < t_hi)
            .collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();

        let inv_at = |t: f64| -> Result<RiemannPoint> {
            match &spec.data {
                CurveData::States(f) => sys.to_invariants(f(t)),
                CurveData::Invariants(f) => Ok(f(t)),
            }
        };
        let eps = 1e-7 * (t_hi - t_lo).abs().max(1.0);
        // one-sided limits by linear extrapolation from two probes
        let side = |t: f64, dir: f64| -> Result<RiemannPoint> {
            let p1 = inv_at(t + dir * eps)?;
            let p2 = inv_at(t + dir * 2.0 * eps)?;
            Ok(RiemannPoint::new(2.0 * p1.r1 - p2.r1, 2.0 * p1.r2 - p2.r2))
        };

        let mut pieces = Vec::new();
        let mut s_cursor = t_lo;
        let mut t_cursor = t_lo;
        for &bk in &breaks {
            let left = side(bk, -1.0).map_err(|e| Error::Curve(format!("at t = {bk}: {e}")))?;
            let right = side(bk, 1.0).map_err(|e| Error::Curve(format!("at t = {bk}: {e}")))?;
            let jump = (left.r1 - right.r1).abs().max((left.r2 - right.r2).abs());
            if jump > JUMP_TOL {
                // smooth piece up to the jump, then the fan
                let len = bk - t_cursor;
                pieces.push(Piece {
                    s0: s_cursor,
                    s1: s_cursor + len,
                    kind: PieceKind::Smooth { t0: t_cursor },
                });
                s_cursor += len;
                let (x, y) = (spec.position)(bk);
                pieces.push(Piece {
                    s0: s_cursor,
                    s1: s_cursor + jump,
                    kind: PieceKind::Fan {
                        x,
                        y,
                        inv0: left,
                        inv1: right,
                    },
                });
                s_cursor += jump;
                t_cursor = bk;
            } else {
                // keep as a plain smooth split point
                let len = bk - t_cursor;
                pieces.push(Piece {
                    s0: s_cursor,
                    s1: s_cursor + len,
                    kind: PieceKind::Smooth { t0: t_cursor },
                });
                s_cursor += len;
                t_cursor = bk;
            }
        }
        let len = t_hi - t_cursor;
        pieces.push(Piece {
            s0: s_cursor,
            s1: s_cursor + len,
            kind: PieceKind::Smooth { t0: t_cursor },
        });
        s_cursor += len;

        Ok(BoundaryCurve {
            sys: sys.clone(),
            pieces,
            position: spec.position,
            velocity: spec.velocity,
            data: spec.data,
            s_lo: t_lo,
            s_hi: s_cursor,
        })
    }

    /// Build a curve from tabulated samples `(tau, x, y, u, v)` with
    /// strictly increasing `tau`, interpolated by natural cubic splines.
    pub fn from_table(sys: &SystemDescriptor, rows: &[TableRow]) -> Result<Self> {
        if rows.len() < 3 {
            return Err(Error::Curve("tabulated boundary needs >= 3 rows".into()));
        }
        for w in rows.windows(2) {
            if w[1].tau <= w[0].tau {
                return Err(Error::Curve(format!(
                    "tabulated tau not strictly increasing at {}",
                    w[1].tau
                )));
            }
        }
        let taus: Vec<f64> = rows.iter().map(|r| r.tau).collect();
        let sx = CubicSpline::natural(&taus, &rows.iter().map(|r| r.x).collect::<Vec<_>>());
        let sy = CubicSpline::natural(&taus, &rows.iter().map(|r| r.y).collect::<Vec<_>>());
        let su = CubicSpline::natural(&taus, &rows.iter().map(|r| r.u).collect::<Vec<_>>());
        let sv = CubicSpline::natural(&taus, &rows.iter().map(|r| r.v).collect::<Vec<_>>());
        let (sx2, sy2) = (sx.clone(), sy.clone());
        let spec = CurveSpec {
            range: (taus[0], *taus.last().unwrap()),
            breakpoints: vec![],
            position: Arc::new(move |t| (sx.eval(t), sy.eval(t))),
            velocity: Arc::new(move |t| (sx2.deriv(t), sy2.deriv(t))),
            data: CurveData::States(Arc::new(move |t| PhysicalState::new(su.eval(t), sv.eval(t)))),
        };
        Self::build(sys, spec)
    }

    pub fn system(&self) -> &SystemDescriptor {
        &self.sys
    }

    /// Parameter range in the solver parameterization (fans included).
    pub fn param_range(&self) -> (f64, f64) {
        (self.s_lo, self.s_hi)
    }

    /// Boundaries of the internal pieces (smooth splits and fan edges).
    pub fn piece_bounds(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.pieces.iter().map(|p| p.s0).collect();
        out.push(self.s_hi);
        out
    }

    fn piece_of(&self, s: f64) -> &Piece {
        let idx = self
            .pieces
            .partition_point(|p| p.s1 < s)
            .min(self.pieces.len() - 1);
        &self.pieces[idx]
    }

    /// Solver parameter corresponding to an original curve parameter
    /// (start-of-fan for parameters at a jump).
    pub fn solver_param(&self, t: f64) -> f64 {
        let mut shift = 0.0;
        for p in &self.pieces {
            match p.kind {
                PieceKind::Smooth { t0 } => {
                    let t1 = t0 + (p.s1 - p.s0);
                    if t <= t1 {
                        return (p.s0 + (t - t0)).clamp(self.s_lo, self.s_hi);
                    }
                }
                PieceKind::Fan { .. } => shift += p.s1 - p.s0,
            }
        }
        let _ = shift;
        self.s_hi
    }

    /// Original curve parameter of a solver parameter (fans collapse to the
    /// jump location).
    pub fn original_param(&self, s: f64) -> f64 {
        match self.piece_of(s).kind {
            PieceKind::Smooth { t0 } => t0 + (s - self.piece_of(s).s0),
            PieceKind::Fan { .. } => {
                // fans sit at a single original parameter: the end of the
                // preceding smooth piece
                let p = self.piece_of(s);
                match self
                    .pieces
                    .iter()
                    .find(|q| (q.s1 - p.s0).abs() < 1e-300 || q.s1 == p.s0)
                {
                    Some(q) => match q.kind {
                        PieceKind::Smooth { t0 } => t0 + (q.s1 - q.s0),
                        PieceKind::Fan { .. } => f64::NAN,
                    },
                    None => f64::NAN,
                }
            }
        }
    }

    pub fn position(&self, s: f64) -> (f64, f64) {
        let p = self.piece_of(s);
        match p.kind {
            PieceKind::Smooth { t0 } => (self.position)(t0 + (s - p.s0)),
            PieceKind::Fan { x, y, .. } => (x, y),
        }
    }

    pub fn velocity(&self, s: f64) -> (f64, f64) {
        let p = self.piece_of(s);
        match p.kind {
            PieceKind::Smooth { t0 } => (self.velocity)(t0 + (s - p.s0)),
            PieceKind::Fan { .. } => (0.0, 0.0),
        }
    }

    pub fn invariants(&self, s: f64) -> Result<RiemannPoint> {
        let p = self.piece_of(s);
        match &p.kind {
            PieceKind::Smooth { t0 } => {
                let t = t0 + (s - p.s0);
                match &self.data {
                    CurveData::States(f) => self.sys.to_invariants(f(t)),
                    CurveData::Invariants(f) => Ok(f(t)),
                }
            }
            PieceKind::Fan { inv0, inv1, .. } => {
                let w = if p.s1 > p.s0 { (s - p.s0) / (p.s1 - p.s0) } else { 0.0 };
                Ok(RiemannPoint::new(
                    inv0.r1 + w * (inv1.r1 - inv0.r1),
                    inv0.r2 + w * (inv1.r2 - inv0.r2),
                ))
            }
        }
    }

    /// Physical state at `s` when the invariants there have a preimage.
    pub fn state(&self, s: f64) -> Result<PhysicalState> {
        let p = self.piece_of(s);
        if let (PieceKind::Smooth { t0 }, CurveData::States(f)) = (&p.kind, &self.data) {
            return Ok(f(t0 + (s - p.s0)));
        }
        self.sys.from_invariants(self.invariants(s)?)
    }

    fn is_fan(&self, s0: f64, s1: f64) -> bool {
        matches!(self.piece_of(0.5 * (s0 + s1)).kind, PieceKind::Fan { .. })
    }
}

/// One row of a tabulated boundary file.
#[derive(Clone, Copy, Debug)]
pub struct TableRow {
    pub tau: f64,
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub v: f64,
}

// ---------------------------------------------------------------------------
// natural cubic spline

#[derive(Clone)]
struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    y2: Vec<f64>,
}

impl CubicSpline {
    fn natural(xs: &[f64], ys: &[f64]) -> Self {
        let n = xs.len();
        let mut y2 = vec![0.0; n];
        let mut u = vec![0.0; n];
        for i in 1..n - 1 {
            let sig = (xs[i] - xs[i - 1]) / (xs[i + 1] - xs[i - 1]);
            let p = sig * y2[i - 1] + 2.0;
            y2[i] = (sig - 1.0) / p;
            let d = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
                - (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
            u[i] = (6.0 * d / (xs[i + 1] - xs[i - 1]) - sig * u[i - 1]) / p;
        }
        for i in (0..n - 1).rev() {
            y2[i] = y2[i] * y2[i + 1] + u[i];
        }
        CubicSpline {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            y2,
        }
    }

    fn segment(&self, x: f64) -> usize {
        self.xs
            .partition_point(|&t| t < x)
            .clamp(1, self.xs.len() - 1)
            - 1
    }

    fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.y2[i] + (b * b * b - b) * self.y2[i + 1]) * h * h / 6.0
    }

    fn deriv(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        (self.ys[i + 1] - self.ys[i]) / h
            + ((3.0 * b * b - 1.0) * self.y2[i + 1] - (3.0 * a * a - 1.0) * self.y2[i]) * h / 6.0
    }
}

// ---------------------------------------------------------------------------
// invariant profiles and parameter lookup

/// Sampled invariant traces along the boundary.
#[derive(Clone)]
pub struct InvariantProfile {
    pub samples: Vec<ProfileSample>,
    pub monotone_r1: bool,
    pub monotone_r2: bool,
    curve: BoundaryCurve,
}

#[derive(Clone, Copy, Debug)]
pub struct ProfileSample {
    pub tau: f64,
    pub r1: f64,
    pub r2: f64,
}

/// Sample the boundary invariants at `n` parameters plus all piece bounds.
pub fn profile_boundary(curve: &BoundaryCurve, n: usize) -> Result<InvariantProfile> {
    if n < 2 {
        return Err(Error::Domain {
            what: "profile_boundary",
            why: format!("need n >= 2 samples, got {n}"),
        });
    }
    let (a, b) = curve.param_range();
    let mut taus: Vec<f64> = (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect();
    taus.extend(curve.piece_bounds());
    taus.sort_by(f64::total_cmp);
    taus.dedup_by(|x, y| (*x - *y).abs() < 1e-13 * (b - a).abs());
    let mut samples = Vec::with_capacity(taus.len());
    for &tau in &taus {
        let inv = curve
            .invariants(tau)
            .map_err(|e| Error::Domain {
                what: "profile_boundary",
                why: format!("inadmissible data at tau = {tau}: {e}"),
            })?;
        samples.push(ProfileSample {
            tau,
            r1: inv.r1,
            r2: inv.r2,
        });
    }
    let monotone = |get: &dyn Fn(&ProfileSample) -> f64| -> bool {
        let mut up = false;
        let mut down = false;
        for w in samples.windows(2) {
            let d = get(&w[1]) - get(&w[0]);
            if d > 0.0 {
                up = true;
            } else if d < 0.0 {
                down = true;
            }
        }
        (up || down) && !(up && down)
    };
    Ok(InvariantProfile {
        monotone_r1: monotone(&|s| s.r1),
        monotone_r2: monotone(&|s| s.r2),
        samples,
        curve: curve.clone(),
    })
}

/// Result of [`locate_parameters`]: the parameter pair addressing a base
/// point, with multiplicity flags for targets attained on whole intervals.
#[derive(Clone, Copy, Debug)]
pub struct LocatedParams {
    pub tau_p: f64,
    pub tau_q: f64,
    pub p_on_interval: bool,
    pub q_on_interval: bool,
}

/// Invert the boundary profile: find `tau_q` with `r1(tau_q) = r1_0` and
/// `tau_p` with `r2(tau_p) = r2_0`. Isolated roots are bisection-refined to
/// 1e-10; a target attained on a constant segment returns the segment
/// midpoint with a multiplicity flag; several isolated roots are an error
/// listing all of them.
pub fn locate_parameters(profile: &InvariantProfile, base: BasePoint) -> Result<LocatedParams> {
    let (tau_q, q_on_interval) = locate_one(profile, base.r1_0, true, "r1 target")?;
    let (tau_p, p_on_interval) = locate_one(profile, base.r2_0, false, "r2 target")?;
    Ok(LocatedParams {
        tau_p,
        tau_q,
        p_on_interval,
        q_on_interval,
    })
}

fn locate_one(
    profile: &InvariantProfile,
    target: f64,
    first: bool,
    what: &'static str,
) -> Result<(f64, bool)> {
    let value = |s: &ProfileSample| if first { s.r1 } else { s.r2 };
    let eval = |tau: f64| -> f64 {
        profile
            .curve
            .invariants(tau)
            .map(|p| if first { p.r1 } else { p.r2 })
            .unwrap_or(f64::NAN)
    };
    let tol = 1e-10;
    let samples = &profile.samples;
    #[derive(Clone, Copy)]
    struct Root {
        tau: f64,
        interval: bool,
    }
    let mut roots: Vec<Root> = Vec::new();
    let span = samples.last().unwrap().tau - samples[0].tau;
    let push = |tau: f64, interval: bool, roots: &mut Vec<Root>| {
        if roots
            .iter()
            .all(|r| (r.tau - tau).abs() > 1e-8 * span.max(1.0) || r.interval != interval)
        {
            roots.push(Root { tau, interval });
        }
    };
    // constant runs hitting the target
    let mut i = 0;
    while i < samples.len() {
        if (value(&samples[i]) - target).abs() <= tol {
            let start = i;
            while i + 1 < samples.len() && (value(&samples[i + 1]) - target).abs() <= tol {
                i += 1;
            }
            if i > start {
                let mid = 0.5 * (samples[start].tau + samples[i].tau);
                push(mid, true, &mut roots);
            } else {
                push(samples[start].tau, false, &mut roots);
            }
        }
        i += 1;
    }
    // sign changes between samples
    for w in samples.windows(2) {
        let g0 = value(&w[0]) - target;
        let g1 = value(&w[1]) - target;
        if g0.abs() <= tol || g1.abs() <= tol {
            continue; // covered above
        }
        if g0 * g1 < 0.0 {
            let mut lo = w[0].tau;
            let mut hi = w[1].tau;
            let mut glo = g0;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let gm = eval(mid) - target;
                if gm.abs() <= tol {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if glo * gm <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gm;
                }
            }
            push(0.5 * (lo + hi), false, &mut roots);
        }
    }
    match roots.len() {
        0 => Err(Error::NotAttained(format!(
            "{what} {target} not attained on the profile"
        ))),
        1 => Ok((roots[0].tau, roots[0].interval)),
        _ => Err(Error::Ambiguous {
            what,
            roots: roots.iter().map(|r| r.tau).collect(),
        }),
    }
}

// ---------------------------------------------------------------------------
// the point solver

/// Tolerances and guards of the solver.
#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Absolute tolerance of the arc integrals.
    pub quad_tol: f64,
    /// Absolute tolerance of the inner kernel integrals.
    pub kernel_tol: f64,
    /// Minimum angular separation between the boundary tangent and either
    /// characteristic direction.
    pub margin: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            quad_tol: 1e-9,
            kernel_tol: 1e-10,
            margin: 1e-6,
        }
    }
}

/// A solved characteristic intersection point.
#[derive(Clone, Copy, Debug)]
pub struct SolvedPoint {
    pub x: f64,
    pub y: f64,
    pub r1: f64,
    pub r2: f64,
    /// Physical state of the invariants; NaN components when the invariant
    /// pair has no preimage (possible for invariant-space fixtures).
    pub state: PhysicalState,
    pub tau_p: f64,
    pub tau_q: f64,
}

type PairEval<'a> = dyn Fn(ProblemKind, RiemannPoint, BasePoint) -> Result<ConservationPair> + 'a;

/// Solve for the intersection point of the `r1`-characteristic through
/// `tau_q` and the `r2`-characteristic through `tau_p`.
pub fn solve_point(
    sys: &SystemDescriptor,
    curve: &BoundaryCurve,
    tau_p: f64,
    tau_q: f64,
    opts: &SolverOptions,
) -> Result<SolvedPoint> {
    let eval: &PairEval = &|kind, pt, base| pair_with_tol(sys, kind, pt, base, opts.kernel_tol);
    solve_point_with_pairs(sys, curve, tau_p, tau_q, opts, eval)
}

pub(crate) fn solve_point_with_pairs(
    sys: &SystemDescriptor,
    curve: &BoundaryCurve,
    tau_p: f64,
    tau_q: f64,
    opts: &SolverOptions,
    pair_eval: &PairEval,
) -> Result<SolvedPoint> {
    let (a, b) = curve.param_range();
    let slack = 1e-12 * (b - a).abs().max(1.0);
    if !(tau_p >= a - slack && tau_q <= b + slack && tau_p <= tau_q) {
        return Err(Error::Domain {
            what: "solve_point",
            why: format!("need {a} <= tau_p <= tau_q <= {b}, got ({tau_p}, {tau_q})"),
        });
    }
    let base = {
        let at_q = curve.invariants(tau_q)?;
        let at_p = curve.invariants(tau_p)?;
        BasePoint::new(at_q.r1, at_p.r2)
    };
    // split the arc at piece bounds
    let mut cuts: Vec<f64> = vec![tau_p];
    for s in curve.piece_bounds() {
        if s > tau_p + slack && s < tau_q - slack {
            cuts.push(s);
        }
    }
    cuts.push(tau_q);
    let smooth_segments: Vec<(f64, f64)> = cuts
        .windows(2)
        .map(|w| (w[0], w[1]))
        .filter(|(s0, s1)| s1 > s0 && !curve.is_fan(*s0, *s1))
        .collect();
    check_margin(sys, curve, &smooth_segments, opts.margin)?;

    let (xq, yq) = curve.position(tau_q);
    if smooth_segments.is_empty() {
        let state = state_or_nan(sys, base);
        return Ok(SolvedPoint {
            x: xq,
            y: yq,
            r1: base.r1_0,
            r2: base.r2_0,
            state,
            tau_p,
            tau_q,
        });
    }

    let seg_tol = opts.quad_tol / smooth_segments.len() as f64;
    let mut integrals = [0.0f64; 2];
    for (idx, kind) in [ProblemKind::XProblem, ProblemKind::YProblem].into_iter().enumerate() {
        let first_err: Cell<Option<Error>> = Cell::new(None);
        let mut total = 0.0;
        for &(s0, s1) in &smooth_segments {
            let integrand = |s: f64| -> f64 {
                let inv = match curve.invariants(s) {
                    Ok(v) => v,
                    Err(e) => {
                        if first_err.take().is_none() {
                            first_err.set(Some(e));
                        }
                        return f64::NAN;
                    }
                };
                let p = match pair_eval(kind, inv, base) {
                    Ok(v) => v,
                    Err(e) => {
                        if first_err.take().is_none() {
                            first_err.set(Some(e));
                        }
                        return f64::NAN;
                    }
                };
                let (vx, vy) = curve.velocity(s);
                p.psi * vx - p.phi * vy
            };
            match adaptive_quad(integrand, s0, s1, seg_tol) {
                Ok(r) => total += r.value,
                Err(e) => return Err(first_err.take().unwrap_or(e)),
            }
            if let Some(e) = first_err.take() {
                return Err(e);
            }
        }
        integrals[idx] = total;
    }

    let state = state_or_nan(sys, base);
    Ok(SolvedPoint {
        x: xq - integrals[0],
        y: yq - integrals[1],
        r1: base.r1_0,
        r2: base.r2_0,
        state,
        tau_p,
        tau_q,
    })
}

fn state_or_nan(sys: &SystemDescriptor, base: BasePoint) -> PhysicalState {
    sys.from_invariants(base.as_point())
        .unwrap_or(PhysicalState::new(f64::NAN, f64::NAN))
}

fn check_margin(
    sys: &SystemDescriptor,
    curve: &BoundaryCurve,
    segments: &[(f64, f64)],
    margin: f64,
) -> Result<()> {
    for &(s0, s1) in segments {
        for k in 0..9 {
            let s = s0 + (s1 - s0) * (k as f64 + 0.5) / 9.0;
            let (vx, vy) = curve.velocity(s);
            let speed = vx.hypot(vy);
            if speed == 0.0 {
                continue;
            }
            let inv = curve.invariants(s)?;
            for lambda in [sys.lambda1(inv), sys.lambda2(inv)] {
                let dist = if lambda.is_finite() {
                    (vy - lambda * vx).abs() / (speed * lambda.hypot(1.0))
                } else {
                    vx.abs() / speed
                };
                if dist <= margin {
                    return Err(Error::Curve(format!(
                        "characteristic tangency at tau = {s}: |sin| = {dist:e} <= margin {margin:e}"
                    )));
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// field assembly

/// Record of one failed grid vertex.
#[derive(Clone, Debug)]
pub struct VertexError {
    pub i_p: usize,
    pub j_q: usize,
    pub tau_p: f64,
    pub tau_q: f64,
    pub message: String,
}

/// Two families of characteristic polylines over a `(tau_p, tau_q)` grid.
///
/// Family 1 fixes `tau_q` (constant `r1`), family 2 fixes `tau_p`
/// (constant `r2`). Failed vertices are gaps (`None`), never fabricated.
#[derive(Clone, Debug)]
pub struct CharacteristicField {
    pub tau_p: Vec<f64>,
    pub tau_q: Vec<f64>,
    grid: Vec<Option<SolvedPoint>>,
    pub errors: Vec<VertexError>,
    /// Grid cells whose quadrilateral orientation flips: a fold-over of the
    /// characteristic net (no continuation is attempted there).
    pub foldover: Vec<(usize, usize)>,
    /// Sampled boundary positions for plotting.
    pub boundary: Vec<(f64, f64)>,
}

impl CharacteristicField {
    fn cell_valid(&self, i: usize, j: usize) -> bool {
        self.tau_p[i] <= self.tau_q[j]
    }

    pub fn vertex(&self, i: usize, j: usize) -> Option<&SolvedPoint> {
        if !self.cell_valid(i, j) {
            return None;
        }
        self.grid[i * self.tau_q.len() + j].as_ref()
    }

    /// Vertices of the family-1 polyline launched from `tau_q[j]`, ordered
    /// by increasing `tau_p` (ends at the boundary when `tau_p = tau_q`).
    pub fn family1(&self, j: usize) -> Vec<Option<&SolvedPoint>> {
        (0..self.tau_p.len())
            .filter(|&i| self.cell_valid(i, j))
            .map(|i| self.grid[i * self.tau_q.len() + j].as_ref())
            .collect()
    }

    /// Vertices of the family-2 polyline launched from `tau_p[i]`, ordered
    /// by increasing `tau_q`.
    pub fn family2(&self, i: usize) -> Vec<Option<&SolvedPoint>> {
        (0..self.tau_q.len())
            .filter(|&j| self.cell_valid(i, j))
            .map(|j| self.grid[i * self.tau_q.len() + j].as_ref())
            .collect()
    }

    pub fn curve_counts(&self) -> (usize, usize) {
        (self.tau_q.len(), self.tau_p.len())
    }

    pub fn solved_count(&self) -> usize {
        self.grid.iter().filter(|v| v.is_some()).count()
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Solve the field on an `n1 x n2` parameter grid (family-1 curves at `n1`
/// launch values of `tau_q`, family-2 at `n2` values of `tau_p`).
pub fn build_field(
    sys: &SystemDescriptor,
    curve: &BoundaryCurve,
    n1: usize,
    n2: usize,
    opts: &SolverOptions,
) -> Result<CharacteristicField> {
    if n1 < 2 || n2 < 2 {
        return Err(Error::Domain {
            what: "build_field",
            why: format!("grid sizes must be >= 2, got ({n1}, {n2})"),
        });
    }
    let (a, b) = curve.param_range();
    build_field_at(sys, curve, &linspace(a, b, n2), &linspace(a, b, n1), opts)
}

/// [`build_field`] with explicit parameter grids; vertices are evaluated
/// concurrently but the result is grid-ordered and deterministic.
pub fn build_field_at(
    sys: &SystemDescriptor,
    curve: &BoundaryCurve,
    tau_p: &[f64],
    tau_q: &[f64],
    opts: &SolverOptions,
) -> Result<CharacteristicField> {
    let np = tau_p.len();
    let nq = tau_q.len();
    let cells: Vec<(usize, usize)> = (0..np)
        .flat_map(|i| (0..nq).map(move |j| (i, j)))
        .filter(|&(i, j)| tau_p[i] <= tau_q[j])
        .collect();
    let solved: Vec<(usize, usize, Result<SolvedPoint>)> = cells
        .par_iter()
        .map(|&(i, j)| (i, j, solve_point(sys, curve, tau_p[i], tau_q[j], opts)))
        .collect();
    let mut grid: Vec<Option<SolvedPoint>> = vec![None; np * nq];
    let mut errors = Vec::new();
    for (i, j, res) in solved {
        match res {
            Ok(pt) => grid[i * nq + j] = Some(pt),
            Err(e) => errors.push(VertexError {
                i_p: i,
                j_q: j,
                tau_p: tau_p[i],
                tau_q: tau_q[j],
                message: e.to_string(),
            }),
        }
    }
    let mut boundary = Vec::with_capacity(257);
    let (a, b) = curve.param_range();
    for s in linspace(a, b, 257) {
        boundary.push(curve.position(s));
    }
    let mut field = CharacteristicField {
        tau_p: tau_p.to_vec(),
        tau_q: tau_q.to_vec(),
        grid,
        errors,
        foldover: Vec::new(),
        boundary,
    };
    field.foldover = detect_foldover(&field);
    Ok(field)
}

fn detect_foldover(field: &CharacteristicField) -> Vec<(usize, usize)> {
    let mut signs: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..field.tau_p.len().saturating_sub(1) {
        for j in 0..field.tau_q.len().saturating_sub(1) {
            let q = [
                field.vertex(i, j),
                field.vertex(i + 1, j),
                field.vertex(i, j + 1),
            ];
            if let [Some(p00), Some(p10), Some(p01)] = q {
                let cross = (p10.x - p00.x) * (p01.y - p00.y) - (p10.y - p00.y) * (p01.x - p00.x);
                if cross != 0.0 {
                    signs.push((i, j, cross));
                }
            }
        }
    }
    let pos = signs.iter().filter(|s| s.2 > 0.0).count();
    let neg = signs.len() - pos;
    let dominant = if pos >= neg { 1.0 } else { -1.0 };
    signs
        .into_iter()
        .filter(|s| s.2 * dominant < 0.0)
        .map(|s| (s.0, s.1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs::pair;

    fn gas_linear_curve() -> (SystemDescriptor, BoundaryCurve) {
        let sys = SystemDescriptor::gas(2.0).unwrap();
        let spec = CurveSpec {
            range: (0.0, 1.0),
            breakpoints: vec![],
            position: Arc::new(|t| (t, 0.0)),
            velocity: Arc::new(|_| (1.0, 0.0)),
            data: CurveData::Invariants(Arc::new(|t| RiemannPoint::new(t / 4.0, 1.0 + t / 4.0))),
        };
        let curve = BoundaryCurve::build(&sys, spec).unwrap();
        (sys, curve)
    }

    fn bi_linear_curve() -> (SystemDescriptor, BoundaryCurve) {
        let sys = SystemDescriptor::born_infeld();
        let spec = CurveSpec {
            range: (0.0, 1.0),
            breakpoints: vec![],
            position: Arc::new(|t| (t, 0.0)),
            velocity: Arc::new(|_| (1.0, 0.0)),
            data: CurveData::Invariants(Arc::new(|t| RiemannPoint::new(1.0 + t, t))),
        };
        let curve = BoundaryCurve::build(&sys, spec).unwrap();
        (sys, curve)
    }

    fn constant_plasticity_curve(theta: f64) -> (SystemDescriptor, BoundaryCurve) {
        let sys = SystemDescriptor::plasticity(0.5).unwrap();
        let spec = CurveSpec {
            range: (0.0, 1.0),
            breakpoints: vec![],
            position: Arc::new(|t| (t, 0.2 * t)),
            velocity: Arc::new(|_| (1.0, 0.2)),
            data: CurveData::States(Arc::new(move |_| PhysicalState::new(-1.0, theta))),
        };
        let curve = BoundaryCurve::build(&sys, spec).unwrap();
        (sys, curve)
    }

    #[test]
    fn endpoint_degeneracy_returns_boundary_point() {
        let (sys, curve) = gas_linear_curve();
        let opts = SolverOptions::default();
        for &tau in &[0.0, 0.3, 0.77, 1.0] {
            let pt = solve_point(&sys, &curve, tau, tau, &opts).unwrap();
            let (x, y) = curve.position(tau);
            assert!((pt.x - x).abs() < 1e-9 && (pt.y - y).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_state_matches_two_line_intersection() {
        let theta = 0.6;
        let (sys, curve) = constant_plasticity_curve(theta);
        let opts = SolverOptions::default();
        let (tau_p, tau_q) = (0.2, 0.9);
        let got = solve_point(&sys, &curve, tau_p, tau_q, &opts).unwrap();
        let inv = curve.invariants(0.5).unwrap();
        let (l1, l2) = sys.eigenvalues(inv).unwrap();
        let (xq, yq) = curve.position(tau_q);
        let (xp, yp) = curve.position(tau_p);
        let mx = (yp - yq + l1 * xq - l2 * xp) / (l1 - l2);
        let my = yq + l1 * (mx - xq);
        assert!((got.x - mx).abs() < 1e-8, "{} vs {mx}", got.x);
        assert!((got.y - my).abs() < 1e-8, "{} vs {my}", got.y);
    }

    #[test]
    fn born_infeld_solved_against_hand_integral() {
        // phi = 1, psi = 1 + tau for the x-problem; phi = tau,
        // psi = tau (1 + tau) for the y-problem
        let (sys, curve) = bi_linear_curve();
        let opts = SolverOptions::default();
        for (tau_p, tau_q) in [(0.2, 0.8), (0.05, 0.95), (0.5, 0.6)] {
            let got = solve_point(&sys, &curve, tau_p, tau_q, &opts).unwrap();
            let prim_x = |t: f64| t + 0.5 * t * t;
            let prim_y = |t: f64| 0.5 * t * t + t * t * t / 3.0;
            let mx = tau_q - (prim_x(tau_q) - prim_x(tau_p));
            let my = 0.0 - (prim_y(tau_q) - prim_y(tau_p));
            assert!((got.x - mx).abs() < 1e-9, "{} vs {mx}", got.x);
            assert!((got.y - my).abs() < 1e-9, "{} vs {my}", got.y);
        }
    }

    #[test]
    fn x_solution_ignores_y_pair_corruption() {
        let (sys, curve) = gas_linear_curve();
        let opts = SolverOptions::default();
        let clean = solve_point(&sys, &curve, 0.2, 0.8, &opts).unwrap();
        let corrupt: &PairEval = &|kind, pt, base| {
            let mut p = pair(&sys, kind, pt, base)?;
            if kind == ProblemKind::YProblem {
                p.phi += 17.0;
                p.psi -= 4.0;
            }
            Ok(p)
        };
        let dirty = solve_point_with_pairs(&sys, &curve, 0.2, 0.8, &opts, corrupt).unwrap();
        assert_eq!(clean.x.to_bits(), dirty.x.to_bits());
        assert_ne!(clean.y.to_bits(), dirty.y.to_bits());
    }

    #[test]
    fn profile_monotonicity_flags() {
        let (_, curve) = gas_linear_curve();
        let profile = profile_boundary(&curve, 33).unwrap();
        assert!(profile.monotone_r1 && profile.monotone_r2);
        let (_, curve) = constant_plasticity_curve(0.3);
        let profile = profile_boundary(&curve, 33).unwrap();
        assert!(!profile.monotone_r1 && !profile.monotone_r2);
    }

    #[test]
    fn locate_parameters_cases() {
        let (_, curve) = gas_linear_curve();
        let profile = profile_boundary(&curve, 65).unwrap();
        // r1(tau) = tau/4, r2(tau) = 1 + tau/4
        let loc = locate_parameters(&profile, BasePoint::new(0.075, 1.05)).unwrap();
        assert!((loc.tau_q - 0.3).abs() < 1e-9);
        assert!((loc.tau_p - 0.2).abs() < 1e-9);
        assert!(!loc.p_on_interval && !loc.q_on_interval);
        // endpoints
        let loc = locate_parameters(&profile, BasePoint::new(0.25, 1.0)).unwrap();
        assert!((loc.tau_q - 1.0).abs() < 1e-9 && loc.tau_p.abs() < 1e-9);
        // unattained
        assert!(matches!(
            locate_parameters(&profile, BasePoint::new(9.0, 1.05)),
            Err(Error::NotAttained(_))
        ));
        // constant segment: plasticity constant data maps to one invariant point
        let (_, curve) = constant_plasticity_curve(0.3);
        let profile = profile_boundary(&curve, 17).unwrap();
        let inv = curve.invariants(0.5).unwrap();
        let loc = locate_parameters(&profile, BasePoint::new(inv.r1, inv.r2)).unwrap();
        assert!(loc.p_on_interval && loc.q_on_interval);
        assert!((loc.tau_p - 0.5).abs() < 1e-9 && (loc.tau_q - 0.5).abs() < 1e-9);
    }

    #[test]
    fn locate_parameters_ambiguous_on_wiggle() {
        let sys = SystemDescriptor::gas(2.0).unwrap();
        let spec = CurveSpec {
            range: (0.0, 1.0),
            breakpoints: vec![],
            position: Arc::new(|t| (t, 0.0)),
            velocity: Arc::new(|_| (1.0, 0.0)),
            data: CurveData::Invariants(Arc::new(|t| {
                RiemannPoint::new(0.2 * (3.0 * std::f64::consts::PI * t).sin(), 2.0 + t)
            })),
        };
        let curve = BoundaryCurve::build(&sys, spec).unwrap();
        let profile = profile_boundary(&curve, 129).unwrap();
        match locate_parameters(&profile, BasePoint::new(0.1, 2.5)) {
            Err(Error::Ambiguous { roots, .. }) => assert!(roots.len() >= 2),
            other => panic!("expected ambiguity, got {other:?}"),
        }
    }

    #[test]
    fn fan_insertion_reparameterizes_and_solves() {
        // plasticity data with a theta jump at t = 0.5
        let sys = SystemDescriptor::plasticity(0.5).unwrap();
        let spec = CurveSpec {
            range: (0.0, 1.0),
            breakpoints: vec![0.5],
            position: Arc::new(|t| (t, 0.0)),
            velocity: Arc::new(|_| (1.0, 0.0)),
            data: CurveData::States(Arc::new(|t| {
                let theta = if t < 0.5 { 0.7 } else { 1.0 };
                PhysicalState::new(-1.0, theta)
            })),
        };
        let curve = BoundaryCurve::build(&sys, spec).unwrap();
        let (a, b) = curve.param_range();
        assert!((a - 0.0).abs() < 1e-12);
        // jump of 0.3 in theta means 0.3 in each invariant
        assert!((b - 1.3).abs() < 1e-6, "range end {b}");
        // fan has frozen position and interpolated invariants
        let s_fan = 0.5 + 0.15;
        assert_eq!(curve.position(s_fan), (0.5, 0.0));
        assert_eq!(curve.velocity(s_fan), (0.0, 0.0));
        let mid = curve.invariants(s_fan).unwrap();
        let left = curve.invariants(0.49).unwrap();
        let right = curve.invariants(0.85).unwrap();
        assert!(mid.r1 < left.r1.max(right.r1) && mid.r1 > left.r1.min(right.r1));
        // solving across the fan works and is finite
        let opts = SolverOptions::default();
        let pt = solve_point(&sys, &curve, 0.2, 1.1, &opts).unwrap();
        assert!(pt.x.is_finite() && pt.y.is_finite());
        // original-parameter bookkeeping
        assert!((curve.solver_param(0.75) - 1.05).abs() < 1e-9);
        assert!((curve.original_param(1.05) - 0.75).abs() < 1e-9);
    }

    #[test]
    fn field_deterministic_and_nested_under_refinement() {
        let (sys, curve) = gas_linear_curve();
        let opts = SolverOptions::default();
        let f1 = build_field(&sys, &curve, 5, 5, &opts).unwrap();
        let f2 = build_field(&sys, &curve, 5, 5, &opts).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                match (f1.vertex(i, j), f2.vertex(i, j)) {
                    (Some(a), Some(b)) => {
                        assert_eq!(a.x.to_bits(), b.x.to_bits());
                        assert_eq!(a.y.to_bits(), b.y.to_bits());
                    }
                    (None, None) => {}
                    _ => panic!("determinism violated at ({i}, {j})"),
                }
            }
        }
        // halving the spacing keeps shared vertices bit-identical
        let fine = build_field(&sys, &curve, 9, 9, &opts).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                if let (Some(a), Some(b)) = (f1.vertex(i, j), fine.vertex(2 * i, 2 * j)) {
                    assert_eq!(a.x.to_bits(), b.x.to_bits());
                    assert_eq!(a.y.to_bits(), b.y.to_bits());
                }
            }
        }
        assert!(f1.errors.is_empty());
    }

    #[test]
    fn constant_data_family1_is_straight() {
        let (sys, curve) = constant_plasticity_curve(0.6);
        let opts = SolverOptions::default();
        let field = build_field(&sys, &curve, 9, 9, &opts).unwrap();
        for j in 1..9 {
            let pts: Vec<&SolvedPoint> = field.family1(j).into_iter().flatten().collect();
            if pts.len() < 3 {
                continue;
            }
            let (x0, y0) = (pts[0].x, pts[0].y);
            let (x1, y1) = (pts[pts.len() - 1].x, pts[pts.len() - 1].y);
            let len = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
            for p in &pts[1..pts.len() - 1] {
                let dev = ((p.x - x0) * (y1 - y0) - (p.y - y0) * (x1 - x0)).abs() / len;
                assert!(dev <= 1e-6 * len, "family-1 curve {j}: deviation {dev}");
            }
        }
    }

    #[test]
    fn tangent_characteristic_rejected_by_margin() {
        // gas data tuned so lambda1 crosses the (horizontal) tangent slope
        let sys = SystemDescriptor::gas(2.0).unwrap();
        let spec = CurveSpec {
            range: (-0.5, 0.5),
            breakpoints: vec![],
            position: Arc::new(|t| (t, 0.0)),
            velocity: Arc::new(|_| (1.0, 0.0)),
            data: CurveData::Invariants(Arc::new(|t| RiemannPoint::new(t - 0.5, 1.5 + t))),
        };
        let curve = BoundaryCurve::build(&sys, spec).unwrap();
        // lambda1 = 0.75 (t - 0.5) + 0.25 (1.5 + t) = t - 0.375 + 0.375 = t
        let opts = SolverOptions::default();
        match solve_point(&sys, &curve, -0.3, 0.3, &opts) {
            Err(Error::Curve(msg)) => assert!(msg.contains("tangency"), "{msg}"),
            other => panic!("expected tangency rejection, got {other:?}"),
        }
    }

    #[test]
    fn family1_secant_slopes_approach_lambda1_under_refinement() {
        // along a family-1 polyline the secant slope between adjacent
        // vertices approximates lambda1 at the shared r1 and the midpoint
        // r2; the error drops roughly first order in the grid spacing
        let (sys, curve) = gas_linear_curve();
        let opts = SolverOptions::default();
        let worst = |n: usize| -> f64 {
            let field = build_field(&sys, &curve, n, n, &opts).unwrap();
            let mut w = 0.0f64;
            for j in 0..n {
                let pts: Vec<&SolvedPoint> = field.family1(j).into_iter().flatten().collect();
                for pair in pts.windows(2) {
                    let (a, b) = (pair[0], pair[1]);
                    if (b.x - a.x).abs() < 1e-12 {
                        continue;
                    }
                    let secant = (b.y - a.y) / (b.x - a.x);
                    let mid = RiemannPoint::new(a.r1, 0.5 * (a.r2 + b.r2));
                    w = w.max((secant - sys.lambda1(mid)).abs());
                }
            }
            w
        };
        let coarse = worst(6);
        let fine = worst(11); // halved spacing, shared nodes
        assert!(fine < 0.7 * coarse, "coarse {coarse}, fine {fine}");
        assert!(coarse < 0.05, "secant error unexpectedly large: {coarse}");
    }

    #[test]
    fn tabulated_curve_matches_closure_curve() {
        let sys = SystemDescriptor::gas(2.0).unwrap();
        let rows: Vec<TableRow> = (0..=64)
            .map(|i| {
                let t = i as f64 / 64.0;
                TableRow {
                    tau: t,
                    x: t,
                    y: 0.0,
                    u: t / 4.0,
                    v: 1.0 + t / 4.0,
                }
            })
            .collect();
        let tab = BoundaryCurve::from_table(&sys, &rows).unwrap();
        let (_, closed) = gas_linear_curve();
        let opts = SolverOptions::default();
        let a = solve_point(&sys, &tab, 0.25, 0.75, &opts).unwrap();
        let b = solve_point(&sys, &closed, 0.25, 0.75, &opts).unwrap();
        assert!((a.x - b.x).abs() < 1e-6 && (a.y - b.y).abs() < 1e-6);
    }

    #[test]
    fn spline_reproduces_cubic_exactly_inside() {
        let xs: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 2.0 * x + 1.0).collect();
        let sp = CubicSpline::natural(&xs, &ys);
        for &x in &[0.05, 0.31, 0.77] {
            assert!((sp.eval(x) - (2.0 * x + 1.0)).abs() < 1e-12);
            assert!((sp.deriv(x) - 2.0).abs() < 1e-10);
        }
    }
}
