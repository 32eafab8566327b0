//! Three-zone piecewise systems: assembly, event-localized integration,
//! crossing classification, and full trajectories.

use crate::field::{poly_eval, HolomorphicField};
use crate::geometry::{BoundaryId, PartitionConfig, ZoneTag};
use crate::ode::Dopri5;
use num_complex::Complex64;
use std::cell::Cell;
use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

/// Accuracy target for localized boundary events: |g(z)| at an event point.
pub const EVENT_TOL: f64 = 1e-9;

/// Relative denominator margin below which the integrator reports a pole approach.
pub const POLE_MARGIN: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SystemError {
    #[error("trajectory approached a field pole near {0}")]
    PoleApproach(Complex64),
    #[error("integration exceeded the time budget")]
    Timeout,
    #[error("tangency encountered at {0}")]
    TangencyEncountered(Complex64),
    #[error("sliding region encountered at {0}")]
    SlidingEncountered(Complex64),
    #[error("start point {0} is at the circles' tangency point")]
    StartAtTangency(Complex64),
    #[error("zone {0:?} has no field")]
    MissingZone(ZoneTag),
}

/// Per-zone polynomial perturbation, scaled by a common epsilon.
#[derive(Debug, Clone, Default)]
pub struct Perturbation {
    pub epsilon: f64,
    /// Ascending complex coefficients per zone.
    pub polys: HashMap<Zone, Vec<Complex64>>,
}

/// Interior zone key (boundary tags are not valid keys).
pub type Zone = crate::geometry::ZoneKey;

/// A piecewise holomorphic system on one of the three partitions.
#[derive(Debug, Clone)]
pub struct PiecewiseSystem {
    pub config: PartitionConfig,
    plus: HolomorphicField,
    central: HolomorphicField,
    minus: HolomorphicField,
    pub perturbation: Option<Perturbation>,
}

impl PiecewiseSystem {
    pub fn new(
        config: PartitionConfig,
        plus: HolomorphicField,
        central: HolomorphicField,
        minus: HolomorphicField,
    ) -> Self {
        PiecewiseSystem { config, plus, central, minus, perturbation: None }
    }

    pub fn with_perturbation(mut self, p: Perturbation) -> Self {
        assert!(p.epsilon >= 0.0, "epsilon must be nonnegative");
        self.perturbation = Some(p);
        self
    }

    pub fn field(&self, zone: Zone) -> &HolomorphicField {
        match zone {
            Zone::Plus => &self.plus,
            Zone::Central => &self.central,
            Zone::Minus => &self.minus,
        }
    }

    /// Full right-hand side (zone field plus scaled perturbation).
    pub fn rhs(&self, zone: Zone, z: Complex64) -> Result<Complex64, SystemError> {
        let f = self.field(zone);
        if poly_eval(&f.denominator, z).norm() < POLE_MARGIN {
            return Err(SystemError::PoleApproach(z));
        }
        let mut v = f.eval(z).map_err(|_| SystemError::PoleApproach(z))?;
        if let Some(p) = &self.perturbation {
            if let Some(poly) = p.polys.get(&zone) {
                v += p.epsilon * poly_eval(poly, z);
            }
        }
        Ok(v)
    }
}

/// A recorded boundary crossing (or terminal boundary touch).
#[derive(Debug, Clone, Copy)]
pub struct Event {
    pub t: f64,
    pub z: Complex64,
    pub boundary: BoundaryId,
    pub from_zone: Zone,
    pub to_zone: Zone,
}

#[derive(Debug, Clone)]
pub struct Segment {
    pub zone: Zone,
    pub samples: Vec<(f64, Complex64)>,
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub segments: Vec<Segment>,
    pub events: Vec<Event>,
}

impl Trajectory {
    pub fn start(&self) -> Option<Complex64> {
        self.segments.first().and_then(|s| s.samples.first()).map(|&(_, z)| z)
    }

    pub fn end(&self) -> Option<Complex64> {
        self.segments.last().and_then(|s| s.samples.last()).map(|&(_, z)| z)
    }

    /// CSV with columns t, re, im, zone, event_flag.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,re,im,zone,event_flag\n");
        let mut events = self.events.iter().peekable();
        for seg in &self.segments {
            let zone = match seg.zone {
                Zone::Plus => "plus",
                Zone::Central => "central",
                Zone::Minus => "minus",
            };
            for &(t, z) in &seg.samples {
                let mut flag = 0;
                if let Some(e) = events.peek() {
                    if (e.t - t).abs() < 1e-15 && (e.z - z).norm() < 1e-12 {
                        flag = 1;
                        events.next();
                    }
                }
                let _ = writeln!(out, "{},{},{},{},{}", t, z.re, z.im, zone, flag);
            }
        }
        out
    }
}

/// How a `flow` call ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    ReachedMaxTime,
    ReachedMaxCrossings,
}

#[derive(Debug, Clone, Copy)]
pub enum StopCondition {
    MaxTime(f64),
    MaxCrossings(usize),
}

/// Outcome of integrating inside one zone.
#[derive(Debug, Clone)]
pub enum ZoneExit {
    Boundary { t: f64, z: Complex64, boundary: BoundaryId },
    TimeLimit { t: f64, z: Complex64 },
}

/// Crossing classification at a boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingType {
    Transversal,
    Tangency,
    SlidingRegion,
}

fn boundary_normal_component(
    config: &PartitionConfig,
    boundary: BoundaryId,
    z: Complex64,
    v: Complex64,
) -> f64 {
    match config.circle(boundary) {
        // strip: the event functions Im z ∓ 1 share the same gradient
        None => v.im,
        Some((center, _)) => {
            let d = z - center;
            (v * d.conj()).re / d.norm()
        }
    }
}

/// Classify the contact at a boundary point: both adjacent full fields
/// pushing to the same side is a transversal crossing.
pub fn crossing_type(
    system: &PiecewiseSystem,
    z: Complex64,
    boundary: BoundaryId,
) -> Result<CrossingType, SystemError> {
    let pos = zone_key(system.config.positive_side(boundary));
    let neg = zone_key(system.config.negative_side(boundary));
    let vp = system.rhs(pos, z)?;
    let vn = system.rhs(neg, z)?;
    let cp = boundary_normal_component(&system.config, boundary, z, vp);
    let cn = boundary_normal_component(&system.config, boundary, z, vn);
    if cp.abs() < EVENT_TOL || cn.abs() < EVENT_TOL {
        return Ok(CrossingType::Tangency);
    }
    if cp.signum() == cn.signum() {
        Ok(CrossingType::Transversal)
    } else {
        Ok(CrossingType::SlidingRegion)
    }
}

fn zone_key(tag: ZoneTag) -> Zone {
    match tag {
        ZoneTag::Plus => Zone::Plus,
        ZoneTag::Central => Zone::Central,
        ZoneTag::Minus => Zone::Minus,
        _ => unreachable!("boundary tags are not zone keys"),
    }
}

struct ZoneIntegrator<'a> {
    system: &'a PiecewiseSystem,
    zone: Zone,
    pole: Cell<Option<Complex64>>,
}

impl<'a> ZoneIntegrator<'a> {
    fn rhs(&self) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
        move |_t, y| {
            let z = Complex64::new(y[0], y[1]);
            match self.system.rhs(self.zone, z) {
                Ok(v) => [v.re, v.im],
                Err(_) => {
                    self.pole.set(Some(z));
                    [0.0, 0.0]
                }
            }
        }
    }
}

/// Integrate inside one zone until the first boundary hit, a pole
/// approach, or `t_max` of zone time elapses. `t_offset` shifts the
/// recorded sample times.
pub fn integrate_in_zone(
    system: &PiecewiseSystem,
    z0: Complex64,
    zone: Zone,
    t_max: f64,
    t_offset: f64,
) -> Result<(Segment, ZoneExit), SystemError> {
    let solver = Dopri5::default();
    let zi = ZoneIntegrator { system, zone, pole: Cell::new(None) };
    let f = zi.rhs();
    let boundaries = [BoundaryId::First, BoundaryId::Second];
    let g = |b: BoundaryId, z: Complex64| system.config.boundary_event(b, z);

    let mut samples = vec![(t_offset, z0)];
    let mut armed = [false; 2];
    for (i, &b) in boundaries.iter().enumerate() {
        armed[i] = g(b, z0).abs() > 10.0 * EVENT_TOL;
    }

    let mut t = 0.0;
    let mut y = [z0.re, z0.im];
    let mut h = solver.h_init;
    let mut forced_steps = 0u32;
    while t < t_max {
        let step = solver.step(&f, t, &y, h.min(t_max - t));
        if let Some(zp) = zi.pole.take() {
            return Err(SystemError::PoleApproach(zp));
        }
        let z_prev = Complex64::new(y[0], y[1]);
        let z_new = Complex64::new(step.y[0], step.y[1]);
        // persistent controller breakdown at the minimum step signals a
        // singularity of the zone field ahead of the |den| threshold
        forced_steps = if step.forced { forced_steps + 1 } else { 0 };
        if forced_steps > 50 {
            let margin = system.field(zone).denominator_margin(z_new);
            if margin < 1e-2 {
                return Err(SystemError::PoleApproach(z_new));
            }
            return Err(SystemError::Timeout);
        }

        // event scan over the accepted step
        let mut hit: Option<(f64, Complex64, BoundaryId)> = None;
        for (i, &b) in boundaries.iter().enumerate() {
            let g0 = g(b, z_prev);
            let g1 = g(b, z_new);
            if !armed[i] {
                if g0.abs() > 10.0 * EVENT_TOL && g1.abs() > 10.0 * EVENT_TOL {
                    armed[i] = true;
                }
                continue;
            }
            let crossed = g0.signum() != g1.signum() || g1.abs() <= EVENT_TOL;
            if !crossed {
                continue;
            }
            // bisect in time over [t, step.t], re-integrating from (t, y)
            let mut lo = 0.0;
            let mut hi = step.t - t;
            let mut z_lo = z_prev;
            let mut z_hi = z_new;
            let mut g_lo = g0;
            for _ in 0..60 {
                if (g(b, z_hi)).abs() <= EVENT_TOL && hi - lo < 1e-12 {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let ym = solver.integrate_to(&f, 0.0, &[z_lo.re, z_lo.im], mid - lo);
                let zm = Complex64::new(ym[0], ym[1]);
                let gm = g(b, zm);
                if gm.abs() <= EVENT_TOL {
                    z_hi = zm;
                    hi = mid;
                    break;
                }
                if gm.signum() == g_lo.signum() {
                    lo = mid;
                    z_lo = zm;
                    g_lo = gm;
                } else {
                    hi = mid;
                    z_hi = zm;
                }
            }
            let t_event = t + hi;
            match hit {
                Some((tb, _, _)) if tb <= t_event => {}
                _ => hit = Some((t_event, z_hi, b)),
            }
        }

        if let Some((te, ze, b)) = hit {
            samples.push((t_offset + te, ze));
            let seg = Segment { zone, samples };
            return Ok((seg, ZoneExit::Boundary { t: t_offset + te, z: ze, boundary: b }));
        }

        t = step.t;
        y = step.y;
        h = step.h_next;
        samples.push((t_offset + t, z_new));
    }
    let z_end = Complex64::new(y[0], y[1]);
    let seg = Segment { zone, samples };
    Ok((seg, ZoneExit::TimeLimit { t: t_offset + t, z: z_end }))
}

/// Zone to start in from `z0`, resolving boundary starts by the direction
/// the local flow pushes.
fn initial_zone(system: &PiecewiseSystem, z0: Complex64) -> Result<Zone, SystemError> {
    match system.config.classify(z0, EVENT_TOL) {
        ZoneTag::Plus => Ok(Zone::Plus),
        ZoneTag::Central => Ok(Zone::Central),
        ZoneTag::Minus => Ok(Zone::Minus),
        ZoneTag::Tangency => Err(SystemError::StartAtTangency(z0)),
        ZoneTag::Boundary(b) => match crossing_type(system, z0, b)? {
            CrossingType::Tangency => Err(SystemError::TangencyEncountered(z0)),
            CrossingType::SlidingRegion => Err(SystemError::SlidingEncountered(z0)),
            CrossingType::Transversal => {
                let pos = zone_key(system.config.positive_side(b));
                let v = system.rhs(pos, z0)?;
                let comp = boundary_normal_component(&system.config, b, z0, v);
                Ok(if comp > 0.0 {
                    pos
                } else {
                    zone_key(system.config.negative_side(b))
                })
            }
        },
    }
}

/// Concatenate zone segments, switching fields at transversal crossings.
/// Halts with a diagnostic error at tangencies and sliding regions.
pub fn flow(
    system: &PiecewiseSystem,
    z0: Complex64,
    stop: StopCondition,
) -> Result<(Trajectory, Termination), SystemError> {
    let mut zone = initial_zone(system, z0)?;
    let mut traj = Trajectory::default();
    let mut t = 0.0;
    let mut z = z0;
    let safety_time = match stop {
        StopCondition::MaxTime(tm) => tm,
        StopCondition::MaxCrossings(_) => 1e4,
    };
    let mut crossings = 0usize;
    loop {
        let budget = safety_time - t;
        if budget <= 0.0 {
            return match stop {
                StopCondition::MaxTime(_) => Ok((traj, Termination::ReachedMaxTime)),
                StopCondition::MaxCrossings(_) => Err(SystemError::Timeout),
            };
        }
        let (seg, exit) = integrate_in_zone(system, z, zone, budget, t)?;
        traj.segments.push(seg);
        match exit {
            ZoneExit::TimeLimit { .. } => {
                return match stop {
                    StopCondition::MaxTime(_) => Ok((traj, Termination::ReachedMaxTime)),
                    StopCondition::MaxCrossings(_) => Err(SystemError::Timeout),
                };
            }
            ZoneExit::Boundary { t: te, z: ze, boundary } => {
                if system.config.classify(ze, EVENT_TOL) == ZoneTag::Tangency {
                    return Err(SystemError::TangencyEncountered(ze));
                }
                match crossing_type(system, ze, boundary)? {
                    CrossingType::Tangency => return Err(SystemError::TangencyEncountered(ze)),
                    CrossingType::SlidingRegion => {
                        return Err(SystemError::SlidingEncountered(ze))
                    }
                    CrossingType::Transversal => {
                        let pos = zone_key(system.config.positive_side(boundary));
                        let neg = zone_key(system.config.negative_side(boundary));
                        let next = if zone == pos { neg } else { pos };
                        traj.events.push(Event {
                            t: te,
                            z: ze,
                            boundary,
                            from_zone: zone,
                            to_zone: next,
                        });
                        crossings += 1;
                        if let StopCondition::MaxCrossings(n) = stop {
                            if crossings >= n {
                                return Ok((traj, Termination::ReachedMaxCrossings));
                            }
                        }
                        zone = next;
                        t = te;
                        z = ze;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::CatalogTag;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_4;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn iz_everywhere() -> PiecewiseSystem {
        PiecewiseSystem::new(
            PartitionConfig::strip(),
            HolomorphicField::iz(),
            HolomorphicField::iz(),
            HolomorphicField::iz(),
        )
    }

    #[test]
    fn central_circle_exit() {
        // from sqrt(2) e^{-i pi/4} = (1,-1), the iz orbit is the circle of
        // radius sqrt(2); it leaves the central strip at (1, 1).
        let sys = iz_everywhere();
        let z0 = Complex64::from_polar(2f64.sqrt(), -FRAC_PI_4);
        let (_, exit) =
            integrate_in_zone(&sys, z0, Zone::Central, 10.0, 0.0).unwrap();
        match exit {
            ZoneExit::Boundary { z, boundary, .. } => {
                assert_eq!(boundary, BoundaryId::First);
                assert_relative_eq!(z.re, 1.0, epsilon = 1e-7);
                assert_relative_eq!(z.im, 1.0, epsilon = 1e-9);
            }
            other => panic!("expected boundary exit, got {other:?}"),
        }
    }

    #[test]
    fn linear_zone_exit_matches_closed_form() {
        // upper zone field (a+ib)(z - i + x1): exit of the half-turn from
        // u + i equals -(u+x1) e^{a pi/b} - x1 + i.
        let (a, b, x1) = (-1.0, 1.0, 1.0);
        let lam = c(a, b);
        let center = c(-x1, 1.0);
        let upper = HolomorphicField::from_catalog(CatalogTag::LinearCenter {
            lambda: lam,
            center,
        });
        let sys = PiecewiseSystem::new(
            PartitionConfig::strip(),
            upper,
            HolomorphicField::iz(),
            HolomorphicField::iz(),
        );
        let u = 0.5;
        let (_, exit) = integrate_in_zone(&sys, c(u, 1.0), Zone::Plus, 10.0, 0.0).unwrap();
        match exit {
            ZoneExit::Boundary { z, .. } => {
                let expect = -(u + x1) * (a * std::f64::consts::PI / b).exp() - x1;
                assert_relative_eq!(z.re, expect, epsilon = 1e-8);
                assert_relative_eq!(z.im, 1.0, epsilon = 1e-9);
            }
            other => panic!("expected boundary exit, got {other:?}"),
        }
    }

    #[test]
    fn tiny_perturbation_continuity() {
        let sys0 = iz_everywhere();
        let mut polys = HashMap::new();
        polys.insert(Zone::Central, vec![c(1.0, 1.0), c(0.5, -0.5)]);
        let sys1 = iz_everywhere().with_perturbation(Perturbation { epsilon: 1e-12, polys });
        let z0 = Complex64::from_polar(2f64.sqrt(), -FRAC_PI_4);
        let (_, e0) = integrate_in_zone(&sys0, z0, Zone::Central, 10.0, 0.0).unwrap();
        let (_, e1) = integrate_in_zone(&sys1, z0, Zone::Central, 10.0, 0.0).unwrap();
        let (ZoneExit::Boundary { z: za, .. }, ZoneExit::Boundary { z: zb, .. }) = (e0, e1)
        else {
            panic!("expected boundary exits")
        };
        assert!((za - zb).norm() <= 1e-9);
    }

    #[test]
    fn crossing_classification_examples() {
        // same field both sides: transversal at 2 + i
        let sys = iz_everywhere();
        assert_eq!(
            crossing_type(&sys, c(2.0, 1.0), BoundaryId::First).unwrap(),
            CrossingType::Transversal
        );
        // iz below, -iz above: sliding
        let neg_iz = HolomorphicField::from_catalog(CatalogTag::LinearCenter {
            lambda: c(0.0, -1.0),
            center: c(0.0, 0.0),
        });
        let sys2 = PiecewiseSystem::new(
            PartitionConfig::strip(),
            neg_iz,
            HolomorphicField::iz(),
            HolomorphicField::iz(),
        );
        assert_eq!(
            crossing_type(&sys2, c(2.0, 1.0), BoundaryId::First).unwrap(),
            CrossingType::SlidingRegion
        );
        // horizontal velocity at the top of a circle: tangency at i
        assert_eq!(
            crossing_type(&sys, c(0.0, 1.0), BoundaryId::First).unwrap(),
            CrossingType::Tangency
        );
    }

    #[test]
    fn global_center_periodic_four_crossings() {
        let sys = iz_everywhere();
        let (traj, term) = flow(&sys, c(2.0, 0.0), StopCondition::MaxCrossings(4)).unwrap();
        assert_eq!(term, Termination::ReachedMaxCrossings);
        assert_eq!(traj.events.len(), 4);
        let last = traj.events.last().unwrap();
        // fourth crossing returns to the starting circle's lower-line exit;
        // continue a touch further: check the event sequence geometry instead
        assert_eq!(last.boundary, BoundaryId::Second);
        // all events satisfy |g| <= EVENT_TOL
        for e in &traj.events {
            assert!(sys.config.boundary_event(e.boundary, e.z).abs() <= EVENT_TOL);
        }
    }

    #[test]
    fn full_period_closure() {
        let sys = iz_everywhere();
        let (traj, _) = flow(
            &sys,
            c(2.0, 0.0),
            StopCondition::MaxTime(2.0 * std::f64::consts::PI),
        )
        .unwrap();
        let end = traj.end().unwrap();
        assert!((end - c(2.0, 0.0)).norm() <= 1e-8);
    }

    #[test]
    fn time_reversal_returns_to_entry() {
        let (a, b, x1) = (-0.8, 1.3, 0.7);
        let lam = c(a, b);
        let upper = HolomorphicField::from_catalog(CatalogTag::LinearCenter {
            lambda: lam,
            center: c(-x1, 1.0),
        });
        let sys = PiecewiseSystem::new(
            PartitionConfig::strip(),
            upper,
            HolomorphicField::iz(),
            HolomorphicField::iz(),
        );
        let entry = c(0.4, 1.0);
        let (_, exit) = integrate_in_zone(&sys, entry, Zone::Plus, 10.0, 0.0).unwrap();
        let ZoneExit::Boundary { t, z, .. } = exit else { panic!() };
        // integrate the reversed field for the same duration
        let solver = Dopri5::default();
        let f = |_t: f64, y: &[f64; 2]| {
            let v = lam * (Complex64::new(y[0], y[1]) - c(-x1, 1.0));
            [-v.re, -v.im]
        };
        let back = solver.integrate_to(&f, 0.0, &[z.re, z.im], t);
        assert!((Complex64::new(back[0], back[1]) - entry).norm() <= 1e-7);
    }

    #[test]
    fn pole_approach_detected() {
        // central field i/z from a point heading into the origin region:
        // hyperbolic orbits avoid 0, so build 1/(z) directly toward pole
        let fld = HolomorphicField::from_rational(
            vec![c(-1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        );
        let sys = PiecewiseSystem::new(
            PartitionConfig::strip(),
            fld.clone(),
            fld.clone(),
            fld,
        );
        // ż = -1/z from a positive real point flows into the origin
        let res = integrate_in_zone(&sys, c(0.4, 0.0), Zone::Central, 10.0, 0.0);
        assert!(matches!(res, Err(SystemError::PoleApproach(_))));
    }

    #[test]
    fn csv_export_shape() {
        let sys = iz_everywhere();
        let (traj, _) = flow(&sys, c(2.0, 0.0), StopCondition::MaxCrossings(2)).unwrap();
        let csv = traj.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,re,im,zone,event_flag");
        assert!(csv.lines().count() > 10);
        assert_eq!(csv.lines().filter(|l| l.ends_with(",1")).count(), 2);
    }
}
