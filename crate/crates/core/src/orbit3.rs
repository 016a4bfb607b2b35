//! A periodic-point free homeomorphism of `R^3` that is not a shift.
//!
//! `h` rotates space by sqrt(2) degrees about the z-axis. Inside the solid
//! cylinder `x^2 + y^2 <= 1` the rotation is followed by the vertical slide
//! `z -> z + 1 - x^2 - y^2`, which is the identity on the cylinder wall, so
//! the two pieces agree there. The unit circle in the xy-plane is invariant
//! and carries an irrational rotation, so the orbit of `(1, 0, 0)` has a
//! cluster point; an orbit of a translation `p + n v` never does.
//!
//! Irrationality of the angle is symbolic: `sqrt(2) / 360` is irrational, so
//! `k sqrt(2)` degrees is never a whole number of turns for `k >= 1`. The
//! floating-point checks here only confirm the numeric consequences.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Sub};

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ORIGIN: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn norm(self) -> f64 {
        libm::sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
    }

    /// Squared distance to the z-axis.
    pub fn radius_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dist(self, other: Vec3) -> f64 {
        (self - other).norm()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        Vec3::new(self * v.x, self * v.y, self * v.z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OrbitError {
    OutsideCylinder { radius_sq: f64 },
    TooFewPoints,
    ZeroShiftVector,
}

impl fmt::Display for OrbitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitError::OutsideCylinder { radius_sq } => {
                write!(f, "point with x^2 + y^2 = {radius_sq} is outside the unit cylinder")
            }
            OrbitError::TooFewPoints => f.write_str("need at least two points"),
            OrbitError::ZeroShiftVector => f.write_str("shift vector must be nonzero"),
        }
    }
}

/// Rotation by sqrt(2) degrees about the z-axis, then the slide inside the
/// unit cylinder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylinderMap {
    cos: f64,
    sin: f64,
    angle: f64,
}

impl Default for CylinderMap {
    fn default() -> Self {
        Self::new()
    }
}

impl CylinderMap {
    pub const RADIUS: f64 = 1.0;

    pub fn new() -> Self {
        let angle = core::f64::consts::SQRT_2 * core::f64::consts::PI / 180.0;
        CylinderMap { cos: libm::cos(angle), sin: libm::sin(angle), angle }
    }

    /// Rotation angle in radians.
    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn rot_h(&self, v: Vec3) -> Vec3 {
        Vec3::new(v.x * self.cos - v.y * self.sin, v.x * self.sin + v.y * self.cos, v.z)
    }

    pub fn slide_g(&self, v: Vec3) -> Result<Vec3, OrbitError> {
        let r2 = v.radius_sq();
        if r2 > Self::RADIUS {
            return Err(OrbitError::OutsideCylinder { radius_sq: r2 });
        }
        Ok(Vec3::new(v.x, v.y, v.z + 1.0 - r2))
    }

    pub fn f3(&self, v: Vec3) -> Vec3 {
        let r2 = v.radius_sq();
        let mut w = self.rot_h(v);
        // The rotated point has the same radius; use the input's, exactly.
        if r2 <= Self::RADIUS {
            w.z = v.z + (1.0 - r2);
        }
        w
    }

    /// `[v, f(v), ..., f^steps(v)]`.
    pub fn orbit(&self, v: Vec3, steps: usize) -> Vec<Vec3> {
        let mut out = Vec::with_capacity(steps + 1);
        let mut p = v;
        out.push(p);
        for _ in 0..steps {
            p = self.f3(p);
            out.push(p);
        }
        out
    }

    pub fn iterate(&self, v: Vec3, k: usize) -> Vec3 {
        (0..k).fold(v, |p, _| self.f3(p))
    }

    /// Contrasts the orbit of `(1, 0, 0)` with translation orbits, for each
    /// threshold in `eps_list`.
    pub fn obstruction_report(&self, steps: usize, eps_list: &[f64]) -> Vec<ObstructionReport> {
        self.obstruction_report_from(Vec3::new(1.0, 0.0, 0.0), steps, eps_list)
    }

    /// [`obstruction_report`](Self::obstruction_report) for the orbit of `start`.
    pub fn obstruction_report_from(&self, start: Vec3, steps: usize, eps_list: &[f64]) -> Vec<ObstructionReport> {
        let points = self.orbit(start, steps);
        obstruction_for_orbit(&points, closest_pair(&points), eps_list)
    }
}

/// Report rows for an orbit `points` already computed, with its closest pair.
pub fn obstruction_for_orbit(
    points: &[Vec3],
    closest: Option<ClosestPair>,
    eps_list: &[f64],
) -> Vec<ObstructionReport> {
    let steps = points.len().saturating_sub(1);
    let start = points.first().copied().unwrap_or(Vec3::ORIGIN);
    // Translation by the first step of f: if f were that shift, every orbit
    // gap would be this constant.
    let v = points.get(1).map_or(Vec3::ORIGIN, |p| *p - start);
    let baseline = shift_orbit_gap(start, v, steps.max(2)).ok();
    eps_list
        .iter()
        .map(|&eps| {
            let found = closest.filter(|c| c.gap < eps);
            ObstructionReport {
                n: steps,
                eps,
                witness_found: found.is_some(),
                witness_i: found.map(|c| c.i),
                witness_j: found.map(|c| c.j),
                gap: closest.map_or(f64::INFINITY, |c| c.gap),
                shift_baseline: baseline.unwrap_or(0.0),
            }
        })
        .collect()
}

/// One row of the orbit accumulation check. `gap` is the smallest distance
/// between distinct orbit points; a witness pair exists when it is below
/// `eps`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub eps: f64,
    pub witness_found: bool,
    pub witness_i: Option<usize>,
    pub witness_j: Option<usize>,
    pub gap: f64,
    pub shift_baseline: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosestPair {
    pub i: usize,
    pub j: usize,
    pub gap: f64,
}

/// Closest pair by exhaustive scan; ties keep the lexicographically first.
pub fn closest_pair(points: &[Vec3]) -> Option<ClosestPair> {
    let mut best: Option<ClosestPair> = None;
    for i in 0..points.len() {
        let p = points[i];
        for (dj, q) in points[i + 1..].iter().enumerate() {
            let d = p.dist(*q);
            if best.is_none_or(|b| d < b.gap) {
                best = Some(ClosestPair { i, j: i + 1 + dj, gap: d });
            }
        }
    }
    best
}

pub fn min_pairwise_gap(points: &[Vec3]) -> Result<f64, OrbitError> {
    closest_pair(points).map(|c| c.gap).ok_or(OrbitError::TooFewPoints)
}

/// Minimum gap of `{p + n v : 0 <= n <= steps}`, which is `|v|`.
pub fn shift_orbit_gap(p: Vec3, v: Vec3, steps: usize) -> Result<f64, OrbitError> {
    if v == Vec3::ORIGIN {
        return Err(OrbitError::ZeroShiftVector);
    }
    if steps < 2 {
        return Err(OrbitError::TooFewPoints);
    }
    // Consecutive points are the closest; scanning them avoids the quadratic
    // pass while staying a direct computation on the orbit points.
    let mut gap = f64::INFINITY;
    let mut prev = p;
    for n in 1..=steps {
        let next = p + (n as f64) * v;
        gap = gap.min(next.dist(prev));
        prev = next;
    }
    Ok(gap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_examples() {
        let m = CylinderMap::new();
        assert_eq!(m.rot_h(Vec3::new(0.0, 0.0, 5.0)), Vec3::new(0.0, 0.0, 5.0));
        let theta = core::f64::consts::SQRT_2 * core::f64::consts::PI / 180.0;
        let p = m.rot_h(Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(p, Vec3::new(libm::cos(theta), libm::sin(theta), 0.0));
        let back = m.iterate(Vec3::new(2.0, 0.0, 0.0), 0);
        assert_eq!(back, Vec3::new(2.0, 0.0, 0.0));
        // 360 steps turn by 360 sqrt(2) degrees, about 509.1, not a full turn.
        let p = Vec3::new(1.0, 0.0, 0.0);
        let q = (0..360).fold(p, |v, _| m.rot_h(v));
        assert!(q.dist(p) > 0.01);
    }

    #[test]
    fn slide_examples() {
        let m = CylinderMap::new();
        assert_eq!(m.slide_g(Vec3::ORIGIN).unwrap(), Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(m.slide_g(Vec3::new(1.0, 0.0, 7.0)).unwrap(), Vec3::new(1.0, 0.0, 7.0));
        let b = m.slide_g(Vec3::new(0.6, 0.8, 2.0)).unwrap();
        assert!((b.z - 2.0).abs() < 1e-15);
        assert!(matches!(m.slide_g(Vec3::new(2.0, 0.0, 0.0)), Err(OrbitError::OutsideCylinder { .. })));
    }

    #[test]
    fn f3_examples() {
        let m = CylinderMap::new();
        assert_eq!(m.f3(Vec3::new(0.0, 0.0, 3.0)), Vec3::new(0.0, 0.0, 4.0));
        let p = Vec3::new(2.0, 0.0, 0.0);
        assert_eq!(m.f3(p), m.rot_h(p));
        let q = m.f3(Vec3::new(1.0, 0.0, 0.0));
        assert!((q.radius_sq() - 1.0).abs() < 1e-12);
        assert!(q.z.abs() < 1e-12);
        // Interior: rotation and a partial slide.
        let r = m.f3(Vec3::new(0.5, 0.0, 0.0));
        assert!((r.z - 0.75).abs() < 1e-15);
        assert!((r.radius_sq() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn orbit_examples() {
        let m = CylinderMap::new();
        let o = m.orbit(Vec3::new(1.0, 0.0, 0.0), 10);
        assert_eq!(o.len(), 11);
        for p in &o {
            assert!((p.radius_sq() - 1.0).abs() <= 1e-10 && p.z.abs() <= 1e-10);
        }
        let axis: Vec<f64> = m.orbit(Vec3::ORIGIN, 5).iter().map(|p| p.z).collect();
        assert_eq!(axis, [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        for p in m.orbit(Vec3::new(5.0, 0.0, 0.0), 4) {
            assert!((p.radius_sq() - 25.0).abs() < 1e-12 && p.z == 0.0);
        }
    }

    #[test]
    fn gap_examples() {
        let m = CylinderMap::new();
        assert!(min_pairwise_gap(&m.orbit(Vec3::new(1.0, 0.0, 0.0), 1000)).unwrap() < 0.02);
        assert_eq!(min_pairwise_gap(&m.orbit(Vec3::ORIGIN, 1000)).unwrap(), 1.0);
        assert_eq!(min_pairwise_gap(&[Vec3::ORIGIN, Vec3::ORIGIN]).unwrap(), 0.0);
        assert_eq!(min_pairwise_gap(&[Vec3::ORIGIN]), Err(OrbitError::TooFewPoints));
    }

    #[test]
    fn shift_gap_examples() {
        assert_eq!(shift_orbit_gap(Vec3::ORIGIN, Vec3::new(0.0, 0.0, 1.0), 100).unwrap(), 1.0);
        assert_eq!(shift_orbit_gap(Vec3::ORIGIN, Vec3::new(3.0, 4.0, 0.0), 50).unwrap(), 5.0);
        assert_eq!(shift_orbit_gap(Vec3::ORIGIN, Vec3::ORIGIN, 5), Err(OrbitError::ZeroShiftVector));
        // Agrees with the exhaustive scan.
        let p = Vec3::new(0.3, -1.2, 4.0);
        let v = Vec3::new(0.1, 0.25, -0.7);
        let pts: Vec<Vec3> = (0..=40).map(|n| p + (n as f64) * v).collect();
        let brute = min_pairwise_gap(&pts).unwrap();
        assert!((shift_orbit_gap(p, v, 40).unwrap() - brute).abs() < 1e-12);
        assert!((brute - v.norm()).abs() < 1e-12);
    }

    #[test]
    fn obstruction_examples() {
        let m = CylinderMap::new();
        let r = m.obstruction_report(10, &[1e-6]);
        assert!(!r[0].witness_found);
        assert!(r[0].gap > 1e-6);
        let r = m.obstruction_report(2, &[10.0]);
        assert!(r[0].witness_found);
        let (i, j) = (r[0].witness_i.unwrap(), r[0].witness_j.unwrap());
        assert!(i < j && j <= 2);
    }
}
