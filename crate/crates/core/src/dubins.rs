//! Fixed-radius Dubins curves and the fan of primitive paths the planner
//! chooses from at each pose.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::environment::Extent;
use crate::error::{Error, Result};
use crate::gp::Point;

/// Wraps an angle into `[-pi, pi)`.
pub fn normalize_angle(a: f64) -> f64 {
    let mut r = a - TAU * ((a + PI) / TAU).floor();
    if r >= PI {
        r -= TAU;
    }
    if r < -PI {
        r += TAU;
    }
    r
}

fn mod2pi(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Planar robot configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Radians in `[-pi, pi)`.
    pub heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self {
            x,
            y,
            heading: normalize_angle(heading),
        }
    }

    pub fn point(&self) -> Point {
        [self.x, self.y]
    }

    pub fn distance(&self, other: &Pose) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.heading.is_finite()
    }

    /// Reflection across the x-axis.
    pub fn mirrored(&self) -> Self {
        Self::new(self.x, -self.y, -self.heading)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    Left,
    Straight,
    Right,
}

/// The six Dubins words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DubinsWord {
    Lsl,
    Rsr,
    Lsr,
    Rsl,
    Rlr,
    Lrl,
}

impl DubinsWord {
    pub const ALL: [DubinsWord; 6] = [
        DubinsWord::Lsl,
        DubinsWord::Rsr,
        DubinsWord::Lsr,
        DubinsWord::Rsl,
        DubinsWord::Rlr,
        DubinsWord::Lrl,
    ];

    pub fn segments(self) -> [Segment; 3] {
        use Segment::*;
        match self {
            DubinsWord::Lsl => [Left, Straight, Left],
            DubinsWord::Rsr => [Right, Straight, Right],
            DubinsWord::Lsr => [Left, Straight, Right],
            DubinsWord::Rsl => [Right, Straight, Left],
            DubinsWord::Rlr => [Right, Left, Right],
            DubinsWord::Lrl => [Left, Right, Left],
        }
    }

    pub fn mirrored(self) -> Self {
        match self {
            DubinsWord::Lsl => DubinsWord::Rsr,
            DubinsWord::Rsr => DubinsWord::Lsl,
            DubinsWord::Lsr => DubinsWord::Rsl,
            DubinsWord::Rsl => DubinsWord::Lsr,
            DubinsWord::Rlr => DubinsWord::Lrl,
            DubinsWord::Lrl => DubinsWord::Rlr,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DubinsWord::Lsl => "LSL",
            DubinsWord::Rsr => "RSR",
            DubinsWord::Lsr => "LSR",
            DubinsWord::Rsl => "RSL",
            DubinsWord::Rlr => "RLR",
            DubinsWord::Lrl => "LRL",
        }
    }

    /// Normalized segment parameters `(t, p, q)` for unit radius, given the
    /// normalized distance `d` and the headings `alpha`, `beta` relative to
    /// the start-goal line. `None` when the word has no solution.
    fn solve(self, d: f64, alpha: f64, beta: f64) -> Option<[f64; 3]> {
        let (sa, ca) = alpha.sin_cos();
        let (sb, cb) = beta.sin_cos();
        let c_ab = (alpha - beta).cos();
        match self {
            DubinsWord::Lsl => {
                let p_sq = 2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sa - sb);
                if p_sq < 0.0 {
                    return None;
                }
                let tmp = (cb - ca).atan2(d + sa - sb);
                Some([mod2pi(tmp - alpha), p_sq.sqrt(), mod2pi(beta - tmp)])
            }
            DubinsWord::Rsr => {
                let p_sq = 2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sb - sa);
                if p_sq < 0.0 {
                    return None;
                }
                let tmp = (ca - cb).atan2(d - sa + sb);
                Some([mod2pi(alpha - tmp), p_sq.sqrt(), mod2pi(tmp - beta)])
            }
            DubinsWord::Lsr => {
                let p_sq = -2.0 + d * d + 2.0 * c_ab + 2.0 * d * (sa + sb);
                if p_sq < 0.0 {
                    return None;
                }
                let p = p_sq.sqrt();
                let tmp = (-ca - cb).atan2(d + sa + sb) - (-2.0f64).atan2(p);
                Some([mod2pi(tmp - alpha), p, mod2pi(tmp - beta)])
            }
            DubinsWord::Rsl => {
                let p_sq = -2.0 + d * d + 2.0 * c_ab - 2.0 * d * (sa + sb);
                if p_sq < 0.0 {
                    return None;
                }
                let p = p_sq.sqrt();
                let tmp = (ca + cb).atan2(d - sa - sb) - 2.0f64.atan2(p);
                Some([mod2pi(alpha - tmp), p, mod2pi(beta - tmp)])
            }
            DubinsWord::Rlr => {
                let tmp = (6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sa - sb)) / 8.0;
                if tmp.abs() > 1.0 {
                    return None;
                }
                let phi = (ca - cb).atan2(d - sa + sb);
                let p = mod2pi(TAU - tmp.acos());
                let t = mod2pi(alpha - phi + mod2pi(p / 2.0));
                Some([t, p, mod2pi(alpha - beta - t + p)])
            }
            DubinsWord::Lrl => {
                let tmp = (6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sb - sa)) / 8.0;
                if tmp.abs() > 1.0 {
                    return None;
                }
                let phi = (ca - cb).atan2(d + sa - sb);
                let p = mod2pi(TAU - tmp.acos());
                let t = mod2pi(-alpha - phi + p / 2.0);
                Some([t, p, mod2pi(beta - alpha - t + p)])
            }
        }
    }
}

/// A Dubins curve: a word and its three segment lengths (workspace units).
#[derive(Debug, Clone, PartialEq)]
pub struct DubinsCurve {
    pub start: Pose,
    pub word: DubinsWord,
    pub segment_lengths: [f64; 3],
    pub radius: f64,
}

impl DubinsCurve {
    pub fn length(&self) -> f64 {
        self.segment_lengths.iter().sum()
    }

    /// Pose after travelling `s` along the curve (clamped to `[0, length]`).
    pub fn pose_at(&self, s: f64) -> Pose {
        let mut remaining = s.clamp(0.0, self.length());
        let (mut x, mut y, mut h) = (self.start.x, self.start.y, self.start.heading);
        for (seg, &len) in self.word.segments().iter().zip(&self.segment_lengths) {
            let step = remaining.min(len);
            (x, y, h) = advance(*seg, x, y, h, step, self.radius);
            remaining -= step;
            if remaining <= 0.0 {
                break;
            }
        }
        Pose::new(x, y, h)
    }

    /// Samples the curve at spacing no larger than `spacing`, starting at the
    /// start pose and ending exactly at `end`.
    pub fn into_path(self, end: Pose, spacing: f64) -> PrimitivePath {
        let length = self.length();
        let segments = ((length / spacing) - 1e-9).ceil().max(1.0) as usize;
        let mut samples: Vec<Pose> = (0..segments)
            .map(|i| self.pose_at(length * i as f64 / segments as f64))
            .collect();
        samples[0] = self.start;
        samples.push(end);
        PrimitivePath {
            start: self.start,
            end,
            word: self.word,
            segment_lengths: self.segment_lengths,
            radius: self.radius,
            length,
            samples,
        }
    }
}

fn advance(seg: Segment, x: f64, y: f64, h: f64, s: f64, r: f64) -> (f64, f64, f64) {
    match seg {
        Segment::Straight => (x + s * h.cos(), y + s * h.sin(), h),
        Segment::Left => {
            let dh = s / r;
            (
                x + r * ((h + dh).sin() - h.sin()),
                y - r * ((h + dh).cos() - h.cos()),
                h + dh,
            )
        }
        Segment::Right => {
            let dh = s / r;
            (
                x - r * ((h - dh).sin() - h.sin()),
                y + r * ((h - dh).cos() - h.cos()),
                h - dh,
            )
        }
    }
}

/// A sampled Dubins curve between two poses.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitivePath {
    pub start: Pose,
    pub end: Pose,
    pub word: DubinsWord,
    pub segment_lengths: [f64; 3],
    pub radius: f64,
    pub length: f64,
    /// Poses along the curve; first is `start`, last is `end`.
    pub samples: Vec<Pose>,
}

impl PrimitivePath {
    /// Sample locations collected while driving the path (everything after
    /// the start pose, which was already sampled on arrival).
    pub fn observation_points(&self) -> impl ExactSizeIterator<Item = Point> + '_ {
        self.samples[1..].iter().map(Pose::point)
    }

    /// Number of samples the path costs.
    pub fn cost(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn within(&self, extent: &Extent) -> bool {
        self.samples.iter().all(|p| extent.contains(p.x, p.y))
    }
}

/// Every feasible word between two poses, in [`DubinsWord::ALL`] order.
pub fn all_dubins(start: Pose, end: Pose, r_min: f64) -> Result<Vec<DubinsCurve>> {
    if !(r_min > 0.0 && r_min.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "turning radius must be positive, got {r_min}"
        )));
    }
    if !start.is_finite() || !end.is_finite() {
        return Err(Error::NonFinite("Dubins endpoint"));
    }
    let dx = end.x - start.x;
    let dy = end.y - start.y;
    let d = dx.hypot(dy) / r_min;
    let theta = if d > 0.0 { mod2pi(dy.atan2(dx)) } else { 0.0 };
    let alpha = mod2pi(start.heading - theta);
    let beta = mod2pi(end.heading - theta);
    Ok(DubinsWord::ALL
        .iter()
        .filter_map(|&word| {
            word.solve(d, alpha, beta).map(|[t, p, q]| DubinsCurve {
                start,
                word,
                segment_lengths: [t * r_min, p * r_min, q * r_min],
                radius: r_min,
            })
        })
        .collect())
}

/// Minimum-length Dubins curve from `start` to `end`.
pub fn shortest_dubins(start: Pose, end: Pose, r_min: f64) -> Result<DubinsCurve> {
    all_dubins(start, end, r_min)?
        .into_iter()
        .min_by(|a, b| a.length().total_cmp(&b.length()))
        .ok_or_else(|| Error::InvalidArgument("no Dubins word solved".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrimitiveParams {
    /// Number of primitives in the fan.
    pub count: usize,
    /// Straight-line distance from the pose to each terminal pose.
    pub arc_length: f64,
    /// Minimum turning radius.
    pub r_min: f64,
    /// Half-width of the heading fan in radians.
    pub fan_half_angle: f64,
    /// Maximum distance between consecutive samples.
    pub spacing: f64,
}

impl Default for PrimitiveParams {
    fn default() -> Self {
        Self {
            count: 15,
            arc_length: 1.0,
            r_min: 0.25,
            fan_half_angle: 0.75 * PI,
            spacing: 0.1,
        }
    }
}

impl PrimitiveParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.count >= 1
            && self.arc_length > 0.0
            && self.r_min > 0.0
            && self.spacing > 0.0
            && (0.0..=PI).contains(&self.fan_half_angle);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "invalid primitive parameters {self:?}"
            )))
        }
    }

    /// Fan offset of primitive `i` relative to the current heading.
    pub fn fan_offset(&self, i: usize) -> f64 {
        if self.count == 1 {
            0.0
        } else {
            -self.fan_half_angle + 2.0 * self.fan_half_angle * i as f64 / (self.count - 1) as f64
        }
    }
}

/// A primitive path tagged with its position in the fan.
#[derive(Debug, Clone, PartialEq)]
pub struct Primitive {
    pub index: usize,
    pub path: PrimitivePath,
}

/// The fan of primitive paths available from `pose`.
///
/// Terminal poses sit `arc_length` away along headings spread evenly over
/// `[-fan, +fan]` around the current heading, each facing outward. Paths with
/// any sample outside `extent` are dropped whole.
pub fn primitive_set(pose: Pose, params: &PrimitiveParams, extent: &Extent) -> Result<Vec<Primitive>> {
    params.validate()?;
    let mut out = Vec::with_capacity(params.count);
    for i in 0..params.count {
        let dir = pose.heading + params.fan_offset(i);
        let end = Pose::new(
            pose.x + params.arc_length * dir.cos(),
            pose.y + params.arc_length * dir.sin(),
            dir,
        );
        if !extent.contains(end.x, end.y) {
            continue;
        }
        let path = shortest_dubins(pose, end, params.r_min)?.into_path(end, params.spacing);
        if path.within(extent) {
            out.push(Primitive { index: i, path });
        }
    }
    if out.is_empty() {
        return Err(Error::NoFeasiblePrimitives {
            x: pose.x,
            y: pose.y,
            heading: pose.heading,
        });
    }
    Ok(out)
}
