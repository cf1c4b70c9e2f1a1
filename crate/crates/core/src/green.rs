//! Green's function of the Dirichlet problem at the four corners.
//!
//! Points are described relative to the main cross: the arm and distance
//! `s = d′(x, q₀)` of the point `z` where the point's tree attaches to the
//! cross, and the path length from `z` into that tree. Each arm has length 1.
//! `G(·, y)` is linear along the arms and along the path from `z` to `y`, and
//! constant on every other component.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::vsgraph::{opp, FunctionOnGraph, GraphApprox, Letter, CORNERS};

/// Two attachment distances closer than this are the same point.
const SAME_S: f64 = 1e-12;

/// One straight leg of a path inside an attached tree: the diagonal
/// direction (`0..4`, as for arms) and its length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub dir: usize,
    pub len: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonPoint {
    /// `0..4`.
    pub arm: usize,
    /// `d′(z, q₀)` in `[0, 1]`.
    pub s: f64,
    /// `d(z, x)`.
    pub offset: f64,
    /// Legs from `z` to the point; needed only to locate where two paths
    /// into the same tree part.
    pub branch_path: Option<Vec<Leg>>,
}

impl SkeletonPoint {
    pub fn on_arm(arm: usize, s: f64) -> Self {
        SkeletonPoint {
            arm,
            s,
            offset: 0.0,
            branch_path: Some(Vec::new()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.arm >= 4 {
            return Err(invalid(format!("arm {} is not in 0..4", self.arm)));
        }
        if !(0.0..=1.0).contains(&self.s) {
            return Err(invalid(format!("s = {} is not in [0, 1]", self.s)));
        }
        if !(self.offset >= 0.0) {
            return Err(invalid(format!("offset {} is negative", self.offset)));
        }
        if let Some(p) = &self.branch_path {
            let total: f64 = p.iter().map(|l| l.len).sum();
            if (total - self.offset).abs() > 1e-12 * self.offset.max(1.0) || p.iter().any(|l| l.dir >= 4 || l.len < 0.0)
            {
                return Err(invalid("branch path does not match the offset"));
            }
        }
        Ok(())
    }

    /// Unit-square coordinates of the attachment point `z`.
    pub fn attachment(&self) -> (f64, f64) {
        let (cx, cy) = CORNERS[self.arm];
        (0.5 + self.s * (cx as f64 - 0.5), 0.5 + self.s * (cy as f64 - 0.5))
    }
}

/// Length of the common initial part of two tree paths.
fn common_length(a: &[Leg], b: &[Leg]) -> f64 {
    let mut d = 0.0;
    for (x, y) in a.iter().zip(b) {
        if x.dir != y.dir {
            break;
        }
        d += x.len.min(y.len);
        if x.len != y.len {
            break;
        }
    }
    d
}

fn same_arm_value(s_near: f64, s_far: f64) -> f64 {
    (1.0 - s_far) * (3.0 * s_near + 1.0) / 4.0
}

pub fn green_eval(x: &SkeletonPoint, y: &SkeletonPoint) -> Result<f64> {
    x.validate()?;
    y.validate()?;
    let centerish = x.s == 0.0 || y.s == 0.0;
    if x.arm != y.arm && !centerish {
        return Ok((1.0 - x.s) * (1.0 - y.s) / 4.0);
    }
    if (x.s - y.s).abs() > SAME_S || centerish {
        let (a, b) = if x.s < y.s { (x.s, y.s) } else { (y.s, x.s) };
        return Ok(same_arm_value(a, b));
    }
    let s = x.s.max(y.s);
    let base = same_arm_value(s, s);
    if x.offset == 0.0 || y.offset == 0.0 {
        return Ok(base);
    }
    match (&x.branch_path, &y.branch_path) {
        (Some(a), Some(b)) => Ok(base + common_length(a, b)),
        _ => Err(invalid(
            "both points hang off the same attachment point; branch paths are required",
        )),
    }
}

fn scale_path(p: &mut [Leg], side: f64) {
    for l in p {
        l.len /= side;
    }
}

/// Skeleton description of every vertex of `g`.
pub fn vertex_points(g: &GraphApprox) -> Vec<SkeletonPoint> {
    let params = g.params();
    let nm = params.num_maps();
    let side = params.side() as f64;
    let m = g.level();
    let mut out: Vec<Option<SkeletonPoint>> = vec![None; g.vertex_count()];
    for (ci, corners) in g.cells().iter().enumerate() {
        let mut word = vec![0usize; m];
        let mut r = ci;
        for slot in word.iter_mut().rev() {
            *slot = r % nm;
            r /= nm;
        }
        for (k, &v) in corners.iter().enumerate() {
            if out[v].is_some() {
                continue;
            }
            let mut arm = k;
            let mut s = 1.0;
            let mut offset = 0.0;
            let mut path: Vec<Leg> = Vec::new();
            for &l in word.iter().rev() {
                scale_path(&mut path, side);
                offset /= side;
                match params.letter(l) {
                    Letter::Center => s /= side,
                    Letter::Arm { arm: a, pos } => {
                        let c = 2.0 * pos as f64 / side;
                        if s == 0.0 || arm == a {
                            s = c + s / side;
                        } else if arm == opp(a) {
                            s = c - s / side;
                        } else {
                            let leg = Leg { dir: arm, len: s / side };
                            path.insert(0, leg);
                            offset += leg.len;
                            s = c;
                        }
                        arm = a;
                    }
                }
            }
            out[v] = Some(SkeletonPoint {
                arm,
                s,
                offset,
                branch_path: Some(path),
            });
        }
    }
    out.into_iter().map(|p| p.expect("every vertex lies in a cell")).collect()
}

/// `G(·, y)` on the vertices of `g`.
pub fn green_field(g: &GraphApprox, y: &SkeletonPoint) -> Result<FunctionOnGraph> {
    y.validate()?;
    let values = vertex_points(g)
        .iter()
        .map(|x| green_eval(x, y))
        .collect::<Result<Vec<_>>>()?;
    Ok(FunctionOnGraph::new(g.level(), values))
}

/// `max |Δ_m f|/max |f|` over interior vertices that are not corners of a
/// cell whose closed square contains one of `breakpoints`.
pub fn harmonic_residual(g: &GraphApprox, f: &FunctionOnGraph, breakpoints: &[(f64, f64)]) -> Result<f64> {
    let lap = g.laplacian_apply(f)?;
    let mut skip = vec![false; g.vertex_count()];
    for b in g.boundary_ids() {
        skip[b] = true;
    }
    let h = 1.0 / g.scale() as f64;
    let tol = 1e-12;
    for cell in g.cells() {
        let (x0, y0) = g.point(cell[0]);
        let hit = breakpoints
            .iter()
            .any(|&(px, py)| px >= x0 - tol && px <= x0 + h + tol && py >= y0 - tol && py <= y0 + h + tol);
        if hit {
            for &v in cell {
                skip[v] = true;
            }
        }
    }
    let scale = f.values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    Ok(lap
        .values
        .iter()
        .zip(&skip)
        .filter(|(_, &s)| !s)
        .fold(0.0f64, |a, (v, _)| a.max(v.abs()))
        / scale)
}

/// Residuals of the three defining relations at `q₀`, `z` and `y` for the
/// closed-form values `a = G(q₀, y)`, `b = G(z, y)`, `c = G(y, y)`, where `y`
/// hangs at distance `t` off the cross at `d′ = s`.
pub fn green_verify(s: f64, t: f64) -> Result<[f64; 3]> {
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid(format!("s = {s} must lie strictly between 0 and 1")));
    }
    if !(t >= 0.0) {
        return Err(invalid(format!("t = {t} is negative")));
    }
    let arm = 0;
    let path = if t > 0.0 { vec![Leg { dir: 1, len: t }] } else { vec![] };
    let y = SkeletonPoint {
        arm,
        s,
        offset: t,
        branch_path: Some(path),
    };
    let a = green_eval(&SkeletonPoint::on_arm(arm, 0.0), &y)?;
    let b = green_eval(&SkeletonPoint::on_arm(arm, s), &y)?;
    let c = green_eval(&y, &y)?;
    let r1 = 3.0 * a + (a - b) / s;
    if t > 0.0 {
        Ok([r1, (b - a) / s + b / (1.0 - s) + (b - c) / t, (c - b) / t - 1.0])
    } else {
        Ok([r1, (b - a) / s + b / (1.0 - s) - 1.0, c - b])
    }
}
