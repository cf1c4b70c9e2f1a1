//! Heat, wave and projection kernels from the enumerated spectrum.
//!
//! Kernels sourced at `q₀` only see the 0-series, since every 4/3-series
//! eigenfunction vanishes there. Integrals against `μ` are weighted vertex
//! sums on `V_M`, where the eigenfunctions are exact.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::decimation::{DecimationSystem, EigenvalueRecord, Series, SpectrumTable};
use crate::eigenfunc::{for_each_zero_series, GraphLadder};
use crate::error::{invalid, Result};
use crate::vsgraph::{Diagonal, GraphApprox};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    Heat,
    Wave,
}

/// A kernel sampled on `V_M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelField {
    pub n: usize,
    pub level: usize,
    /// Time, for heat and wave fields.
    pub time: Option<f64>,
    /// Spectral depth of the records included.
    pub depth: usize,
    pub values: Vec<f64>,
    /// The kernel at the source point.
    pub source_value: f64,
    /// For heat: `Σ m(λ) e^{−tλ}` over the records of the next depth that
    /// were left out. Wave sums have no such bound.
    pub tail_bound: Option<f64>,
}

impl KernelField {
    /// `H(t, x) = h(t, q₀, x) / h(t, q₀, q₀)`.
    pub fn normalized(&self) -> Vec<f64> {
        self.values.iter().map(|v| v / self.source_value).collect()
    }
}

/// `∫ f dμ` as the weighted vertex sum on `g`.
pub fn integrate(g: &GraphApprox, f: &[f64]) -> f64 {
    (0..g.vertex_count()).map(|x| g.weight(x) * f[x]).sum()
}

/// `∫ |f| dμ`.
pub fn integrate_abs(g: &GraphApprox, f: &[f64]) -> f64 {
    (0..g.vertex_count()).map(|x| g.weight(x) * f[x].abs()).sum()
}

/// `sin(√λ t)/√λ`, with the series form when `λt²` is tiny.
pub fn sinc_propagator(lam: f64, t: f64) -> f64 {
    if lam * t * t < 1e-8 {
        t * (1.0 - lam * t * t / 6.0)
    } else {
        let r = lam.sqrt();
        (r * t).sin() / r
    }
}

fn time_factor(kind: KernelKind, lam: f64, t: f64) -> f64 {
    match kind {
        KernelKind::Heat => (-t * lam).exp(),
        KernelKind::Wave => sinc_propagator(lam, t),
    }
}

fn heat_tail(sys: &DecimationSystem, table: &SpectrumTable, t: f64) -> Result<f64> {
    let next = sys.enumerate_spectrum(table.depth() + 1)?;
    let top = table.max_value();
    Ok(next
        .records()
        .iter()
        .filter(|r| r.value > top * (1.0 + 1e-12))
        .map(|r| r.multiplicity as f64 * (-t * r.value).exp())
        .sum())
}

/// Center-sourced kernels at several times, sharing one pass over the
/// 0-series eigenfunctions on `V_M`.
pub fn center_kernels(
    sys: &DecimationSystem,
    ladder: &GraphLadder,
    kind: KernelKind,
    times: &[f64],
    m: usize,
    k: usize,
) -> Result<Vec<KernelField>> {
    for &t in times {
        let ok = match kind {
            KernelKind::Heat => t > 0.0,
            KernelKind::Wave => t >= 0.0,
        };
        if !ok || !t.is_finite() {
            return Err(invalid(format!("time {t} is not admissible")));
        }
    }
    if m < k {
        return Err(invalid(format!("level M = {m} must be at least the depth k = {k}")));
    }
    if m > ladder.top() {
        return Err(invalid(format!("level {m} exceeds the ladder top {}", ladder.top())));
    }
    let table = sys.enumerate_spectrum(k)?;
    let nv = ladder.at(m).vertex_count();
    let mut values = vec![vec![0.0; nv]; times.len()];
    let mut source = vec![0.0; times.len()];
    for_each_zero_series(sys, ladder, table.records(), m, |rec, u, c, _| {
        for (i, &t) in times.iter().enumerate() {
            let w = time_factor(kind, rec.value, t) * c;
            source[i] += w * c;
            values[i].iter_mut().zip(u).for_each(|(v, x)| *v += w * x);
        }
        Ok(())
    })?;
    times
        .iter()
        .zip(values)
        .zip(source)
        .map(|((&t, values), source_value)| {
            Ok(KernelField {
                n: sys.n(),
                level: m,
                time: Some(t),
                depth: k,
                values,
                source_value,
                tail_bound: match kind {
                    KernelKind::Heat => Some(heat_tail(sys, &table, t)?),
                    KernelKind::Wave => None,
                },
            })
        })
        .collect()
}

/// `h(t, q₀, ·)` on `V_M` from the 0-series through depth `k`.
pub fn heat_center(
    sys: &DecimationSystem,
    ladder: &GraphLadder,
    t: f64,
    m: usize,
    k: usize,
) -> Result<KernelField> {
    Ok(center_kernels(sys, ladder, KernelKind::Heat, &[t], m, k)?.remove(0))
}

/// `W(t, q₀, ·) = Σ sin(√λ t)/√λ · u(q₀) u(·)`.
pub fn wave_center(
    sys: &DecimationSystem,
    ladder: &GraphLadder,
    t: f64,
    m: usize,
    k: usize,
) -> Result<KernelField> {
    Ok(center_kernels(sys, ladder, KernelKind::Wave, &[t], m, k)?.remove(0))
}

/// `h(t, q₀, q₀)` at many times. Only center values are needed.
pub fn heat_center_diagonal(
    sys: &DecimationSystem,
    ladder: &GraphLadder,
    times: &[f64],
    k: usize,
) -> Result<Vec<f64>> {
    let table = sys.enumerate_spectrum(k)?;
    let mut out = vec![0.0; times.len()];
    for_each_zero_series(sys, ladder, table.records(), k, |rec, _, c, _| {
        for (o, &t) in out.iter_mut().zip(times) {
            *o += (-t * rec.value).exp() * c * c;
        }
        Ok(())
    })?;
    Ok(out)
}

/// Largest `|H(t, x) − H(t/ρ, F₀x)|` over diagonal vertices `x` of `V_{M−1}`,
/// where `F₀` is the central contraction.
pub fn heat_scaling_deviation(
    sys: &DecimationSystem,
    ladder: &GraphLadder,
    t: f64,
    m: usize,
    k: usize,
) -> Result<f64> {
    if m == 0 {
        return Err(invalid("the scaling comparison needs M ≥ 1"));
    }
    let rho = sys.rho();
    let f = center_kernels(sys, ladder, KernelKind::Heat, &[t, t / rho], m, k)?;
    let (h1, h2) = (f[0].normalized(), f[1].normalized());
    let coarse = ladder.at(m - 1);
    let fine = ladder.at(m);
    // The central letter is 0, so cell c of Γ_{M−1} maps to cell c of Γ_M.
    let mut f0 = vec![usize::MAX; coarse.vertex_count()];
    for (c, cs) in coarse.cells().iter().enumerate() {
        for (kk, &v) in cs.iter().enumerate() {
            f0[v] = fine.cells()[c][kk];
        }
    }
    Ok(coarse
        .diagonal_vertices(Diagonal::Full)
        .into_iter()
        .map(|x| (h1[x] - h2[f0[x]]).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub t: f64,
    pub trace: f64,
    /// `t^α · trace`.
    pub scaled: f64,
}

/// `Σ m(λ) e^{−tλ}` over every record of the table.
pub fn heat_trace(table: &SpectrumTable, alpha: f64, ts: &[f64]) -> Result<Vec<TracePoint>> {
    if ts.iter().any(|&t| !(t > 0.0)) {
        return Err(invalid("trace times must be positive"));
    }
    Ok(ts
        .iter()
        .map(|&t| {
            let trace: f64 = table
                .records()
                .iter()
                .map(|r| r.multiplicity as f64 * (-t * r.value).exp())
                .sum();
            TracePoint {
                t,
                trace,
                scaled: t.powf(alpha) * trace,
            }
        })
        .collect())
}

/// `y ≈ a + b sin(c log t + d)` with `b ≥ 0` and `d ∈ (−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinusoidFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub rms: f64,
}

fn linear_fit(pts: &[(f64, f64)], c: f64) -> (f64, [f64; 3]) {
    // y ≈ p0 + p1 sin(c s) + p2 cos(c s), normal equations.
    let mut ata = nalgebra::Matrix3::<f64>::zeros();
    let mut aty = nalgebra::Vector3::<f64>::zeros();
    for &(s, y) in pts {
        let row = nalgebra::Vector3::new(1.0, (c * s).sin(), (c * s).cos());
        ata += row * row.transpose();
        aty += row * y;
    }
    let p = ata.lu().solve(&aty).unwrap_or_else(nalgebra::Vector3::zeros);
    let sse: f64 = pts
        .iter()
        .map(|&(s, y)| {
            let r = y - p[0] - p[1] * (c * s).sin() - p[2] * (c * s).cos();
            r * r
        })
        .sum();
    (sse, [p[0], p[1], p[2]])
}

/// Least squares for a log-periodic sinusoid: a scan over the frequency in
/// `[c_lo, c_hi]`, golden-section refinement, and the linear part solved
/// exactly at each frequency.
pub fn fit_log_sinusoid(points: &[(f64, f64)], c_lo: f64, c_hi: f64) -> Result<SinusoidFit> {
    if points.len() < 4 {
        return Err(invalid("a sinusoid fit needs at least 4 points"));
    }
    let pts: Vec<(f64, f64)> = points.iter().map(|&(t, y)| (t.ln(), y)).collect();
    let steps = 400;
    let mut best = (f64::INFINITY, c_lo);
    for i in 0..=steps {
        let c = c_lo + (c_hi - c_lo) * i as f64 / steps as f64;
        let (sse, _) = linear_fit(&pts, c);
        if sse < best.0 {
            best = (sse, c);
        }
    }
    let h = (c_hi - c_lo) / steps as f64;
    let (mut a, mut b) = ((best.1 - h).max(c_lo), (best.1 + h).min(c_hi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if linear_fit(&pts, x1).0 < linear_fit(&pts, x2).0 {
            b = x2;
        } else {
            a = x1;
        }
    }
    let c = 0.5 * (a + b);
    let (sse, p) = linear_fit(&pts, c);
    // p1 sin + p2 cos = b sin(· + d).
    Ok(SinusoidFit {
        a: p[0],
        b: p[1].hypot(p[2]),
        c,
        d: p[2].atan2(p[1]),
        rms: (sse / pts.len() as f64).sqrt(),
    })
}

/// `K_k(x, ·)` with its integrals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionKernel {
    pub n: usize,
    pub segment: usize,
    pub level: usize,
    pub source: usize,
    pub values: Vec<f64>,
    pub integral: f64,
    pub abs_integral: f64,
}

/// Unit-norm 0-series eigenfunctions through depth `k` on `V_M`.
pub fn zero_series_basis(
    sys: &DecimationSystem,
    ladder: &GraphLadder,
    k: usize,
    m: usize,
) -> Result<Vec<(EigenvalueRecord, Vec<f64>)>> {
    let table = sys.enumerate_spectrum(k)?;
    let mut out = Vec::new();
    for_each_zero_series(sys, ladder, table.records(), m, |r, u, _, _| {
        out.push((r.clone(), u.to_vec()));
        Ok(())
    })?;
    Ok(out)
}

fn check_projection(sys: &DecimationSystem, ladder: &GraphLadder, k: usize, m: usize) -> Result<()> {
    if k == 0 {
        return Err(invalid("segment index must be at least 1"));
    }
    if m < k || m > ladder.top() {
        return Err(invalid(format!("level {m} must lie in {k}..={}", ladder.top())));
    }
    let nv = ladder.at(m).vertex_count() as u64;
    let dim = sys.enumerate_spectrum(k)?.records().iter().filter(|r| r.series == Series::Zero).count() as u64;
    crate::limits::check("projection kernel", nv.saturating_mul(dim), 200_000_000)
}

pub fn projection_kernel(
    sys: &DecimationSystem,
    ladder: &GraphLadder,
    k: usize,
    x: usize,
    m: usize,
) -> Result<ProjectionKernel> {
    check_projection(sys, ladder, k, m)?;
    let g = ladder.at(m);
    if x >= g.vertex_count() {
        return Err(invalid(format!("vertex {x} out of range")));
    }
    let basis = zero_series_basis(sys, ladder, k, m)?;
    let mut values = vec![0.0; g.vertex_count()];
    for (_, u) in &basis {
        let c = u[x];
        values.iter_mut().zip(u).for_each(|(v, y)| *v += c * y);
    }
    Ok(ProjectionKernel {
        n: sys.n(),
        segment: k,
        level: m,
        source: x,
        integral: integrate(g, &values),
        abs_integral: integrate_abs(g, &values),
        values,
    })
}

/// `max_x ∫|K_k(x, y)| dμ(y)` over sources `x ∈ V_M`, with the maximizer.
/// Sources related by an arm permutation give the same value, so only one
/// quarter of the square is scanned.
pub fn max_abs_projection(
    sys: &DecimationSystem,
    ladder: &GraphLadder,
    k: usize,
    m: usize,
) -> Result<(usize, f64)> {
    use rayon::prelude::*;
    check_projection(sys, ladder, k, m)?;
    let g = ladder.at(m);
    let basis = zero_series_basis(sys, ladder, k, m)?;
    let s = g.scale();
    let sources: Vec<usize> = (0..g.vertex_count())
        .filter(|&v| {
            let (x, y) = g.coords()[v];
            2 * x <= s && 2 * y <= s && y <= x
        })
        .collect();
    let best = sources
        .par_iter()
        .map(|&x| {
            let mut kx = vec![0.0; g.vertex_count()];
            for (_, u) in &basis {
                let c = u[x];
                kx.iter_mut().zip(u).for_each(|(v, y)| *v += c * y);
            }
            (x, integrate_abs(g, &kx))
        })
        .reduce(
            || (usize::MAX, f64::NEG_INFINITY),
            |a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a },
        );
    Ok(best)
}

/// A superlevel set `{x : f(x) ≥ s}` with its component count in `Γ_M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub vertices: Vec<usize>,
    pub components: usize,
}

pub fn heatball(g: &GraphApprox, f: &[f64], s: f64) -> Region {
    let inside: Vec<bool> = f.iter().map(|&v| v >= s).collect();
    let vertices: Vec<usize> = (0..f.len()).filter(|&x| inside[x]).collect();
    let mut seen = vec![false; f.len()];
    let mut components = 0;
    for &start in &vertices {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        let mut q = VecDeque::from([start]);
        while let Some(x) = q.pop_front() {
            for &y in g.neighbors(x) {
                if inside[y] && !seen[y] {
                    seen[y] = true;
                    q.push_back(y);
                }
            }
        }
    }
    Region {
        vertices,
        components,
    }
}

/// Largest skeleton distance `|x|` from `q₀` with `|f(x)| ≥ ε`, optionally
/// over diagonal vertices only; 0 when no vertex qualifies.
pub fn abs_width(g: &GraphApprox, f: &[f64], eps: f64, diagonal_only: bool) -> f64 {
    let d = g.center_distances();
    let candidates: Vec<usize> = if diagonal_only {
        g.diagonal_vertices(Diagonal::Full)
    } else {
        (0..g.vertex_count()).collect()
    };
    candidates
        .into_iter()
        .filter(|&x| f[x].abs() >= eps)
        .map(|x| d[x])
        .fold(0.0, f64::max)
}
