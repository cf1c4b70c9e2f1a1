//! Ratio-gap certificates and constructive eigenvalue clusters.
//!
//! Every eigenvalue is `ρ^k ψ_n(x)` with `x` in the union over words `w` of
//! length `ℓ` of `φ_w([0, q] ∪ {4/3})`, where `q = φ_{2n−1}(4/3)`; for words
//! ending in 1 only the two endpoint images can occur. Ratios of eigenvalues
//! therefore lie in the union of the scaled quotient intervals, and whatever
//! of `[1, ρ]` those miss is a certified ratio gap.

use std::sync::atomic::{AtomicBool, Ordering};

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decimation::DecimationSystem;
use crate::error::{invalid, Result, VsError};
use crate::limits::{self, limits};

/// Outward slack applied to each covering interval.
pub const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntervalKind {
    /// `φ_w([0, q])`.
    Range,
    /// `{φ_w(0)}`.
    ZeroImage,
    /// `{φ_w(4/3)}`.
    FourThirdsImage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioInterval {
    /// `ψ_n` of the graph interval, `lo ≤ hi`.
    pub lo: f64,
    pub hi: f64,
    pub graph_lo: f64,
    pub graph_hi: f64,
    pub word: Vec<u16>,
    pub kind: IntervalKind,
}

/// One scaled quotient interval `ρ^r [ψ(a_i)/ψ(b_j), ψ(b_i)/ψ(a_j)] ∩ [1, ρ]`
/// before slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cover {
    pub lo: f64,
    pub hi: f64,
    pub i: usize,
    pub j: usize,
    pub r: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub lo: f64,
    pub hi: f64,
    /// The covering interval ending at `lo` and the one starting at `hi`.
    pub left: Option<Cover>,
    pub right: Option<Cover>,
}

impl Gap {
    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapCertificate {
    pub n: usize,
    pub ell: usize,
    pub gaps: Vec<Gap>,
    pub covering_interval_count: usize,
}

impl GapCertificate {
    pub fn gap_containing(&self, x: f64) -> Option<&Gap> {
        self.gaps.iter().find(|g| g.contains(x))
    }
}

fn zero_admissible(w: &[u16]) -> bool {
    w.iter().find(|&&j| j != 1).is_none_or(|&j| j % 2 == 1)
}

/// `φ_w(x)`, or `None` if some intermediate value is forbidden.
fn follow(sys: &DecimationSystem, w: &[u16], x: f64) -> Result<Option<f64>> {
    let mut v = x;
    for &j in w {
        v = sys.branch(j as usize, v)?;
        if sys.forbidden_near(v).is_some() {
            return Ok(None);
        }
    }
    Ok(Some(v))
}

/// The graph-level pieces contributed by one word, before `ψ_n`. A word
/// ending in 1 can only be reached from a birth value directly, so it
/// contributes the two singletons that avoid forbidden values; any other
/// word contributes the image of `[0, q]` and of `4/3`.
fn word_pieces(sys: &DecimationSystem, w: &[u16], q: f64) -> Result<Vec<(f64, f64, IntervalKind)>> {
    let mut out = Vec::with_capacity(2);
    if w.last() == Some(&1) {
        if let Some(v) = follow(sys, w, 0.0)? {
            if v > 0.0 {
                out.push((v, v, IntervalKind::ZeroImage));
            }
        }
        if let Some(v) = follow(sys, w, 4.0 / 3.0)? {
            out.push((v, v, IntervalKind::FourThirdsImage));
        }
    } else {
        let a = sys.apply_word(w, 0.0)?;
        let b = sys.apply_word(w, q)?;
        out.push((a.min(b), a.max(b), IntervalKind::Range));
        let v = sys.apply_word(w, 4.0 / 3.0)?;
        out.push((v, v, IntervalKind::FourThirdsImage));
    }
    Ok(out)
}

fn check_words(sys: &DecimationSystem, ell: usize) -> Result<u64> {
    if ell == 0 {
        return Err(invalid("word length ℓ must be at least 1"));
    }
    let count = limits::sat_pow(sys.num_branches() as u64, ell);
    limits::check("ratio words (use gap_containing for a single point)", count, limits().max_records)?;
    Ok(count)
}

fn word_at(index: u64, ell: usize, nb: u16) -> Vec<u16> {
    let mut w = vec![1u16; ell];
    let mut r = index;
    for slot in w.iter_mut().rev() {
        *slot = 1 + (r % nb as u64) as u16;
        r /= nb as u64;
    }
    w
}

pub fn ratio_intervals(sys: &DecimationSystem, ell: usize) -> Result<Vec<RatioInterval>> {
    let count = check_words(sys, ell)?;
    let nb = sys.num_branches() as u16;
    let q = sys.fixed_points().q;
    let per_word: Vec<Vec<RatioInterval>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let w = word_at(i, ell, nb);
            word_pieces(sys, &w, q)?
                .into_iter()
                .map(|(a, b, kind)| {
                    Ok(RatioInterval {
                        lo: sys.psi(a)?,
                        hi: sys.psi(b)?,
                        graph_lo: a,
                        graph_hi: b,
                        word: w.clone(),
                        kind,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_word.into_iter().flatten().collect())
}

/// The integer range of `r` for which `ρ^r [lo, hi]` can meet `[1, ρ]`.
fn r_range(lo: f64, hi: f64, rho: f64) -> std::ops::RangeInclusive<i32> {
    let lr = rho.ln();
    let a = (-(hi.ln()) / lr).floor() as i32 - 1;
    let b = ((rho / lo).ln() / lr).floor() as i32 + 1;
    a..=b
}

fn for_each_cover(ai: f64, bi: f64, aj: f64, bj: f64, rho: f64, mut f: impl FnMut(f64, f64, i32)) {
    let (lo, hi) = (ai / bj, bi / aj);
    for r in r_range(lo, hi, rho) {
        let s = rho.powi(r);
        let (l, h) = (lo * s, hi * s);
        if h >= 1.0 && l <= rho {
            f(l.max(1.0), h.min(rho), r);
        }
    }
}

fn smallest_positive(ivs: &[RatioInterval]) -> f64 {
    ivs.iter()
        .map(|iv| iv.lo)
        .filter(|&v| v > 0.0)
        .fold(f64::INFINITY, f64::min)
}

pub fn ratio_gaps(sys: &DecimationSystem, ell: usize) -> Result<GapCertificate> {
    let ivs = ratio_intervals(sys, ell)?;
    let rho = sys.rho();
    let floor = smallest_positive(&ivs);
    let ends: Vec<(f64, f64)> = ivs.iter().map(|iv| (iv.lo.max(floor), iv.hi)).collect();
    let mut covers: Vec<Cover> = (0..ends.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut out = Vec::new();
            for (j, &(aj, bj)) in ends.iter().enumerate() {
                for_each_cover(ends[i].0, ends[i].1, aj, bj, rho, |lo, hi, r| {
                    out.push(Cover { lo, hi, i, j, r });
                });
            }
            out
        })
        .collect();
    covers.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
    let mut gaps = Vec::new();
    let mut cur = 1.0;
    let mut last: Option<Cover> = None;
    for c in &covers {
        let (l, h) = (c.lo * (1.0 - SLACK), c.hi * (1.0 + SLACK));
        if l > cur {
            gaps.push(Gap {
                lo: cur,
                hi: l,
                left: last,
                right: Some(*c),
            });
        }
        if h > cur {
            cur = h;
            last = Some(*c);
        }
    }
    if cur < rho {
        gaps.push(Gap {
            lo: cur,
            hi: rho,
            left: last,
            right: None,
        });
    }
    Ok(GapCertificate {
        n: sys.n(),
        ell,
        gaps,
        covering_interval_count: covers.len(),
    })
}

/// The certified gap around `point`, streaming over word pairs so that
/// memory stays `O(ℓ)`.
pub fn gap_containing(sys: &DecimationSystem, ell: usize, point: f64) -> Result<Option<(f64, f64)>> {
    let rho = sys.rho();
    if !(1.0..=rho).contains(&point) {
        return Err(invalid(format!("point {point} is outside [1, {rho}]")));
    }
    let count = check_words(sys, ell)?;
    let nb = sys.num_branches() as u16;
    let q = sys.fixed_points().q;
    let pieces = |i: u64| -> Result<Vec<(f64, f64)>> {
        word_pieces(sys, &word_at(i, ell, nb), q)?
            .into_iter()
            .map(|(a, b, _)| Ok((sys.psi(a)?, sys.psi(b)?)))
            .collect()
    };
    // The smallest positive endpoint replaces a zero lower end.
    let mut floor = f64::INFINITY;
    for i in 0..count {
        for (a, _) in pieces(i)? {
            if a > 0.0 {
                floor = floor.min(a);
            }
        }
    }
    // `None` marks a covering interval that contains the point.
    let covered = AtomicBool::new(false);
    let bounds = (0..count)
        .into_par_iter()
        .map(|i| -> Result<Option<(f64, f64)>> {
            if covered.load(Ordering::Relaxed) {
                return Ok(None);
            }
            let mut lo = 1.0f64;
            let mut hi = rho;
            for (ai, bi) in pieces(i)? {
                for j in 0..count {
                    for (aj, bj) in pieces(j)? {
                        let mut hit = false;
                        for_each_cover(ai.max(floor), bi, aj.max(floor), bj, rho, |l, h, _| {
                            let (l, h) = (l * (1.0 - SLACK), h * (1.0 + SLACK));
                            if l <= point && point <= h {
                                hit = true;
                            } else if h < point {
                                lo = lo.max(h);
                            } else {
                                hi = hi.min(l);
                            }
                        });
                        if hit {
                            covered.store(true, Ordering::Relaxed);
                            return Ok(None);
                        }
                    }
                }
            }
            Ok(Some((lo, hi)))
        })
        .try_reduce(
            || Some((1.0f64, rho)),
            |a, b| Ok(a.zip(b).map(|(a, b)| (a.0.max(b.0), a.1.min(b.1)))),
        )?;
    let Some((lo, hi)) = bounds else {
        return Ok(None);
    };
    if lo >= hi {
        return Ok(None);
    }
    Ok(Some((lo, hi)))
}

/// Brings a ratio into `[1, ρ)` by powers of `ρ`.
pub fn reduce_ratio(x: f64, rho: f64) -> f64 {
    let mut v = x;
    while v >= rho {
        v /= rho;
    }
    while v < 1.0 {
        v *= rho;
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusteringCertificate {
    pub n: usize,
    /// Largest fixed point of `R` in `(0, 4/3)`.
    pub t: f64,
    pub rprime: f64,
    pub rho: f64,
    pub certified: bool,
}

pub fn clustering_certificate(sys: &DecimationSystem) -> ClusteringCertificate {
    let t = sys.fixed_points().t_max;
    let rprime = sys.eval_r(t).1;
    ClusteringCertificate {
        n: sys.n(),
        t,
        rprime,
        rho: sys.rho(),
        certified: rprime.abs() > sys.rho(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterMember {
    /// Seed word followed by `repeats` copies of the top branch.
    pub seed: Vec<u16>,
    pub repeats: usize,
    /// `λ − ρ^K ψ_n(t)`.
    pub offset: f64,
}

impl ClusterMember {
    pub fn word(&self, nb: u16) -> Vec<u16> {
        let mut w = self.seed.clone();
        w.extend(std::iter::repeat_n(nb, self.repeats));
        w
    }
}

/// Distinct 0-series eigenvalues `ρ^K ψ_n(x_p)` within `ε` of each other.
/// They share the huge base `ρ^K ψ_n(t)` and are resolved by their offsets,
/// which are tracked as distances to the fixed point `t` through a Taylor
/// expansion of `R` at `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterDemo {
    pub n: usize,
    /// `K = |w|`, the power of `ρ`.
    pub exponent: usize,
    pub t: f64,
    pub base: f64,
    /// Ascending by offset.
    pub members: Vec<ClusterMember>,
    pub spread: f64,
}

impl ClusterDemo {
    /// Eigenvalues as `f64`; they coincide once `spread` is below the
    /// resolution of `base`.
    pub fn values(&self) -> Vec<f64> {
        self.members.iter().map(|m| self.base + m.offset).collect()
    }
}

/// Taylor coefficients of `R` at `t`, `c[k] = R^{(k)}(t)/k!`.
fn taylor_at(sys: &DecimationSystem, t: f64) -> Vec<f64> {
    let mut c: Vec<f64> = sys
        .exact()
        .r
        .iter()
        .map(|x| x.to_f64().unwrap_or(f64::NAN))
        .collect();
    let d = c.len();
    for i in 0..d {
        for k in (i..d - 1).rev() {
            c[k] += t * c[k + 1];
        }
    }
    c
}

/// `z` with `R(t + z) − t = y` near `z = 0`.
fn offset_step(c: &[f64], y: f64) -> f64 {
    let mut z = y / c[1];
    for _ in 0..8 {
        let mut f = 0.0;
        let mut fp = 0.0;
        for k in (1..c.len()).rev() {
            f = f * z + c[k];
            fp = fp * z + k as f64 * c[k];
        }
        // f currently holds Σ c_k z^{k−1}; fp holds Σ k c_k z^{k−1}.
        let g = f * z - y;
        let step = g / fp;
        z -= step;
        if step.abs() <= 1e-17 * z.abs() {
            break;
        }
    }
    z
}

pub fn cluster_demo(sys: &DecimationSystem, count: usize, eps: f64) -> Result<ClusterDemo> {
    if count == 0 || !(eps > 0.0) {
        return Err(invalid("count must be positive and ε > 0"));
    }
    let cert = clustering_certificate(sys);
    if !cert.certified {
        return Err(invalid(format!("clustering is not certified for n = {}", sys.n())));
    }
    let nb = sys.num_branches() as u16;
    let t = cert.t;
    // Seeds: the smallest admissible 0-series words of a common length.
    let mut m = 0;
    let seeds: Vec<(Vec<u16>, f64)> = loop {
        let mut found = Vec::new();
        crate::decimation::for_each_word(m, nb, |w| {
            if found.len() < count && zero_admissible(w) {
                found.push(w.to_vec());
            }
        });
        if found.len() >= count {
            let mut s = found
                .into_iter()
                .map(|w| Ok((sys.apply_word(&w, 0.0)?, w)))
                .collect::<Result<Vec<_>>>()?;
            s.sort_by(|a, b| a.0.total_cmp(&b.0));
            break s.into_iter().map(|(v, w)| (w, v)).collect();
        }
        m += 1;
        if m > 40 {
            return Err(invalid("too many seeds requested"));
        }
    };
    let rho = sys.rho();
    let c = taylor_at(sys, t);
    let psi_t = sys.psi(t)?;
    let dpsi = sys.psi_prime(t)?;
    // Plain iteration until every seed is near t, then offsets.
    let mut x: Vec<f64> = seeds.iter().map(|s| s.1).collect();
    let mut j = 0usize;
    loop {
        for v in x.iter_mut() {
            *v = sys.branch(nb as usize, *v)?;
        }
        j += 1;
        if x.iter().all(|v| (v - t).abs() < 1e-4) {
            break;
        }
        if j > 200 {
            return Err(VsError::NoConvergence("cluster seeds do not approach t".into()));
        }
    }
    let mut y: Vec<f64> = x.iter().map(|v| v - t).collect();
    loop {
        let k = (m + j) as i32;
        let scale = rho.powi(k) * dpsi;
        let offsets: Vec<f64> = y.iter().map(|v| scale * v).collect();
        let lo = offsets.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = offsets.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let spread = hi - lo;
        let resolved = offsets.iter().all(|o| o.is_finite())
            && y.windows(2).all(|p| p[0] != p[1])
            && y.iter().all(|v| v.abs() > f64::MIN_POSITIVE * 1e10);
        if spread <= eps && resolved {
            let mut members: Vec<ClusterMember> = seeds
                .iter()
                .zip(&offsets)
                .map(|((w, _), &o)| ClusterMember {
                    seed: w.clone(),
                    repeats: j,
                    offset: o,
                })
                .collect();
            members.sort_by(|a, b| a.offset.total_cmp(&b.offset));
            return Ok(ClusterDemo {
                n: sys.n(),
                exponent: m + j,
                t,
                base: rho.powi(k) * psi_t,
                members,
                spread,
            });
        }
        if !resolved || j > 2000 {
            return Err(VsError::NoConvergence(format!(
                "cluster spread {spread:e} could not be brought below {eps:e} in double precision"
            )));
        }
        for v in y.iter_mut() {
            *v = offset_step(&c, *v);
        }
        j += 1;
    }
}
