//! Counting function and Weyl ratios, the one-arm reduction of the level-1
//! eigenvalue equation, convergence towards the cross, and bounds on `ψ_n`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::decimation::{bisect, DecimationSystem, SpectrumTable};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylSample {
    pub x: f64,
    pub count: u64,
    /// `N(x) / x^α`.
    pub weyl: f64,
    /// `(log x − log λ₁) / log ρ`.
    pub s: f64,
}

fn first_positive(table: &SpectrumTable) -> Result<f64> {
    table
        .records()
        .iter()
        .map(|r| r.value)
        .find(|&v| v > 0.0)
        .ok_or_else(|| invalid("the table has no positive eigenvalue"))
}

/// `N` and `W` on a grid inside the enumerated range.
pub fn counting_and_weyl(sys: &DecimationSystem, table: &SpectrumTable, xs: &[f64]) -> Result<Vec<WeylSample>> {
    let top = table.max_value();
    let alpha = sys.params().alpha();
    let lam1 = first_positive(table)?;
    let rho = sys.rho();
    xs.iter()
        .map(|&x| {
            if !(x > 0.0) || x > top {
                return Err(invalid(format!(
                    "x = {x} is outside the enumerated range (0, {top}]"
                )));
            }
            let count = table.counting(x);
            Ok(WeylSample {
                x,
                count,
                weyl: count as f64 / x.powf(alpha),
                s: (x.ln() - lam1.ln()) / rho.ln(),
            })
        })
        .collect()
}

/// `w̃(s) ≈ W(λ₁ ρ^{s+K})` with `K` the deepest shift whose whole period
/// `s ∈ [s_min, s_max]` stays inside the table.
pub fn normalized_weyl(sys: &DecimationSystem, table: &SpectrumTable, ss: &[f64]) -> Result<(i32, Vec<(f64, f64)>)> {
    let lam1 = first_positive(table)?;
    let rho = sys.rho();
    let smax = ss.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let kk = ((table.max_value() / lam1).ln() / rho.ln() - smax).floor() as i32;
    if kk < 0 {
        return Err(invalid("the table is too shallow for this s range"));
    }
    let alpha = sys.params().alpha();
    Ok((
        kk,
        ss.iter()
            .map(|&s| {
                let x = lam1 * rho.powf(s + kk as f64);
                (s, table.counting(x) as f64 / x.powf(alpha))
            })
            .collect(),
    ))
}

/// The limit values of the Weyl ratio at `λ_{2j−1}` (a 4/3-series value born
/// on level 0), just below it, and at `λ_{2j}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylLemma {
    pub j: usize,
    pub lambda_odd: f64,
    pub lambda_even: f64,
    pub alpha: f64,
    /// Integer numerators `4j−3`, `4j−1`, `4j`.
    pub numerators: [u64; 3],
    pub w_below: f64,
    pub w_at: f64,
    pub w_even: f64,
    /// `s`-intervals of the two plateaus around `s = 0` (for `j = 1`):
    /// `w̃ = 1/(λ₁^α ρ^{αs})` on the first, `3/(λ₁^α ρ^{αs})` on the second.
    pub plateau_below: (f64, f64),
    pub plateau_above: (f64, f64),
}

pub fn weyl_special_values(sys: &DecimationSystem, j: usize) -> Result<WeylLemma> {
    let n = sys.n();
    if j == 0 || j > n - 1 {
        return Err(invalid(format!("j = {j} must lie in 1..={}", n - 1)));
    }
    let rho = sys.rho();
    let alpha = sys.params().alpha();
    let lambda_odd = rho * sys.psi(sys.branch(2 * j - 1, 4.0 / 3.0)?)?;
    let lambda_even = rho * sys.psi(sys.branch(2 * j + 1, 0.0)?)?;
    let numerators = [4 * j as u64 - 3, 4 * j as u64 - 1, 4 * j as u64];
    let lam1 = sys.psi(4.0 / 3.0)?;
    let p = sys.fixed_points().p;
    let lp = rho.ln();
    let below = -((lam1.ln() - sys.psi(p)?.ln()) / lp);
    let above = (lp + sys.psi(sys.branch(2, p)?)?.ln() - lam1.ln()) / lp;
    Ok(WeylLemma {
        j,
        lambda_odd,
        lambda_even,
        alpha,
        numerators,
        w_below: numerators[0] as f64 / lambda_odd.powf(alpha),
        w_at: numerators[1] as f64 / lambda_odd.powf(alpha),
        w_even: numerators[2] as f64 / lambda_even.powf(alpha),
        plateau_below: (below, 0.0),
        plateau_above: (0.0, above),
    })
}

/// `w̃_n(0) = 3/λ₁^α`; tends to `3√3/π`.
pub fn weyl_at_zero(sys: &DecimationSystem) -> Result<f64> {
    Ok(3.0 / sys.psi(4.0 / 3.0)?.powf(sys.params().alpha()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArmSeries {
    /// Symmetric across the four arms; `G₁₁` depends on `λ₁`.
    Zero,
    /// Arm values sum to zero: `(3 − 6λ₁)u(x₁) = u(x₂)`.
    FourThirds,
    /// The path `x₁…x_n` doubled with odd symmetry.
    IntervalOdd,
    /// The path doubled with even symmetry: `(1 − 6λ̃)ũ(x₁) = ũ(x₂)`.
    IntervalEven,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmEigenpair {
    /// Level-1 eigenvalue `λ₁`; the matrix eigenvalue is `3λ₁`.
    pub lambda: f64,
    /// `u(x_1), …, u(x_n)`, scaled to `u(x₁) > 0` and max modulus 1.
    pub vector: Vec<f64>,
    /// The reduction divides by `2 − 3λ₁`, so `λ₁ = 2/3` is not a
    /// solution of the original equation.
    pub spurious: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmSystem {
    pub n: usize,
    pub series: ArmSeries,
    /// Row-major `n×n` tridiagonal `E` (with `E₁₁ = 3/2` for the odd and
    /// 4/3 cases).
    pub e: Vec<Vec<f64>>,
    /// Diagonal of `G̃`; for the 0-series `G₁₁` is replaced by
    /// `(3λ−3)/(3λ−4)` at each eigenvalue.
    pub g: Vec<f64>,
    pub eigenpairs: Vec<ArmEigenpair>,
}

fn arm_e(n: usize, odd: bool) -> DMatrix<f64> {
    let mut e = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        e[(k, k)] = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        if k + 1 < n {
            e[(k, k + 1)] = -0.5;
            e[(k + 1, k)] = -0.5;
        }
    }
    if odd {
        e[(0, 0)] += 1.0;
    }
    e
}

fn arm_g(n: usize) -> Vec<f64> {
    (0..n).map(|k| if k == n - 1 { 0.5 } else { 1.0 }).collect()
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let m = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let s = if v[0] < 0.0 { -1.0 / m } else { 1.0 / m };
    v.iter_mut().for_each(|x| *x *= s);
    v
}

/// `(3λ − 4) det(E − 3λG(λ))` for the 0-series, a polynomial in `λ`.
fn zero_series_det(n: usize, lam: f64) -> f64 {
    let d_mid = 1.0 - 3.0 * lam;
    let d_last = 0.5 - 1.5 * lam;
    // Continuants from the bottom: p_{k} = d_k p_{k+1} − p_{k+2}/4.
    let (mut p1, mut p2) = (d_last, 1.0);
    for _ in 1..n - 1 {
        (p1, p2) = (d_mid * p1 - 0.25 * p2, p1);
    }
    let row1 = 0.5 * (3.0 * lam - 4.0) - 3.0 * lam * (3.0 * lam - 3.0);
    row1 * p1 - 0.25 * (3.0 * lam - 4.0) * p2
}

fn zero_series_vector(n: usize, lam: f64) -> Vec<f64> {
    let g11 = (3.0 * lam - 3.0) / (3.0 * lam - 4.0);
    let mut u = vec![1.0, 1.0 - 6.0 * lam * g11];
    for k in 1..n - 1 {
        let next = 2.0 * (1.0 - 3.0 * lam) * u[k] - u[k - 1];
        u.push(next);
    }
    u.truncate(n);
    normalize(u)
}

const SPURIOUS: f64 = 2.0 / 3.0;

pub fn arm_system(n: usize, series: ArmSeries) -> Result<ArmSystem> {
    if n < 2 {
        return Err(invalid("n must be at least 2"));
    }
    let g = arm_g(n);
    let odd = matches!(series, ArmSeries::FourThirds | ArmSeries::IntervalOdd);
    let e = arm_e(n, odd);
    let eigenpairs = match series {
        ArmSeries::Zero => {
            let f = |l: f64| zero_series_det(n, l);
            let steps = 4000 * n;
            let top = 4.0 / 3.0 - 1e-9;
            let mut roots = vec![0.0];
            let mut prev = (1e-9, f(1e-9));
            for i in 1..=steps {
                let x = 1e-9 + (top - 1e-9) * i as f64 / steps as f64;
                let fx = f(x);
                if fx == 0.0 {
                    roots.push(x);
                } else if (fx > 0.0) != (prev.1 > 0.0) {
                    roots.push(bisect(prev.0, x, f));
                }
                prev = (x, fx);
            }
            roots
                .into_iter()
                .map(|l| ArmEigenpair {
                    lambda: l,
                    vector: zero_series_vector(n, l),
                    spurious: (l - SPURIOUS).abs() < 1e-9,
                })
                .collect()
        }
        _ => {
            let ginv = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                n,
                g.iter().map(|x| 1.0 / x.sqrt()),
            ));
            let eig = SymmetricEigen::new(&ginv * &e * &ginv);
            let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
                .map(|i| {
                    let y = eig.eigenvectors.column(i);
                    let v: Vec<f64> = (0..n).map(|k| y[k] * ginv[(k, k)]).collect();
                    (eig.eigenvalues[i] / 3.0, normalize(v))
                })
                .collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            pairs
                .into_iter()
                .map(|(lambda, vector)| ArmEigenpair {
                    lambda,
                    vector,
                    spurious: series == ArmSeries::FourThirds && (lambda - SPURIOUS).abs() < 1e-9,
                })
                .collect()
        }
    };
    Ok(ArmSystem {
        n,
        series,
        e: (0..n).map(|i| (0..n).map(|j| e[(i, j)]).collect()).collect(),
        g,
        eigenpairs,
    })
}

/// The level-1 values from decimation that the arm system should
/// reproduce: `φ_{2j−1}(0)` or `φ_{2j−1}(4/3)` for `j = 1..`.
pub fn decimation_level1(sys: &DecimationSystem, series: ArmSeries) -> Result<Vec<f64>> {
    let n = sys.n();
    match series {
        ArmSeries::Zero => (1..=n).map(|j| sys.branch(2 * j - 1, 0.0)).collect(),
        ArmSeries::FourThirds => (1..n).map(|j| sys.branch(2 * j - 1, 4.0 / 3.0)).collect(),
        _ => Err(invalid("only the 0- and 4/3-series come from decimation")),
    }
}

/// Closed forms on the doubled path: `2 sin²(π(2j−1)/(2(2n−1)))/3` (odd)
/// and `2 sin²(πj/(2n−1))/3` (even), `j = 1..n` and `j = 0..n−1`.
pub fn interval_closed_form(n: usize, series: ArmSeries) -> Vec<f64> {
    let m = (2 * n - 1) as f64;
    match series {
        ArmSeries::Zero | ArmSeries::IntervalEven => (0..n)
            .map(|j| 2.0 * (PI * j as f64 / m).sin().powi(2) / 3.0)
            .collect(),
        _ => (1..=n)
            .map(|j| 2.0 * (PI * (2 * j - 1) as f64 / (2.0 * m)).sin().powi(2) / 3.0)
            .collect(),
    }
}

/// `sin π(j−1/2)(2k−1)/(2n−1)` or `cos πj(2k−1)/(2n−1)` for `k = 1..n`.
pub fn cross_profile(n: usize, j: usize, series: ArmSeries) -> Vec<f64> {
    let m = (2 * n - 1) as f64;
    (1..=n)
        .map(|k| {
            let x = (2 * k - 1) as f64 / m;
            match series {
                ArmSeries::FourThirds | ArmSeries::IntervalOdd => (PI * (j as f64 - 0.5) * x).sin(),
                _ => (PI * j as f64 * x).cos(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossRow {
    pub n: usize,
    pub lambda: f64,
    pub limit: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossLimit {
    pub j: usize,
    pub series: ArmSeries,
    pub rows: Vec<CrossRow>,
    /// Least-squares slope of `−log error` against `log n`.
    pub order: f64,
    pub decreasing: bool,
}

/// `ρ_n ψ_n(φ_{2j−1}(x₀))` against `4π²/3 (j − 1/2)²` (4/3-series) or
/// `4π²/3 (j − 1)²` (0-series).
pub fn cross_limit_check(j: usize, series: ArmSeries, ns: &[usize]) -> Result<CrossLimit> {
    if j == 0 {
        return Err(invalid("j must be at least 1"));
    }
    let (x0, limit) = match series {
        ArmSeries::FourThirds => (4.0 / 3.0, 4.0 * PI * PI / 3.0 * (j as f64 - 0.5).powi(2)),
        ArmSeries::Zero => (0.0, 4.0 * PI * PI / 3.0 * (j as f64 - 1.0).powi(2)),
        _ => return Err(invalid("cross limits are defined for the 0- and 4/3-series")),
    };
    let rows = ns
        .iter()
        .map(|&n| {
            if j > n - 1 + usize::from(series == ArmSeries::Zero) {
                return Err(invalid(format!("j = {j} is too large for n = {n}")));
            }
            let sys = DecimationSystem::new(crate::vsgraph::VicsekParams::new(n)?);
            let lambda = sys.rho() * sys.psi(sys.branch(2 * j - 1, x0)?)?;
            Ok(CrossRow {
                n,
                lambda,
                limit,
                error: (lambda - limit).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.error > 0.0)
        .map(|r| ((r.n as f64).ln(), r.error.ln()))
        .collect();
    let order = if pts.len() >= 2 {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        -sxy / sxx
    } else {
        f64::NAN
    };
    let decreasing = rows.windows(2).all(|w| w[1].error < w[0].error);
    Ok(CrossLimit {
        j,
        series,
        rows,
        order,
        decreasing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiBound {
    pub n: usize,
    /// `max (ψ_n(t) − t)/t²` over the grid.
    pub c: f64,
    /// `min ψ_n(t)/t` over the grid; at least 1 when `ψ_n(t) ≥ t`.
    pub min_ratio: f64,
}

/// Estimates `c` in `t ≤ ψ_n(t) ≤ t + ct²` on a uniform grid of `(0, 1]`.
pub fn psi_bounds(ns: &[usize], points: usize) -> Result<Vec<PsiBound>> {
    if points == 0 {
        return Err(invalid("the grid needs at least one point"));
    }
    ns.iter()
        .map(|&n| {
            let sys = DecimationSystem::new(crate::vsgraph::VicsekParams::new(n)?);
            let mut c = f64::NEG_INFINITY;
            let mut min_ratio = f64::INFINITY;
            for i in 1..=points {
                let t = i as f64 / points as f64;
                let p = sys.psi(t)?;
                c = c.max((p - t) / (t * t));
                min_ratio = min_ratio.min(p / t);
            }
            Ok(PsiBound { n, c, min_ratio })
        })
        .collect()
}
