//! Eigenfunctions by local extension, their fractal norms and center values,
//! boundary projections, and diagonal restriction data.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::decimation::{DecimationSystem, EigenvalueRecord, Series};
use crate::decimation::ExtensionTemplate;
use crate::error::{invalid, Result, VsError};
use crate::vsgraph::{Diagonal, FunctionOnGraph, GraphApprox, VicsekParams};

/// `Γ_0, …, Γ_M`, built once and shared by every extension.
#[derive(Debug, Clone)]
pub struct GraphLadder {
    graphs: Vec<GraphApprox>,
}

impl GraphLadder {
    pub fn new(params: VicsekParams, top: usize) -> Result<Self> {
        let graphs = (0..=top)
            .map(|m| GraphApprox::build(params, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(GraphLadder { graphs })
    }

    pub fn top(&self) -> usize {
        self.graphs.len() - 1
    }

    pub fn at(&self, m: usize) -> &GraphApprox {
        &self.graphs[m]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenfunction {
    pub record: EigenvalueRecord,
    pub level: usize,
    pub values: FunctionOnGraph,
    /// Fractal `‖u‖²` from the level-`M` norm and the scaling product.
    pub norm_sq: f64,
    pub center_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenBasis {
    pub record: EigenvalueRecord,
    pub functions: Vec<Eigenfunction>,
}

fn apply_extension(
    rows: &[[f64; 4]],
    tmpl: &ExtensionTemplate,
    u: &[f64],
    g_next: &GraphApprox,
) -> Vec<f64> {
    let p = g_next.params();
    let nm = p.num_maps();
    let cells = g_next.cells();
    let outer = [0, 1, 2, 3].map(|k| p.outer_letter(k));
    let mut out = vec![0.0; g_next.vertex_count()];
    out[..u.len()].copy_from_slice(u);
    for c in 0..cells.len() / nm {
        let base = c * nm;
        let v = [0, 1, 2, 3].map(|k| u[cells[base + outer[k]][k]]);
        for (row, &(i, k)) in rows.iter().zip(tmpl.reps()) {
            out[cells[base + i][k]] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
    }
    out
}

pub(crate) fn extend_raw(
    sys: &DecimationSystem,
    u: &[f64],
    lam_next: f64,
    g_next: &GraphApprox,
) -> Result<Vec<f64>> {
    if g_next.level() == 0 || u.len() as u64 != g_next.params().vertex_count(g_next.level() - 1) {
        return Err(VsError::LevelMismatch {
            level: g_next.level().saturating_sub(1),
            expected: g_next.params().vertex_count(g_next.level().saturating_sub(1)) as usize,
            got: u.len(),
        });
    }
    let e = sys.extension_matrix(lam_next)?;
    Ok(apply_extension(&e.rows, sys.template()?, u, g_next))
}

/// Extends a level-`m` function to `V_{m+1}` so that the `λ_next` eigenvalue
/// equation holds at every new vertex; old values are kept.
pub fn extend(
    sys: &DecimationSystem,
    u: &FunctionOnGraph,
    lam_next: f64,
    g_next: &GraphApprox,
) -> Result<FunctionOnGraph> {
    if u.level + 1 != g_next.level() {
        return Err(invalid(format!(
            "cannot extend a level-{} function onto level {}",
            u.level,
            g_next.level()
        )));
    }
    Ok(FunctionOnGraph::new(
        g_next.level(),
        extend_raw(sys, &u.values, lam_next, g_next)?,
    ))
}

/// Product of `f(λ_j)` over the levels after `lams`, continuing the sequence
/// with `φ₁` until a factor is within 1e−14 of 1.
fn tail_product(
    sys: &DecimationSystem,
    last: f64,
    f: impl Fn(&DecimationSystem, f64) -> Result<f64>,
) -> Result<f64> {
    let mut lam = last;
    let mut prod = 1.0;
    for _ in 0..400 {
        lam = sys.branch(1, lam)?;
        let v = f(sys, lam)?;
        prod *= v;
        if (v - 1.0).abs() < 1e-14 {
            return Ok(prod);
        }
    }
    Err(VsError::NoConvergence("scaling product".into()))
}

/// `Π_{j>M} N(λ_j)` where `λ_M = lam_m` and later levels follow `φ₁`.
pub fn norm_tail(sys: &DecimationSystem, lam_m: f64) -> Result<f64> {
    tail_product(sys, lam_m, DecimationSystem::norm_factor)
}

/// `Π_{j>M} N′(λ_j)`.
pub fn center_tail(sys: &DecimationSystem, lam_m: f64) -> Result<f64> {
    tail_product(sys, lam_m, DecimationSystem::center_factor)
}

/// The N(m) closed form for `n = 2` or the direct computation otherwise.
pub fn norm_factor(sys: &DecimationSystem, lam: f64) -> Result<f64> {
    if sys.n() == 2 {
        sys.norm_factor_closed_form(lam)
    } else {
        sys.norm_factor(lam)
    }
}

fn central_mean(g: &GraphApprox, u: &[f64]) -> f64 {
    g.cells()[g.center_cell()].iter().map(|&v| u[v]).sum::<f64>() / 4.0
}

/// Fractal norm and value at `q₀` of a level-`M` eigenfunction whose graph
/// eigenvalue at level `M` is `lam_m`.
pub fn norm_and_center_raw(
    sys: &DecimationSystem,
    g: &GraphApprox,
    u: &[f64],
    lam_m: f64,
) -> Result<(f64, f64)> {
    let nsq = g.inner_raw(u, u) * norm_tail(sys, lam_m)?;
    let center = central_mean(g, u) * center_tail(sys, lam_m)?;
    Ok((nsq.sqrt(), center))
}

/// `(‖u‖, u(q₀))` for a built eigenfunction.
pub fn fractal_norm_and_center(
    sys: &DecimationSystem,
    ladder: &GraphLadder,
    u: &Eigenfunction,
) -> Result<(f64, f64)> {
    let lams = sys.graph_eigenvalue_sequence(&u.record, u.level)?;
    norm_and_center_raw(sys, ladder.at(u.level), &u.values.values, *lams.last().unwrap())
}

/// A basis of `{u on V_k : corners of every k-cell sum to 0}`, the 4/3
/// eigenspace of `Γ_k`. The cells form a tree under vertex sharing; rooting it
/// at the cell holding `q₁`, each cell's pivot is `q₁` or the vertex it shares
/// with its parent, every other vertex is free, and each free vertex yields
/// one basis vector with the pivots solved leaves first.
pub fn birth_space_basis(g: &GraphApprox) -> Vec<Vec<f64>> {
    let nv = g.vertex_count();
    let cells = g.cells();
    let mut cells_of = vec![Vec::with_capacity(2); nv];
    for (c, cs) in cells.iter().enumerate() {
        for &v in cs {
            cells_of[v].push(c);
        }
    }
    let root = cells_of[0][0];
    let mut pivot = vec![usize::MAX; cells.len()];
    let mut order = Vec::with_capacity(cells.len());
    pivot[root] = 0;
    let mut q = VecDeque::from([root]);
    while let Some(c) = q.pop_front() {
        order.push(c);
        for &v in &cells[c] {
            for &d in &cells_of[v] {
                if pivot[d] == usize::MAX {
                    pivot[d] = v;
                    q.push_back(d);
                }
            }
        }
    }
    let mut is_pivot = vec![false; nv];
    for &p in &pivot {
        is_pivot[p] = true;
    }
    (0..nv)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut u = vec![0.0; nv];
            u[f] = 1.0;
            for &c in order.iter().rev() {
                let p = pivot[c];
                let s: f64 = cells[c].iter().filter(|&&v| v != p).map(|&v| u[v]).sum();
                u[p] = -s;
            }
            u
        })
        .collect()
}

/// Modified Gram–Schmidt with one reorthogonalization pass in `⟨·,·⟩_g`.
/// Only the first `#V_g` entries of each vector enter the inner product.
fn gram_schmidt(g: &GraphApprox, vs: &mut Vec<Vec<f64>>) -> Result<()> {
    let nv = g.vertex_count();
    let ip = |a: &[f64], b: &[f64]| g.inner_raw(&a[..nv], &b[..nv]);
    for i in 0..vs.len() {
        let before = ip(&vs[i], &vs[i]).sqrt();
        for _ in 0..2 {
            for j in 0..i {
                let (head, tail) = vs.split_at_mut(i);
                let c = ip(&tail[0], &head[j]);
                tail[0].iter_mut().zip(&head[j]).for_each(|(x, y)| *x -= c * y);
            }
        }
        let nrm = ip(&vs[i], &vs[i]).sqrt();
        if !(nrm > 1e-10 * before) {
            return Err(VsError::Singular("Gram matrix of the eigenbasis".into()));
        }
        vs[i].iter_mut().for_each(|x| *x /= nrm);
    }
    Ok(())
}

/// Orthonormal basis of the eigenspace of `rec`, on `V_M`, with unit fractal
/// norm.
pub fn build_eigenfunctions(
    sys: &DecimationSystem,
    ladder: &GraphLadder,
    rec: &EigenvalueRecord,
    m: usize,
) -> Result<EigenBasis> {
    if m > ladder.top() {
        return Err(invalid(format!("level {m} exceeds the ladder top {}", ladder.top())));
    }
    let lams = sys.graph_eigenvalue_sequence(rec, m)?;
    let birth = rec.birth_level;
    let start: Vec<Vec<f64>> = match rec.series {
        Series::Zero => vec![vec![1.0; 4]],
        Series::FourThirds => birth_space_basis(ladder.at(birth)),
    };
    let mut funcs = start;
    for lev in birth + 1..=m {
        let e = sys.extension_matrix(lams[lev - birth])?;
        let tmpl = sys.template()?;
        for u in funcs.iter_mut() {
            *u = apply_extension(&e.rows, tmpl, u, ladder.at(lev));
        }
    }
    let basis = EigenBasis {
        record: rec.clone(),
        functions: funcs
            .into_iter()
            .map(|v| Eigenfunction {
                record: rec.clone(),
                level: m,
                values: FunctionOnGraph::new(m, v),
                norm_sq: f64::NAN,
                center_value: f64::NAN,
            })
            .collect(),
    };
    orthonormalize(sys, ladder, basis)
}

/// Gram–Schmidt at the birth level, then scaling to unit fractal norm. The
/// scaling theorem carries orthogonality at the birth level to every level.
pub fn orthonormalize(
    sys: &DecimationSystem,
    ladder: &GraphLadder,
    basis: EigenBasis,
) -> Result<EigenBasis> {
    let rec = basis.record.clone();
    let Some(m) = basis.functions.first().map(|f| f.level) else {
        return Ok(basis);
    };
    let birth = ladder.at(rec.birth_level);
    let mut vs: Vec<Vec<f64>> = basis.functions.into_iter().map(|f| f.values.values).collect();
    gram_schmidt(birth, &mut vs)?;
    let lams = sys.graph_eigenvalue_sequence(&rec, m)?;
    let lam_m = *lams.last().unwrap();
    let g = ladder.at(m);
    let tail = norm_tail(sys, lam_m)?;
    let ctail = center_tail(sys, lam_m)?;
    let functions = vs
        .into_iter()
        .map(|mut v| {
            let nsq = g.inner_raw(&v, &v) * tail;
            let s = 1.0 / nsq.sqrt();
            v.iter_mut().for_each(|x| *x *= s);
            let center = central_mean(g, &v) * ctail;
            Eigenfunction {
                record: rec.clone(),
                level: m,
                values: FunctionOnGraph::new(m, v),
                norm_sq: nsq * s * s,
                center_value: center,
            }
        })
        .collect();
    Ok(EigenBasis {
        record: rec,
        functions,
    })
}

/// Visits every 0-series record of `records` with its unit-norm eigenfunction
/// on `V_M`, its center value, and its graph eigenvalue at level `M`.
/// Records sharing a word prefix share the extensions along it.
pub fn for_each_zero_series<F>(
    sys: &DecimationSystem,
    ladder: &GraphLadder,
    records: &[EigenvalueRecord],
    m: usize,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(&EigenvalueRecord, &[f64], f64, f64) -> Result<()>,
{
    let mut recs: Vec<(Vec<u16>, &EigenvalueRecord)> = Vec::new();
    for r in records.iter().filter(|r| r.series == Series::Zero) {
        if r.word.len() > m {
            return Err(invalid(format!(
                "record settles at level {}, above M = {m}",
                r.word.len()
            )));
        }
        let mut w = r.word.clone();
        w.resize(m, 1);
        recs.push((w, r));
    }
    recs.sort_by(|a, b| a.0.cmp(&b.0));

    struct Ctx<'a, F> {
        sys: &'a DecimationSystem,
        ladder: &'a GraphLadder,
        m: usize,
        visit: F,
    }
    fn dfs<F>(
        ctx: &mut Ctx<'_, F>,
        level: usize,
        lam: f64,
        u: &[f64],
        group: &[(Vec<u16>, &EigenvalueRecord)],
    ) -> Result<()>
    where
        F: FnMut(&EigenvalueRecord, &[f64], f64, f64) -> Result<()>,
    {
        if level == ctx.m {
            let g = ctx.ladder.at(level);
            let (nrm, center) = norm_and_center_raw(ctx.sys, g, u, lam)?;
            let unit: Vec<f64> = u.iter().map(|x| x / nrm).collect();
            for (_, r) in group {
                (ctx.visit)(r, &unit, center / nrm, lam)?;
            }
            return Ok(());
        }
        let mut i = 0;
        while i < group.len() {
            let letter = group[i].0[level];
            let j = i + group[i..].partition_point(|x| x.0[level] == letter);
            let lam2 = ctx.sys.branch(letter as usize, lam)?;
            let e = ctx.sys.extension_matrix(lam2)?;
            let v = apply_extension(&e.rows, ctx.sys.template()?, u, ctx.ladder.at(level + 1));
            dfs(ctx, level + 1, lam2, &v, &group[i..j])?;
            i = j;
        }
        Ok(())
    }

    let mut ctx = Ctx {
        sys,
        ladder,
        m,
        visit: &mut visit,
    };
    dfs(&mut ctx, 0, 0.0, &[1.0; 4], &recs)
}

/// Weighted least-norm completion of fixed `V_{m−1}` values to `V_m` under
/// the constraint that the corners of every `m`-cell sum to 0.
fn complete_four_thirds(sys: &DecimationSystem, coarse: &[f64], g: &GraphApprox) -> Result<Vec<f64>> {
    let tmpl = sys.template()?;
    let tg = tmpl.graph();
    let ni = tmpl.interior_count();
    let nm = g.params().num_maps();
    // Constraint rows over interior unknowns, and the part fixed by corners.
    let mut a = DMatrix::<f64>::zeros(nm, ni);
    let mut fixed = vec![[0.0f64; 4]; nm];
    for (i, cell) in tg.cells().iter().enumerate() {
        for &v in cell {
            if v < 4 {
                fixed[i][v] += 1.0;
            } else {
                a[(i, v - 4)] += 1.0;
            }
        }
    }
    let w: Vec<f64> = (0..ni).map(|t| tg.degree(t + 4) as f64 / 3.0).collect();
    let winv = DMatrix::from_diagonal(&DVector::from_iterator(ni, w.iter().map(|x| 1.0 / x)));
    let awat = &a * &winv * a.transpose();
    let solve = awat
        .lu()
        .try_inverse()
        .ok_or_else(|| VsError::Singular("completion constraints".into()))?;
    let map = &winv * a.transpose() * solve;

    let cells = g.cells();
    let outer = [0, 1, 2, 3].map(|k| g.params().outer_letter(k));
    let mut out = vec![0.0; g.vertex_count()];
    out[..coarse.len()].copy_from_slice(coarse);
    for c in 0..cells.len() / nm {
        let base = c * nm;
        let v = [0, 1, 2, 3].map(|k| coarse[cells[base + outer[k]][k]]);
        let b = DVector::from_iterator(
            nm,
            fixed.iter().map(|f| -(f[0] * v[0] + f[1] * v[1] + f[2] * v[2] + f[3] * v[3])),
        );
        let x = &map * b;
        for (t, &(i, k)) in tmpl.reps().iter().enumerate() {
            out[cells[base + i][k]] = x[t];
        }
    }
    Ok(out)
}

/// Residual of `(1 − 20)·deg(x)·u(x) = Σ_{y∼x} u(y)` at every vertex except
/// `skip`, scaled by `max |u|`.
pub fn eigen20_residual(g: &GraphApprox, u: &[f64], skip: usize) -> f64 {
    let scale = u.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
    (0..g.vertex_count())
        .filter(|&x| x != skip)
        .map(|x| {
            let s: f64 = g.neighbors(x).iter().map(|&y| u[y]).sum();
            ((1.0 - 20.0) * g.degree(x) as f64 * u[x] - s).abs()
        })
        .fold(0.0, f64::max)
        / scale
}

/// The unit-norm function `u₀^λ` spanning the orthogonal complement of
/// `{u ∈ E_λ : u(q_i) = 0}` for a 4/3-series eigenvalue born at level
/// `m₀ ≥ 1` on `VS_2`, on `V_M`.
///
/// On `V_{m₀−1}` it solves `(1 − 20)·deg(x)·u(x) = Σ_{y∼x} u(y)` at every
/// vertex but `q_i`, with `u(q_i) = 1`. At `q_i` itself the relation does not
/// hold. The values on `V_{m₀}` are the least-norm completion with zero
/// corner sums on every `m₀`-cell, and later levels follow by extension.
pub fn perp_function(
    sys: &DecimationSystem,
    ladder: &GraphLadder,
    rec: &EigenvalueRecord,
    corner: usize,
    m: usize,
) -> Result<Eigenfunction> {
    if sys.n() != 2 {
        return Err(invalid("perp_function is defined for n = 2"));
    }
    if rec.series != Series::FourThirds || rec.birth_level == 0 {
        return Err(invalid("perp_function needs a 4/3-series record born at level 1 or later"));
    }
    if corner >= 4 {
        return Err(invalid("corner must be in 0..4"));
    }
    let m0 = rec.birth_level;
    if m < m0 || m > ladder.top() {
        return Err(invalid(format!("level {m} must lie in {m0}..={}", ladder.top())));
    }
    let gc = ladder.at(m0 - 1);
    let nv = gc.vertex_count();
    let mut a = DMatrix::<f64>::zeros(nv, nv);
    let mut b = DVector::<f64>::zeros(nv);
    for x in 0..nv {
        if x == corner {
            a[(x, x)] = 1.0;
            b[x] = 1.0;
            continue;
        }
        a[(x, x)] = -19.0 * gc.degree(x) as f64;
        for &y in gc.neighbors(x) {
            a[(x, y)] -= 1.0;
        }
    }
    let coarse = a
        .lu()
        .solve(&b)
        .ok_or_else(|| VsError::Singular("eigenvalue-20 relation".into()))?;
    let mut u = complete_four_thirds(sys, coarse.as_slice(), ladder.at(m0))?;
    let lams = sys.graph_eigenvalue_sequence(rec, m)?;
    for lev in m0 + 1..=m {
        u = extend_raw(sys, &u, lams[lev - m0], ladder.at(lev))?;
    }
    let g = ladder.at(m);
    let (nrm, center) = norm_and_center_raw(sys, g, &u, *lams.last().unwrap())?;
    u.iter_mut().for_each(|x| *x /= nrm);
    Ok(Eigenfunction {
        record: rec.clone(),
        level: m,
        values: FunctionOnGraph::new(m, u),
        norm_sq: 1.0,
        center_value: center / nrm,
    })
}

/// Interpolation data for the span `Z_m` of 0-series eigenfunctions through
/// level `m`, restricted to one diagonal arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalCoefficients {
    pub level: usize,
    pub dim_z: usize,
    pub diagonal_len: usize,
    /// Numerical rank of the restriction matrix.
    pub rank: usize,
    /// `c_k^{(m)}` on `V_m`, for `k` along the diagonal from the corner inward.
    pub coefficients: Vec<Vec<f64>>,
    /// Sorted distinct nonzero values of each `c_k`, merged within 1e−8.
    pub distinct_values: Vec<Vec<f64>>,
    /// The diagonal vertices `x_0, x_1, …`.
    pub diagonal: Vec<usize>,
    /// Basis of `Z_m` on `V_m` (unit fractal norm eigenfunctions).
    pub basis: Vec<Vec<f64>>,
}

pub fn diagonal_coefficients(
    sys: &DecimationSystem,
    ladder: &GraphLadder,
    m: usize,
) -> Result<DiagonalCoefficients> {
    if sys.n() != 2 {
        return Err(invalid("diagonal coefficients are computed for n = 2"));
    }
    if m == 0 || m > 4 || m > ladder.top() {
        return Err(invalid("level must be in 1..=4 and within the ladder"));
    }
    let table = sys.enumerate_spectrum(m)?;
    let mut basis = Vec::new();
    for_each_zero_series(sys, ladder, table.records(), m, |_, u, _, _| {
        basis.push(u.to_vec());
        Ok(())
    })?;
    let g = ladder.at(m);
    let diag = g.diagonal_vertices(Diagonal::Arm(0));
    let dim = basis.len();
    let nd = diag.len();
    let b = DMatrix::from_fn(nd, dim, |i, j| basis[j][diag[i]]);
    let sv = b.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > 1e-10 * smax).count();
    if nd != dim || rank < dim {
        return Err(VsError::Singular(format!(
            "diagonal restriction is {nd}x{dim} with rank {rank}"
        )));
    }
    let inv = b
        .lu()
        .try_inverse()
        .ok_or_else(|| VsError::Singular("diagonal restriction".into()))?;
    let mut coefficients = Vec::with_capacity(nd);
    let mut distinct_values = Vec::with_capacity(nd);
    for k in 0..nd {
        let coef: Vec<f64> = (0..dim).map(|j| inv[(j, k)]).collect();
        let c: Vec<f64> = (0..g.vertex_count())
            .map(|z| (0..dim).map(|j| coef[j] * basis[j][z]).sum())
            .collect();
        let mut vals: Vec<f64> = c.iter().copied().filter(|x| x.abs() > 1e-8).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup_by(|a, b| (*a - *b).abs() <= 1e-8);
        distinct_values.push(vals);
        coefficients.push(c);
    }
    Ok(DiagonalCoefficients {
        level: m,
        dim_z: dim,
        diagonal_len: nd,
        rank,
        coefficients,
        distinct_values,
        diagonal: diag,
        basis,
    })
}

/// Evidence for the restriction conjecture at one level: for each `k`, the
/// largest `|c_j|` with `j > k` on the vertices attached to the midpoints of
/// the first `k + 1` diagonal intervals. A function vanishing on
/// `x_0, …, x_k` is a combination of exactly those `c_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub level: usize,
    /// `(k, number of attached vertices, max |c_j|)` for `k = 0, 1, …`.
    pub checks: Vec<(usize, usize, f64)>,
    pub holds: bool,
}

pub fn restriction_conjecture(g: &GraphApprox, dc: &DiagonalCoefficients) -> ConjectureReport {
    let pts = crate::green::vertex_points(g);
    let s: Vec<f64> = dc.diagonal.iter().map(|&v| pts[v].s).collect();
    let nd = dc.diagonal.len();
    let mut checks = Vec::new();
    for k in 0..nd.saturating_sub(1) {
        let mids: Vec<f64> = (0..=k.min(nd - 2)).map(|i| 0.5 * (s[i] + s[i + 1])).collect();
        let attached: Vec<usize> = (0..g.vertex_count())
            .filter(|&v| pts[v].arm == 0 && pts[v].offset > 0.0 && mids.iter().any(|m| (pts[v].s - m).abs() < 1e-12))
            .collect();
        let worst = (k + 1..nd)
            .flat_map(|j| attached.iter().map(move |&v| (j, v)))
            .map(|(j, v)| dc.coefficients[j][v].abs())
            .fold(0.0, f64::max);
        checks.push((k, attached.len(), worst));
    }
    let holds = checks.iter().all(|c| c.2 <= 1e-8);
    ConjectureReport {
        level: dc.level,
        checks,
        holds,
    }
}
