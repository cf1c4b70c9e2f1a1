//! Graph approximations `Γ_m` of the Vicsek set `VS_n`.
//!
//! Vertices live on the integer lattice `{0, …, (2n−1)^m}²`, so identity is
//! exact. Vertices are inserted level by level, which makes the index sets
//! nested: the first `#V_j` vertices of `Γ_m` are exactly `V_j`, in the same
//! order as in `Γ_j`. In particular the corners `q₁..q₄` are vertices 0..3.
//!
//! Map letters: 0 is the central cell, and letter `a(n−1)+p` (arm `a` in
//! `0..4`, position `p` in `1..n`) is the `p`-th cell counted outward along
//! the arm that ends in corner `q_{a+1}`. Cell indices are the base-`(4n−3)`
//! value of their word, first letter most significant.

use std::collections::{HashMap, VecDeque};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, VsError};
use crate::limits::{self, limits};

/// Corner `k` of the unit square; counterclockwise from the origin.
pub const CORNERS: [(i64, i64); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];

/// Direction of arm `a` as seen from the center.
const ARM_DIR: [(i64, i64); 4] = [(-1, -1), (1, -1), (1, 1), (-1, 1)];

/// Corner diagonally opposite to corner `k`.
pub fn opp(k: usize) -> usize {
    (k + 2) % 4
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VicsekParams {
    n: usize,
}

/// Role of one map letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    Center,
    /// `arm` in `0..4`, `pos` in `1..n`, counted outward.
    Arm { arm: usize, pos: usize },
}

impl VicsekParams {
    /// Largest supported arm parameter. Beyond this `ρ^m` overflows quickly and
    /// the decimation polynomial has degree above 2000.
    pub const MAX_N: usize = 1024;

    pub fn new(n: usize) -> Result<Self> {
        if !(2..=Self::MAX_N).contains(&n) {
            return Err(invalid(format!("n must be in 2..={}, got {n}", Self::MAX_N)));
        }
        Ok(VicsekParams { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of contractions, `4n−3`.
    pub fn num_maps(&self) -> usize {
        4 * self.n - 3
    }

    /// Inverse contraction ratio, `2n−1`.
    pub fn side(&self) -> usize {
        2 * self.n - 1
    }

    /// Laplacian renormalization factor `(4n−3)(2n−1)`.
    pub fn rho(&self) -> f64 {
        (self.num_maps() * self.side()) as f64
    }

    /// Weyl exponent `log(4n−3)/log ρ`.
    pub fn alpha(&self) -> f64 {
        (self.num_maps() as f64).ln() / self.rho().ln()
    }

    /// `#V_m = 3(4n−3)^m + 1`, saturating.
    pub fn vertex_count(&self, m: usize) -> u64 {
        limits::sat_pow(self.num_maps() as u64, m)
            .saturating_mul(3)
            .saturating_add(1)
    }

    pub fn letter(&self, i: usize) -> Letter {
        debug_assert!(i < self.num_maps());
        if i == 0 {
            Letter::Center
        } else {
            Letter::Arm {
                arm: (i - 1) / (self.n - 1),
                pos: (i - 1) % (self.n - 1) + 1,
            }
        }
    }

    pub fn arm_letter(&self, arm: usize, pos: usize) -> usize {
        arm * (self.n - 1) + pos
    }

    /// The arm cell that contains corner `k`.
    pub fn outer_letter(&self, k: usize) -> usize {
        (k + 1) * (self.n - 1)
    }

    /// Lower-left corner of cell `i` inside the parent, in child-cell units.
    pub fn offset(&self, i: usize) -> (i64, i64) {
        let c = (self.n - 1) as i64;
        match self.letter(i) {
            Letter::Center => (c, c),
            Letter::Arm { arm, pos } => {
                let (dx, dy) = ARM_DIR[arm];
                (c + dx * pos as i64, c + dy * pos as i64)
            }
        }
    }
}

/// A function on the vertices of one graph approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionOnGraph {
    pub level: usize,
    pub values: Vec<f64>,
}

impl FunctionOnGraph {
    pub fn new(level: usize, values: Vec<f64>) -> Self {
        FunctionOnGraph { level, values }
    }
}

/// A point for distance queries. The center `q₀` is never a lattice vertex
/// because the lattice has odd side length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphPoint {
    Vertex(usize),
    Center,
}

/// Which diagonal to list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diagonal {
    /// One arm `0..4`, listed from the corner inward.
    Arm(usize),
    /// The main diagonal from `q₁` to `q₃`.
    Full,
}

#[derive(Debug, Clone)]
pub struct GraphApprox {
    params: VicsekParams,
    level: usize,
    scale: i64,
    coords: Vec<(i64, i64)>,
    adjacency: Vec<Vec<usize>>,
    degree: Vec<u8>,
    cells: Vec<[usize; 4]>,
}

/// Eigenvalues of `−Δ_m` grouped into (value, multiplicity).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSpectrum {
    pub values: Vec<(f64, usize)>,
}

impl GraphApprox {
    pub fn build(params: VicsekParams, m: usize) -> Result<Self> {
        let nv = params.vertex_count(m);
        limits::check("graph vertices", nv, limits().max_vertices)?;
        let nv = nv as usize;
        let side = params.side() as i64;
        let nm = params.num_maps();
        let scale = side.pow(m as u32);

        let mut index: HashMap<(i64, i64), usize> = HashMap::with_capacity(nv);
        let mut coords = Vec::with_capacity(nv);
        let mut origins: Vec<(i64, i64)> = vec![(0, 0)];
        let mut cell_size = scale;
        for j in 0..=m {
            if j > 0 {
                cell_size /= side;
                let mut next = Vec::with_capacity(origins.len() * nm);
                for &(ox, oy) in &origins {
                    for i in 0..nm {
                        let (dx, dy) = params.offset(i);
                        next.push((ox + dx * cell_size, oy + dy * cell_size));
                    }
                }
                origins = next;
            }
            for &(ox, oy) in &origins {
                for &(cx, cy) in &CORNERS {
                    let p = (ox + cx * cell_size, oy + cy * cell_size);
                    index.entry(p).or_insert_with(|| {
                        coords.push(p);
                        coords.len() - 1
                    });
                }
            }
        }
        debug_assert_eq!(coords.len(), nv);

        let cells: Vec<[usize; 4]> = origins
            .iter()
            .map(|&(ox, oy)| {
                let mut c = [0; 4];
                for (k, &(cx, cy)) in CORNERS.iter().enumerate() {
                    c[k] = index[&(ox + cx * cell_size, oy + cy * cell_size)];
                }
                c
            })
            .collect();

        let mut adjacency = vec![Vec::with_capacity(6); nv];
        for c in &cells {
            for a in 0..4 {
                for b in 0..4 {
                    if a != b {
                        adjacency[c[a]].push(c[b]);
                    }
                }
            }
        }
        let degree = adjacency.iter().map(|a| a.len() as u8).collect();
        Ok(GraphApprox {
            params,
            level: m,
            scale,
            coords,
            adjacency,
            degree,
            cells,
        })
    }

    pub fn params(&self) -> VicsekParams {
        self.params
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn vertex_count(&self) -> usize {
        self.coords.len()
    }

    /// Lattice denominator `(2n−1)^m`.
    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// Integer coordinates over [`scale`](Self::scale).
    pub fn coords(&self) -> &[(i64, i64)] {
        &self.coords
    }

    pub fn point(&self, v: usize) -> (f64, f64) {
        let (x, y) = self.coords[v];
        (x as f64 / self.scale as f64, y as f64 / self.scale as f64)
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degree[v] as usize
    }

    pub fn boundary_ids(&self) -> [usize; 4] {
        [0, 1, 2, 3]
    }

    /// Cells in word order; each entry lists corners 0..4.
    pub fn cells(&self) -> &[[usize; 4]] {
        &self.cells
    }

    /// The cell whose word is all zeros. Its center is `q₀`.
    pub fn center_cell(&self) -> usize {
        0
    }

    pub fn edge_count(&self) -> usize {
        6 * self.cells.len()
    }

    /// Vertex at corner `k` of the cell addressed by `word` (any length up to
    /// the graph level).
    pub fn vertex_at(&self, word: &[usize], k: usize) -> Result<usize> {
        if word.len() > self.level {
            return Err(invalid(format!(
                "address of length {} is finer than level {}",
                word.len(),
                self.level
            )));
        }
        if k >= 4 {
            return Err(invalid("corner index must be in 0..4"));
        }
        let nm = self.params.num_maps();
        let mut cell = 0usize;
        for &l in word {
            if l >= nm {
                return Err(invalid(format!("letter {l} out of range 0..{nm}")));
            }
            cell = cell * nm + l;
        }
        for _ in word.len()..self.level {
            cell = cell * nm + self.params.outer_letter(k);
        }
        Ok(self.cells[cell][k])
    }

    /// Measure weight of each vertex; they sum to 1.
    pub fn weight(&self, v: usize) -> f64 {
        self.degree[v] as f64 / (12.0 * self.cells.len() as f64)
    }

    fn check(&self, u: &FunctionOnGraph) -> Result<()> {
        if u.level != self.level || u.values.len() != self.vertex_count() {
            return Err(VsError::LevelMismatch {
                level: self.level,
                expected: self.vertex_count(),
                got: u.values.len(),
            });
        }
        Ok(())
    }

    /// `⟨u, v⟩_m = ¼ (4n−3)^{−m} Σ_x (deg x / 3) u(x) v(x)`.
    pub fn inner_product(&self, u: &FunctionOnGraph, v: &FunctionOnGraph) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.inner_raw(&u.values, &v.values))
    }

    pub(crate) fn inner_raw(&self, u: &[f64], v: &[f64]) -> f64 {
        let s: f64 = u
            .iter()
            .zip(v)
            .zip(&self.degree)
            .map(|((a, b), &d)| d as f64 * a * b)
            .sum();
        s / (12.0 * self.cells.len() as f64)
    }

    /// Unrenormalized energy `Σ_{x∼y} |u(x) − u(y)|²`, each edge once.
    pub fn graph_energy(&self, u: &FunctionOnGraph) -> Result<f64> {
        self.check(u)?;
        Ok(self.energy_raw(&u.values))
    }

    pub(crate) fn energy_raw(&self, u: &[f64]) -> f64 {
        let mut e = 0.0;
        for c in &self.cells {
            for a in 0..4 {
                for b in a + 1..4 {
                    let d = u[c[a]] - u[c[b]];
                    e += d * d;
                }
            }
        }
        e
    }

    /// Energy renormalized by `(2n−1)^m`.
    pub fn renormalized_energy(&self, u: &FunctionOnGraph) -> Result<f64> {
        Ok(self.graph_energy(u)? / self.scale as f64)
    }

    /// `Δ_m u(x) = (1/deg x) Σ_{y∼x} (u(y) − u(x))`, boundary included.
    pub fn laplacian_apply(&self, u: &FunctionOnGraph) -> Result<FunctionOnGraph> {
        self.check(u)?;
        Ok(FunctionOnGraph::new(self.level, self.laplacian_raw(&u.values)))
    }

    pub(crate) fn laplacian_raw(&self, u: &[f64]) -> Vec<f64> {
        self.adjacency
            .iter()
            .enumerate()
            .map(|(x, nb)| {
                let s: f64 = nb.iter().map(|&y| u[y]).sum();
                s / nb.len() as f64 - u[x]
            })
            .collect()
    }

    fn dense_symmetrized(&self) -> Result<DMatrix<f64>> {
        let nv = self.vertex_count();
        limits::check("dense eigensolve", nv as u64, limits().max_dense)?;
        let mut s = DMatrix::<f64>::identity(nv, nv);
        for (x, nb) in self.adjacency.iter().enumerate() {
            for &y in nb {
                s[(x, y)] -= 1.0 / ((self.degree[x] as f64) * (self.degree[y] as f64)).sqrt();
            }
        }
        Ok(s)
    }

    /// Full spectrum of `−Δ_m` from a dense symmetric eigensolve of
    /// `D^{1/2}(I − D^{−1}A)D^{−1/2}`, grouped with relative tolerance 1e−9.
    pub fn oracle_spectrum(&self) -> Result<OracleSpectrum> {
        let eig = SymmetricEigen::new(self.dense_symmetrized()?);
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        let mut out: Vec<(f64, usize)> = Vec::new();
        let mut group: Vec<f64> = Vec::new();
        for v in vals {
            if let Some(&first) = group.first() {
                if (v - first).abs() > 1e-9 * first.abs().max(1.0) {
                    out.push((group.iter().sum::<f64>() / group.len() as f64, group.len()));
                    group.clear();
                }
            }
            group.push(v);
        }
        if !group.is_empty() {
            out.push((group.iter().sum::<f64>() / group.len() as f64, group.len()));
        }
        for e in &mut out {
            if e.0.abs() < 1e-12 {
                e.0 = 0.0;
            }
        }
        Ok(OracleSpectrum { values: out })
    }

    /// Eigenpairs of `−Δ_m` with eigenvectors normalized in `⟨·,·⟩_m`,
    /// eigenvalues ascending.
    pub fn oracle_eigenpairs(&self) -> Result<Vec<(f64, FunctionOnGraph)>> {
        let eig = SymmetricEigen::new(self.dense_symmetrized()?);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        Ok(order
            .into_iter()
            .map(|i| {
                let col = eig.eigenvectors.column(i);
                let mut u: Vec<f64> = col
                    .iter()
                    .zip(&self.degree)
                    .map(|(y, &d)| y / (d as f64).sqrt())
                    .collect();
                let nrm = self.inner_raw(&u, &u).sqrt();
                u.iter_mut().for_each(|x| *x /= nrm);
                (eig.eigenvalues[i], FunctionOnGraph::new(self.level, u))
            })
            .collect())
    }

    /// Vertices on a diagonal, ordered from the outside inward for one arm and
    /// from `q₁` to `q₃` for the full diagonal.
    pub fn diagonal_vertices(&self, which: Diagonal) -> Vec<usize> {
        let s = self.scale;
        let on = |(x, y): (i64, i64), arm: usize| match arm {
            0 => x == y && 2 * x < s,
            2 => x == y && 2 * x > s,
            1 => x + y == s && 2 * x > s,
            _ => x + y == s && 2 * x < s,
        };
        let pick = |arm: usize| {
            let mut v: Vec<usize> = (0..self.vertex_count())
                .filter(|&i| on(self.coords[i], arm))
                .collect();
            // Corner q_a has x = 0 for arms 0 and 3, x = s for arms 1 and 2.
            if arm == 0 || arm == 3 {
                v.sort_by_key(|&i| self.coords[i].0);
            } else {
                v.sort_by_key(|&i| -self.coords[i].0);
            }
            v
        };
        match which {
            Diagonal::Arm(a) => pick(a % 4),
            Diagonal::Full => {
                let mut v = pick(0);
                let mut b = pick(2);
                b.reverse();
                v.extend(b);
                v
            }
        }
    }

    /// Vertex bijection `Φ` induced by a permutation of the four arms:
    /// `result[x] = Φ(x)`.
    pub fn isometry_map(&self, perm: [usize; 4]) -> Result<Vec<usize>> {
        let mut seen = [false; 4];
        for &p in &perm {
            if p >= 4 || seen[p] {
                return Err(invalid(format!("{perm:?} is not a permutation of 0..4")));
            }
            seen[p] = true;
        }
        let nm = self.params.num_maps();
        let m = self.level;
        let mut digits = vec![0usize; m];
        let mut out = vec![usize::MAX; self.vertex_count()];
        for (c, corners) in self.cells.iter().enumerate() {
            let mut r = c;
            for d in digits.iter_mut().rev() {
                *d = r % nm;
                r /= nm;
            }
            let mut state = perm;
            let mut image = 0usize;
            for &l in &digits {
                let l2 = match self.params.letter(l) {
                    Letter::Center => 0,
                    Letter::Arm { arm, pos } => {
                        let to = state[arm];
                        let k = (to + 4 - arm) % 4;
                        state = [k, 1 + k, 2 + k, 3 + k].map(|v| v % 4);
                        self.params.arm_letter(to, pos)
                    }
                };
                image = image * nm + l2;
            }
            for k in 0..4 {
                out[corners[k]] = self.cells[image][state[k]];
            }
        }
        Ok(out)
    }

    /// `u ∘ Φ` for the isometry induced by an arm permutation.
    pub fn apply_isometry(&self, perm: [usize; 4], u: &FunctionOnGraph) -> Result<FunctionOnGraph> {
        self.check(u)?;
        let map = self.isometry_map(perm)?;
        Ok(FunctionOnGraph::new(
            self.level,
            map.iter().map(|&y| u.values[y]).collect(),
        ))
    }

    /// Skeleton length of one edge. Each arm of the main cross has length 1,
    /// so a cell of side `(2n−1)^{−m}` has half-diagonal `(2n−1)^{−m}` and any
    /// two of its corners are `2(2n−1)^{−m}` apart.
    pub fn edge_length(&self) -> f64 {
        2.0 / self.scale as f64
    }

    fn bfs(&self, sources: &[usize]) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertex_count()];
        let mut q = VecDeque::new();
        for &s in sources {
            dist[s] = 0;
            q.push_back(s);
        }
        while let Some(x) = q.pop_front() {
            for &y in &self.adjacency[x] {
                if dist[y] == u32::MAX {
                    dist[y] = dist[x] + 1;
                    q.push_back(y);
                }
            }
        }
        dist
    }

    /// Skeleton distance `|x|` from `q₀` to every vertex.
    pub fn center_distances(&self) -> Vec<f64> {
        let e = self.edge_length();
        self.bfs(&self.cells[self.center_cell()])
            .into_iter()
            .map(|h| e * (h as f64 + 0.5))
            .collect()
    }

    /// Shortest-path distance along the skeleton.
    pub fn geodesic_distance(&self, v: GraphPoint, w: GraphPoint) -> Result<f64> {
        let nv = self.vertex_count();
        for p in [v, w] {
            if let GraphPoint::Vertex(i) = p {
                if i >= nv {
                    return Err(invalid(format!("vertex {i} out of range")));
                }
            }
        }
        let e = self.edge_length();
        Ok(match (v, w) {
            (GraphPoint::Center, GraphPoint::Center) => 0.0,
            (GraphPoint::Center, GraphPoint::Vertex(i)) | (GraphPoint::Vertex(i), GraphPoint::Center) => {
                self.center_distances()[i]
            }
            (GraphPoint::Vertex(i), GraphPoint::Vertex(j)) => e * self.bfs(&[i])[j] as f64,
        })
    }
}
