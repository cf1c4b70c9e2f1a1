use nalgebra::DMatrix;

use super::DecimationSystem;
use crate::error::{invalid, Result, VsError};
use crate::limits::{self, limits};
use crate::vsgraph::{GraphApprox, VicsekParams};

/// The level-1 cell graph with its boundary split off, used to extend
/// eigenfunctions one level at a time.
///
/// Template vertices are the vertices of `Γ_1`; the first four are the cell
/// corners, the rest are interior.
#[derive(Debug, Clone)]
pub struct ExtensionTemplate {
    graph: GraphApprox,
    /// For interior vertex `4 + t`, one child letter and corner naming it.
    reps: Vec<(usize, usize)>,
}

impl ExtensionTemplate {
    pub fn new(params: VicsekParams) -> Result<Self> {
        let interior = 3 * params.num_maps() as u64 - 3;
        limits::check("extension system", interior, limits().max_dense)?;
        let graph = GraphApprox::build(params, 1)?;
        let mut reps = vec![(usize::MAX, 0); graph.vertex_count() - 4];
        for (i, cell) in graph.cells().iter().enumerate() {
            for (k, &v) in cell.iter().enumerate() {
                if v >= 4 && reps[v - 4].0 == usize::MAX {
                    reps[v - 4] = (i, k);
                }
            }
        }
        Ok(ExtensionTemplate { graph, reps })
    }

    pub fn graph(&self) -> &GraphApprox {
        &self.graph
    }

    pub fn interior_count(&self) -> usize {
        self.reps.len()
    }

    /// Child letter and corner of each interior vertex.
    pub fn reps(&self) -> &[(usize, usize)] {
        &self.reps
    }

    /// Number of 1-cells containing each template vertex.
    pub fn cell_counts(&self) -> Vec<f64> {
        (0..self.graph.vertex_count())
            .map(|v| self.graph.degree(v) as f64 / 3.0)
            .collect()
    }

    fn shares_cell(&self, v: usize, corner: usize) -> bool {
        self.graph
            .cells()
            .iter()
            .any(|c| c.contains(&v) && c.contains(&corner))
    }
}

/// Interior values as linear combinations of the four corner values.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionMatrix {
    pub rows: Vec<[f64; 4]>,
}

impl ExtensionMatrix {
    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows.len(), 4, |i, j| self.rows[i][j])
    }

    /// Values on all template vertices: corners first, then interior.
    pub fn full(&self, corners: [f64; 4]) -> Vec<f64> {
        let mut out = corners.to_vec();
        out.extend(
            self.rows
                .iter()
                .map(|r| r[0] * corners[0] + r[1] * corners[1] + r[2] * corners[2] + r[3] * corners[3]),
        );
        out
    }
}

impl DecimationSystem {
    pub fn template(&self) -> Result<&ExtensionTemplate> {
        self.template
            .get_or_init(|| ExtensionTemplate::new(self.params()))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn refuse_forbidden(&self, lam: f64) -> Result<()> {
        match self.forbidden_near(lam) {
            Some(value) => Err(VsError::Forbidden { value }),
            None => Ok(()),
        }
    }

    /// Solves `(D(1−λ) − A_II) X = A_IB` on the template: the interior values
    /// of a `λ`-eigenfunction in terms of its corner values.
    pub fn extension_matrix(&self, lam: f64) -> Result<ExtensionMatrix> {
        self.refuse_forbidden(lam)?;
        let t = self.template()?;
        let g = t.graph();
        let ni = t.interior_count();
        let mut a = DMatrix::<f64>::zeros(ni, ni);
        let mut b = DMatrix::<f64>::zeros(ni, 4);
        for i in 0..ni {
            let v = i + 4;
            a[(i, i)] = g.degree(v) as f64 * (1.0 - lam);
            for &y in g.neighbors(v) {
                if y < 4 {
                    b[(i, y)] += 1.0;
                } else {
                    a[(i, y - 4)] -= 1.0;
                }
            }
        }
        let x = a
            .lu()
            .solve(&b)
            .ok_or_else(|| VsError::Singular(format!("extension system at λ = {lam}")))?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(VsError::Singular(format!("extension system at λ = {lam}")));
        }
        Ok(ExtensionMatrix {
            rows: (0..ni).map(|i| [x[(i, 0)], x[(i, 1)], x[(i, 2)], x[(i, 3)]]).collect(),
        })
    }

    /// The explicit `n = 2` matrix with entries `γ·{a, b, c, d}`, assigned by
    /// role: a junction vertex takes `b` from the corner of its own arm cell
    /// and `d` from the others; a free vertex takes `a` from the corner of its
    /// cell and `c` from the others.
    pub fn extension_matrix_closed_form(&self, lam: f64) -> Result<ExtensionMatrix> {
        if self.n() != 2 {
            return Err(invalid("the closed-form extension matrix exists for n = 2 only"));
        }
        self.refuse_forbidden(lam)?;
        let t = self.template()?;
        let l2 = lam * lam;
        let a = 9.0 - 42.0 * lam + 36.0 * l2;
        let b = 6.0 * (1.0 - 4.0 * lam + 3.0 * l2);
        let c = 1.0;
        let d = 2.0 - 3.0 * lam;
        let gamma = 1.0 / (3.0 * (4.0 - 29.0 * lam + 60.0 * l2 - 36.0 * l2 * lam));
        let rows = (0..t.interior_count())
            .map(|i| {
                let v = i + 4;
                let junction = t.graph().degree(v) == 6;
                let mut row = [0.0; 4];
                for (k, e) in row.iter_mut().enumerate() {
                    let same = t.shares_cell(v, k);
                    *e = gamma
                        * match (junction, same) {
                            (true, true) => b,
                            (true, false) => d,
                            (false, true) => a,
                            (false, false) => c,
                        };
                }
                row
            })
            .collect();
        Ok(ExtensionMatrix { rows })
    }

    /// `N(λ)`: the factor by which `⟨u, v⟩_m` exceeds `⟨u, v⟩_{m−1}` when `u`
    /// and `v` have graph eigenvalue `λ` at level `m`.
    ///
    /// Summing weighted squares over one cell gives the quadratic form
    /// `Q = Eᵀ W E` in the corner values, where `E` is the full extension and
    /// `W` counts cells per vertex. By symmetry `Q = αI + β(J − I)`, and the
    /// level-`(m−1)` Gauss–Green identity turns the cross terms into
    /// `(3/2)(1 − R(λ))` times the squares, so `N = (α + 3β(1 − R(λ)))/(4n−3)`.
    pub fn norm_factor(&self, lam: f64) -> Result<f64> {
        let e = self.extension_matrix(lam)?;
        let w = self.template()?.cell_counts();
        let mut q = [[0.0f64; 4]; 4];
        for (t, row) in e.rows.iter().enumerate() {
            for a in 0..4 {
                for b in 0..4 {
                    q[a][b] += w[t + 4] * row[a] * row[b];
                }
            }
        }
        for k in 0..4 {
            q[k][k] += w[k];
        }
        let alpha = (0..4).map(|k| q[k][k]).sum::<f64>() / 4.0;
        let beta = (0..4)
            .flat_map(|a| (0..4).filter(move |&b| b != a).map(move |b| (a, b)))
            .map(|(a, b)| q[a][b])
            .sum::<f64>()
            / 12.0;
        let r = self.eval_r(lam).0;
        Ok((alpha + 3.0 * beta * (1.0 - r)) / self.params().num_maps() as f64)
    }

    /// The `n = 2` closed form
    /// `(1/5)(20 − 143λ + 240λ² − 108λ³)/(4 − 29λ + 60λ² − 36λ³)`.
    /// The denominator is the one of `γ`; it factors as `(1 − 2λ)(18λ² − 21λ + 4)`.
    pub fn norm_factor_closed_form(&self, lam: f64) -> Result<f64> {
        if self.n() != 2 {
            return Err(invalid("the closed-form norm factor exists for n = 2 only"));
        }
        self.refuse_forbidden(lam)?;
        let l2 = lam * lam;
        let l3 = l2 * lam;
        Ok((20.0 - 143.0 * lam + 240.0 * l2 - 108.0 * l3) / (5.0 * (4.0 - 29.0 * lam + 60.0 * l2 - 36.0 * l3)))
    }

    /// `N′(λ)`: the mean over the four corners of the central child cell
    /// divided by the mean over the parent's corners. It is the mean row sum
    /// of the extension matrix over those corners.
    pub fn center_factor(&self, lam: f64) -> Result<f64> {
        let e = self.extension_matrix(lam)?;
        let t = self.template()?;
        let central = t.graph().cells()[0];
        let s: f64 = central
            .iter()
            .map(|&v| e.rows[v - 4].iter().sum::<f64>())
            .sum();
        Ok(s / 4.0)
    }

    /// The `n = 2` closed form `(4 − 3λ)/(4 − 21λ + 18λ²)`.
    pub fn center_factor_closed_form(&self, lam: f64) -> Result<f64> {
        if self.n() != 2 {
            return Err(invalid("the closed-form center factor exists for n = 2 only"));
        }
        self.refuse_forbidden(lam)?;
        Ok((4.0 - 3.0 * lam) / (4.0 - 21.0 * lam + 18.0 * lam * lam))
    }
}
