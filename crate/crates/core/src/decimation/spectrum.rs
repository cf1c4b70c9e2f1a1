use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::DecimationSystem;
use crate::error::{invalid, Result};
use crate::limits::{self, limits};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Series {
    Zero,
    FourThirds,
}

/// One distinct fractal eigenvalue.
///
/// `word` lists the branches applied after birth, first letter first, with
/// trailing 1s trimmed. The value is `ρ^{|w|+k} ψ_n(φ_w(x₀))` with `x₀` the
/// birth value (0 or 4/3) and `k` the birth level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueRecord {
    pub series: Series,
    pub birth_level: usize,
    pub word: Vec<u16>,
    pub value: f64,
    pub multiplicity: u64,
}

impl EigenvalueRecord {
    pub fn key(&self) -> (Series, usize, &[u16]) {
        (self.series, self.birth_level, &self.word)
    }

    pub fn birth_value(&self) -> f64 {
        match self.series {
            Series::Zero => 0.0,
            Series::FourThirds => 4.0 / 3.0,
        }
    }

    /// First level at which the record's graph eigenvalue has settled onto
    /// branch 1 for good.
    pub fn settled_level(&self) -> usize {
        self.birth_level + self.word.len()
    }
}

/// Records ascending by value, with cumulative multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    n: usize,
    depth: usize,
    records: Vec<EigenvalueRecord>,
    cumulative: Vec<u64>,
}

impl SpectrumTable {
    fn from_records(n: usize, depth: usize, records: Vec<EigenvalueRecord>) -> Self {
        let mut acc = 0u64;
        let cumulative = records
            .iter()
            .map(|r| {
                acc = acc.saturating_add(r.multiplicity);
                acc
            })
            .collect();
        SpectrumTable {
            n,
            depth,
            records,
            cumulative,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn records(&self) -> &[EigenvalueRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Sum of all multiplicities.
    pub fn total_multiplicity(&self) -> u64 {
        self.cumulative.last().copied().unwrap_or(0)
    }

    /// `N(x) = Σ_{λ ≤ x} m(λ)`, with relative slack 1e−12 so that `x` equal to
    /// an eigenvalue up to rounding counts it.
    pub fn counting(&self, x: f64) -> u64 {
        let lim = x + 1e-12 * x.abs();
        let i = self.records.partition_point(|r| r.value <= lim);
        if i == 0 {
            0
        } else {
            self.cumulative[i - 1]
        }
    }

    /// Largest value enumerated.
    pub fn max_value(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.value)
    }

    pub fn values_strictly_increasing(&self) -> bool {
        self.records.windows(2).all(|w| w[0].value < w[1].value)
    }
}

fn trimmed(word: &[u16]) -> Vec<u16> {
    let end = word.iter().rposition(|&j| j != 1).map_or(0, |i| i + 1);
    word[..end].to_vec()
}

/// Calls `f` on every word of length `len` over `1..=nb`, in lexicographic
/// order.
pub(crate) fn for_each_word(len: usize, nb: u16, mut f: impl FnMut(&[u16])) {
    let mut w = vec![1u16; len];
    loop {
        f(&w);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if w[i] < nb {
                w[i] += 1;
                break;
            }
            w[i] = 1;
        }
    }
}

impl DecimationSystem {
    pub(crate) fn multiplicity(&self, series: Series, birth: usize) -> u64 {
        match series {
            Series::Zero => 1,
            Series::FourThirds => {
                limits::sat_pow(self.params().num_maps() as u64, birth)
                    .saturating_mul(2)
                    .saturating_add(1)
            }
        }
    }

    /// The fractal eigenvalue of `(series, birth, word)`; the word need not be
    /// trimmed.
    pub fn record_value(&self, series: Series, birth: usize, word: &[u16]) -> Result<f64> {
        let w = trimmed(word);
        let x0 = match series {
            Series::Zero => 0.0,
            Series::FourThirds => 4.0 / 3.0,
        };
        let t = self.apply_word(&w, x0)?;
        Ok(self.rho().powi((w.len() + birth) as i32) * self.psi(t)?)
    }

    fn make_records(&self, keys: Vec<(Series, usize, Vec<u16>)>) -> Result<Vec<EigenvalueRecord>> {
        keys.into_par_iter()
            .map(|(series, birth, word)| {
                let word = trimmed(&word);
                Ok(EigenvalueRecord {
                    value: self.record_value(series, birth, &word)?,
                    multiplicity: self.multiplicity(series, birth),
                    series,
                    birth_level: birth,
                    word,
                })
            })
            .collect()
    }

    fn check_depth(&self, k: usize, count: u64) -> Result<()> {
        if k == 0 {
            return Err(invalid("spectral depth must be at least 1"));
        }
        limits::check("spectrum records", count, limits().max_records)
    }

    /// Number of records at depth `k`: `|L_k| = (2n−1)|L_{k−1}| − 2(n−1)`,
    /// `|L_0| = 2`.
    pub fn table_len(&self, k: usize) -> u64 {
        let b = self.num_branches() as u64;
        let d = 2 * (self.n() as u64 - 1);
        (0..k).fold(2u64, |acc, _| acc.saturating_mul(b).saturating_sub(d))
    }

    /// Initial segment of the spectrum from the level-`k` graph eigenvalues,
    /// built by the recursive ordering: from the level list `S`,
    /// `φ₁(S), φ₂(S reversed), φ₃(S), …, φ_{2n−1}(S)`, then a fresh 4/3.
    /// Even branches skip the zero record and the fresh 4/3; the last branch
    /// skips the fresh 4/3. The result is ascending by construction.
    pub fn enumerate_spectrum(&self, k: usize) -> Result<SpectrumTable> {
        self.check_depth(k, self.table_len(k))?;
        let nb = self.num_branches() as u16;
        // (series, birth, untrimmed word)
        let mut level: Vec<(Series, usize, Vec<u16>)> = vec![
            (Series::Zero, 0, vec![]),
            (Series::FourThirds, 0, vec![]),
        ];
        for lev in 1..=k {
            let fresh = level.len() - 1;
            let mut next = Vec::with_capacity(level.len() * nb as usize);
            for j in 1..=nb {
                let even = j % 2 == 0;
                let order: Box<dyn Iterator<Item = usize>> = if even {
                    Box::new((0..level.len()).rev())
                } else {
                    Box::new(0..level.len())
                };
                for i in order {
                    let (s, b, w) = &level[i];
                    let is_zero_value = *s == Series::Zero && w.iter().all(|&x| x == 1);
                    if i == fresh && (even || j == nb) {
                        continue;
                    }
                    if even && is_zero_value {
                        continue;
                    }
                    let mut w2 = w.clone();
                    w2.push(j);
                    next.push((*s, *b, w2));
                }
            }
            next.push((Series::FourThirds, lev, vec![]));
            level = next;
        }
        Ok(SpectrumTable::from_records(self.n(), k, self.make_records(level)?))
    }

    /// Validation oracle: every admissible word of the right length under the
    /// first-letter rules, values through `ψ_n`, then sorted.
    pub fn brute_enumerate(&self, k: usize) -> Result<SpectrumTable> {
        let nb = self.num_branches() as u16;
        let count = limits::sat_pow(nb as u64, k).saturating_mul(k as u64 + 2);
        self.check_depth(k, count)?;
        let mut keys = Vec::new();
        for_each_word(k, nb, |w| {
            if w.iter().find(|&&j| j != 1).is_none_or(|&j| j % 2 == 1) {
                keys.push((Series::Zero, 0, w.to_vec()));
            }
        });
        for birth in 0..=k {
            for_each_word(k - birth, nb, |w| {
                if w.first().is_none_or(|&j| j % 2 == 1 && j != nb) {
                    keys.push((Series::FourThirds, birth, w.to_vec()));
                }
            });
        }
        let mut recs = self.make_records(keys)?;
        recs.sort_by(|a, b| a.value.total_cmp(&b.value));
        Ok(SpectrumTable::from_records(self.n(), k, recs))
    }

    /// Graph eigenvalues of a record at levels `birth..=m`: the birth value,
    /// then the word's branches, then `φ₁` repeatedly.
    pub fn graph_eigenvalue_sequence(&self, rec: &EigenvalueRecord, m: usize) -> Result<Vec<f64>> {
        if m < rec.settled_level() {
            return Err(invalid(format!(
                "level {m} is below the settled level {} of the record",
                rec.settled_level()
            )));
        }
        let mut out = Vec::with_capacity(m + 1 - rec.birth_level);
        let mut x = rec.birth_value();
        out.push(x);
        for lev in rec.birth_level + 1..=m {
            let j = rec.word.get(lev - rec.birth_level - 1).copied().unwrap_or(1);
            x = self.branch(j as usize, x)?;
            out.push(x);
        }
        Ok(out)
    }

    /// Eigenvalues of `−Δ_m` predicted by decimation: every record alive at
    /// level `m` with its graph eigenvalue there, ascending.
    pub fn predicted_graph_spectrum(&self, m: usize) -> Result<Vec<(f64, u64)>> {
        if m == 0 {
            return Ok(vec![(0.0, 1), (4.0 / 3.0, 3)]);
        }
        let table = self.enumerate_spectrum(m)?;
        let mut out = table
            .records()
            .iter()
            .map(|r| Ok((*self.graph_eigenvalue_sequence(r, m)?.last().unwrap(), r.multiplicity)))
            .collect::<Result<Vec<_>>>()?;
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(out)
    }
}
