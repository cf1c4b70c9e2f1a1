//! The decimation polynomial `R`, its inverse branches `φ_j`, the limit
//! function `ψ_n`, the local extension matrix, and spectrum enumeration.
//!
//! With `x = 3λ − 1`,
//! `f = T_n(x) − 3T_{n−1}(x)`, `g = U_{n−1}(x) − U_{n−2}(x)`,
//! `h = U_{n−1}(x) − 3U_{n−2}(x)` and `R(λ) = λ g(λ) h(λ)`.
//! Evaluation runs the three-term recurrences directly, which is stable on
//! `[0, 4/3]` and works for any scalar type with field operations; the
//! double-double path is used to certify branch residuals beyond `f64`.

mod extension;
mod poly;
mod spectrum;

use std::sync::OnceLock;

use num_traits::{FromPrimitive, Num};
use twofloat::TwoFloat;

pub use extension::ExtensionTemplate;
pub use poly::ExactPolys;
pub use spectrum::{EigenvalueRecord, Series, SpectrumTable};
pub(crate) use spectrum::for_each_word;

use crate::error::{invalid, Result, VsError};
use crate::vsgraph::VicsekParams;

/// Field operations needed by the recurrences.
pub trait Scalar: Copy + Num + FromPrimitive {}
impl<T: Copy + Num + FromPrimitive> Scalar for T {}

fn c<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("finite constant")
}

/// `(R, R′, R″)` at `lam`.
pub fn eval_r_generic<T: Scalar>(n: usize, lam: T) -> (T, T, T) {
    let x = c::<T>(3.0) * lam - T::one();
    let two = c::<T>(2.0);
    // (U_{k−1}, U_k) and x-derivatives, starting at k = 0 with U_{−1} = 0.
    let (mut u0, mut u1) = (T::zero(), T::one());
    let (mut d0, mut d1) = (T::zero(), T::zero());
    let (mut s0, mut s1) = (T::zero(), T::zero());
    for _ in 0..n - 1 {
        let u2 = two * x * u1 - u0;
        let d2 = two * u1 + two * x * d1 - d0;
        let s2 = c::<T>(4.0) * d1 + two * x * s1 - s0;
        (u0, u1, d0, d1, s0, s1) = (u1, u2, d1, d2, s1, s2);
    }
    // Now u1 = U_{n−1}, u0 = U_{n−2}.
    let three = c::<T>(3.0);
    let nine = c::<T>(9.0);
    let g = u1 - u0;
    let h = u1 - three * u0;
    let gp = three * (d1 - d0);
    let hp = three * (d1 - three * d0);
    let gpp = nine * (s1 - s0);
    let hpp = nine * (s1 - three * s0);
    let r = lam * g * h;
    let rp = g * h + lam * (gp * h + g * hp);
    let rpp = two * (gp * h + g * hp) + lam * (gpp * h + two * gp * hp + g * hpp);
    (r, rp, rpp)
}

/// `(f, g, h)` at `lam` in `f64`.
pub fn eval_fgh(n: usize, lam: f64) -> (f64, f64, f64) {
    let x = 3.0 * lam - 1.0;
    let (mut t0, mut t1) = (1.0, x);
    for _ in 1..n {
        (t0, t1) = (t1, 2.0 * x * t1 - t0);
    }
    let (mut u0, mut u1) = (0.0, 1.0);
    for _ in 0..n - 1 {
        (u0, u1) = (u1, 2.0 * x * u1 - u0);
    }
    (t1 - 3.0 * t0, u1 - u0, u1 - 3.0 * u0)
}

/// Bisection on a sign change; `f(a)` and `f(b)` must differ in sign.
pub(crate) fn bisect(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut fa = f(a);
    loop {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            return m;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
}

/// Immutable decimation data for one `n`.
#[derive(Debug)]
pub struct DecimationSystem {
    params: VicsekParams,
    /// Roots of `R` ascending: 0, then interleaved roots of `g` and `h`.
    roots: Vec<f64>,
    /// Critical points of `R`, ascending; `2n−2` of them.
    crit: Vec<f64>,
    forbidden: Vec<f64>,
    exact: OnceLock<ExactPolys>,
    template: OnceLock<Result<ExtensionTemplate>>,
}

impl DecimationSystem {
    pub fn new(params: VicsekParams) -> Self {
        let n = params.n();
        let mut groots: Vec<f64> = (0..n - 1)
            .map(|k| {
                let th = (2 * k + 1) as f64 * std::f64::consts::PI / (2 * n - 1) as f64;
                (1.0 + th.cos()) / 3.0
            })
            .collect();
        groots.sort_by(f64::total_cmp);
        let h = |l: f64| eval_fgh(n, l).2;
        let mut hroots = Vec::with_capacity(n - 1);
        for j in 0..n - 1 {
            let hi = if j + 1 < n - 1 { groots[j + 1] } else { 4.0 / 3.0 };
            hroots.push(bisect(groots[j], hi, h));
        }
        let mut roots = vec![0.0];
        for j in 0..n - 1 {
            roots.push(groots[j]);
            roots.push(hroots[j]);
        }
        let rp = |l: f64| eval_r_generic(n, l).1;
        let crit: Vec<f64> = roots.windows(2).map(|w| bisect(w[0], w[1], rp)).collect();

        let mut sys = DecimationSystem {
            params,
            roots,
            crit,
            forbidden: Vec::new(),
            exact: OnceLock::new(),
            template: OnceLock::new(),
        };
        // Roots of f are the preimages of 4/3 under the even branches and the
        // last branch; those of g come in closed form.
        let mut forb = groots;
        for j in (2..2 * n - 1).step_by(2) {
            forb.push(sys.branch(j, 4.0 / 3.0).expect("4/3 lies in every branch range"));
        }
        forb.push(sys.branch(2 * n - 1, 4.0 / 3.0).expect("4/3 lies in the last branch range"));
        forb.push(4.0 / 3.0);
        forb.sort_by(f64::total_cmp);
        sys.forbidden = forb;
        sys
    }

    pub fn params(&self) -> VicsekParams {
        self.params
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    pub fn rho(&self) -> f64 {
        self.params.rho()
    }

    pub fn num_branches(&self) -> usize {
        2 * self.n() - 1
    }

    /// `(R(λ), R′(λ))`.
    pub fn eval_r(&self, lam: f64) -> (f64, f64) {
        let (r, rp, _) = eval_r_generic(self.n(), lam);
        (r, rp)
    }

    /// `(R(λ), R′(λ), R″(λ))`.
    pub fn eval_r2(&self, lam: f64) -> (f64, f64, f64) {
        eval_r_generic(self.n(), lam)
    }

    /// `R(λ)` in double-double precision.
    pub fn eval_r_precise(&self, lam: TwoFloat) -> TwoFloat {
        eval_r_generic(self.n(), lam).0
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    pub fn critical_points(&self) -> &[f64] {
        &self.crit
    }

    /// `{4/3} ∪ roots(f) ∪ roots(g)`, ascending.
    ///
    /// Zero is not included: the extension system is regular at `λ = 0`, and
    /// the constant function must extend.
    pub fn forbidden_set(&self) -> &[f64] {
        &self.forbidden
    }

    /// The forbidden value within relative distance 1e−12 of `lam`, if any.
    pub fn forbidden_near(&self, lam: f64) -> Option<f64> {
        self.forbidden
            .iter()
            .copied()
            .find(|&f| (lam - f).abs() <= 1e-12 * f.abs().max(1.0))
    }

    /// Exact integer-coefficient forms of `f, g, h, R` and `l = (3R−4)/f`,
    /// built on first use.
    pub fn exact(&self) -> &ExactPolys {
        self.exact.get_or_init(|| ExactPolys::new(self.n()))
    }

    /// Monotone piece of branch `j` (1-based).
    pub fn branch_interval(&self, j: usize) -> Result<(f64, f64)> {
        let nb = self.num_branches();
        if j == 0 || j > nb {
            return Err(invalid(format!("branch index {j} outside 1..={nb}")));
        }
        let a = if j == 1 { 0.0 } else { self.crit[j - 2] };
        let b = if j == nb { 4.0 / 3.0 } else { self.crit[j - 1] };
        Ok((a, b))
    }

    /// Values `R` takes on branch `j`, as `(min, max)`.
    pub fn branch_range(&self, j: usize) -> Result<(f64, f64)> {
        let (a, b) = self.branch_interval(j)?;
        let (ra, rb) = (self.eval_r(a).0, self.eval_r(b).0);
        Ok((ra.min(rb), ra.max(rb)))
    }

    /// `φ_j(μ)`: the unique `λ` on piece `j` with `R(λ) = μ`.
    pub fn branch(&self, j: usize, mu: f64) -> Result<f64> {
        let (a0, b0) = self.branch_interval(j)?;
        if !mu.is_finite() {
            return Err(invalid("branch argument must be finite"));
        }
        if j == 1 && mu == 0.0 {
            return Ok(0.0);
        }
        let f = |x: f64| self.eval_r(x);
        let (fa0, fb0) = (f(a0).0 - mu, f(b0).0 - mu);
        let slack = 1e-12 * mu.abs().max(1.0);
        if fa0.abs() <= slack && fa0 * fb0 >= 0.0 {
            return Ok(a0);
        }
        if fb0.abs() <= slack && fa0 * fb0 >= 0.0 {
            return Ok(b0);
        }
        if fa0 * fb0 > 0.0 {
            let (lo, hi) = self.branch_range(j)?;
            return Err(invalid(format!(
                "{mu} is outside the range [{lo}, {hi}] of branch {j}"
            )));
        }
        let (mut a, mut b, mut fa) = (a0, b0, fa0);
        let mut x = if j == 1 {
            (mu / self.rho()).clamp(a, b)
        } else {
            0.5 * (a + b)
        };
        for _ in 0..300 {
            let (r, rp) = f(x);
            let fx = r - mu;
            if fx == 0.0 {
                return Ok(x);
            }
            if (fx > 0.0) == (fa > 0.0) {
                a = x;
                fa = fx;
            } else {
                b = x;
            }
            let newton = x - fx / rp;
            let (lo, hi) = (a.min(b), a.max(b));
            let next = if newton.is_finite() && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (a + b)
            };
            if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs() || next == x {
                return Ok(next);
            }
            x = next;
        }
        Err(VsError::NoConvergence(format!("branch {j} at {mu}")))
    }

    /// `φ_j(μ)` polished to double-double precision by Newton steps on `R`
    /// evaluated in double-double.
    pub fn branch_precise(&self, j: usize, mu: f64) -> Result<TwoFloat> {
        let x0 = self.branch(j, mu)?;
        if j == 1 && mu == 0.0 {
            return Ok(TwoFloat::from(0.0));
        }
        let n = self.n();
        let mut x = TwoFloat::from(x0);
        let m = TwoFloat::from(mu);
        for _ in 0..4 {
            let (r, rp, _) = eval_r_generic(n, x);
            if rp == TwoFloat::from(0.0) {
                break;
            }
            x -= (r - m) / rp;
        }
        Ok(x)
    }

    /// `φ_w(x) = φ_{w_k} ∘ … ∘ φ_{w_1}(x)`; the first letter is applied first.
    pub fn apply_word(&self, word: &[u16], x: f64) -> Result<f64> {
        word.iter().try_fold(x, |acc, &j| self.branch(j as usize, acc))
    }

    /// `ψ_n(t) = lim ρ^m φ₁^{(m)}(t)`.
    pub fn psi(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        let rho = self.rho();
        let mut x = t;
        let mut scale = 1.0;
        let mut prev = t;
        for _ in 0..200 {
            x = self.branch(1, x)?;
            scale *= rho;
            let v = scale * x;
            if (v - prev).abs() < 1e-13 * v.abs() {
                return Ok(v);
            }
            prev = v;
        }
        Err(VsError::NoConvergence(format!("psi at {t}")))
    }

    /// `ψ_n′(t) = Π_{i≥1} ρ / R′(φ₁^{(i)}(t))`.
    pub fn psi_prime(&self, t: f64) -> Result<f64> {
        let rho = self.rho();
        let mut x = t;
        let mut prod = 1.0;
        for _ in 0..200 {
            x = self.branch(1, x)?;
            let f = rho / self.eval_r(x).1;
            prod *= f;
            if (f - 1.0).abs() < 1e-16 {
                return Ok(prod);
            }
        }
        Err(VsError::NoConvergence(format!("psi' at {t}")))
    }

    /// Fixed point `p` of `φ_{2n−1}`, `q = φ_{2n−1}(4/3)` and the largest
    /// fixed point of `R`. Since `R(x) − x` has one root per monotone piece,
    /// the last one is both `p` and the largest fixed point.
    pub fn fixed_points(&self) -> FixedPoints {
        let nb = self.num_branches();
        let (a, b) = self.branch_interval(nb).expect("valid branch");
        let p = bisect(a, b, |x| self.eval_r(x).0 - x);
        let q = self.branch(nb, 4.0 / 3.0).expect("4/3 in range");
        debug_assert!(q >= p);
        FixedPoints { p, q, t_max: p }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FixedPoints {
    pub p: f64,
    pub q: f64,
    pub t_max: f64,
}
