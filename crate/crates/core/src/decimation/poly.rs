use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Polynomial in `λ` with rational coefficients, lowest degree first.
pub type Poly = Vec<BigRational>;

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn add(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    trim(out)
}

pub fn scale(a: &Poly, s: &BigRational) -> Poly {
    trim(a.iter().map(|c| c * s).collect())
}

pub fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// Quotient and remainder of `a / b`.
pub fn divmod(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let b = trim(b.clone());
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut r = trim(a.clone());
    if r.len() < b.len() {
        return (vec![BigRational::zero()], r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        if dr < db {
            break;
        }
        let coef = &r[dr] / &lead;
        for (j, bj) in b.iter().enumerate() {
            r[dr - db + j] -= &coef * bj;
        }
        q[dr - db] = coef;
        r.pop();
        r = trim(r);
    }
    (trim(q), r)
}

/// Exact forms of the decimation polynomials.
#[derive(Debug, Clone)]
pub struct ExactPolys {
    pub f: Poly,
    pub g: Poly,
    pub h: Poly,
    pub r: Poly,
    /// `(3R − 4)/f`.
    pub l: Poly,
    /// Remainder of that division; zero when the factorization holds.
    pub l_remainder: Poly,
}

impl ExactPolys {
    pub fn new(n: usize) -> Self {
        let x: Poly = vec![int(-1), int(3)];
        let two_x = scale(&x, &int(2));
        // T_0, T_1 and U_{−1}, U_0.
        let mut t = vec![vec![int(1)], x.clone()];
        let mut u = vec![vec![int(0)], vec![int(1)]];
        for k in 1..n {
            let next = add(&mul(&two_x, &t[k]), &scale(&t[k - 1], &int(-1)));
            t.push(next);
        }
        for k in 1..n {
            let next = add(&mul(&two_x, &u[k]), &scale(&u[k - 1], &int(-1)));
            u.push(next);
        }
        // u[k] holds U_{k−1}.
        let f = add(&t[n], &scale(&t[n - 1], &int(-3)));
        let g = add(&u[n], &scale(&u[n - 1], &int(-1)));
        let h = add(&u[n], &scale(&u[n - 1], &int(-3)));
        let lam: Poly = vec![int(0), int(1)];
        let r = mul(&lam, &mul(&g, &h));
        let three_r_minus_4 = add(&scale(&r, &int(3)), &vec![int(-4)]);
        let (l, l_remainder) = divmod(&three_r_minus_4, &f);
        ExactPolys {
            f,
            g,
            h,
            r,
            l,
            l_remainder,
        }
    }

    /// Coefficients of `R` as exact integers (they are integral).
    pub fn r_integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.r
            .iter()
            .map(|c| if c.denom().is_one() { Some(c.numer().clone()) } else { None })
            .collect()
    }
}
