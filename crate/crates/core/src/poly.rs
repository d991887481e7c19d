//! Dense univariate polynomials with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Shorthand used throughout the crate for exact rationals.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(q: &Rational) -> f64 {
    // Ratio::to_f64 handles large numerators/denominators without overflow.
    q.to_f64().unwrap_or(f64::NAN)
}

/// Polynomial `c[0] + c[1] x + ... + c[n] x^n`, kept trimmed (no trailing zeros).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Poly::new(vec![Rational::zero(), Rational::one()])
    }

    /// `c0 + c1 x`.
    pub fn linear(c0: Rational, c1: Rational) -> Self {
        Poly::new(vec![c0, c1])
    }

    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat(k as i64))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Poly {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn pow(&self, n: u32) -> Poly {
        (0..n).fold(Poly::one(), |acc, _| &acc * self)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    /// `p(c0 + c1 x)` as a polynomial in `x`.
    pub fn compose_affine(&self, c0: &Rational, c1: &Rational) -> Poly {
        let inner = Poly::linear(c0.clone(), c1.clone());
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, c| {
            &(&acc * &inner) + &Poly::constant(c.clone())
        })
    }

    /// Exact division by `x - root`; `None` when the remainder is nonzero.
    pub fn div_root(&self, root: &Rational) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let n = self.coeffs.len();
        let mut quotient = vec![Rational::zero(); n - 1];
        let mut carry = Rational::zero();
        for k in (0..n).rev() {
            let value = &self.coeffs[k] + &carry * root;
            if k == 0 {
                return value.is_zero().then(|| Poly::new(quotient));
            }
            quotient[k - 1] = value.clone();
            carry = value;
        }
        unreachable!()
    }

    /// Multiplicity of `root` as a zero, and the cofactor.
    /// Quotient and remainder of division by a nonzero polynomial.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = &rem[k + dd] / &lead;
            if !q.is_zero() {
                for (i, c) in divisor.coeffs.iter().enumerate() {
                    rem[k + i] = &rem[k + i] - &q * c;
                }
            }
            quot[k] = q;
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// `self / divisor` when the division is exact.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(divisor);
        r.is_zero().then_some(q)
    }

    /// Monic greatest common divisor (zero only when both are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            let lead = a.leading();
            a.scale(&lead.recip())
        }
    }

    /// Square-free decomposition `c · Π fᵢ^i` (Yun), returning the monic
    /// non-constant `(fᵢ, i)`.
    pub fn squarefree_factors(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let monic = self.scale(&self.leading().recip());
        let d = monic.derivative();
        let a0 = monic.gcd(&d);
        let mut b = monic.div_exact(&a0).expect("gcd divides");
        let mut c = d.div_exact(&a0).expect("gcd divides");
        let mut dd = &c - &b.derivative();
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&dd);
            b = b.div_exact(&a).expect("gcd divides");
            c = dd.div_exact(&a).expect("gcd divides");
            dd = &c - &b.derivative();
            if a.degree().unwrap_or(0) > 0 {
                out.push((a, i));
            }
            i += 1;
        }
        out
    }

    pub fn strip_root(&self, root: &Rational) -> (usize, Poly) {
        let mut count = 0;
        let mut p = self.clone();
        if p.is_zero() {
            return (0, p);
        }
        while let Some(q) = p.div_root(root) {
            count += 1;
            p = q;
        }
        (count, p)
    }

    /// Rational roots with multiplicity (ascending), plus the cofactor without rational roots.
    ///
    /// Candidates come from the rational root theorem; returns `None` when the
    /// integer coefficients are too large to enumerate divisors.
    pub fn rational_roots(&self) -> Option<(Vec<Rational>, Poly)> {
        if self.is_zero() {
            return None;
        }
        let mut roots = Vec::new();
        let (m, mut rest) = self.strip_root(&Rational::zero());
        roots.extend(std::iter::repeat_n(Rational::zero(), m));
        if rest.degree().unwrap_or(0) == 0 {
            return Some((roots, rest));
        }
        let ints = rest.integer_coefficients();
        let a0 = ints.first()?.abs();
        let an = ints.last()?.abs();
        let ps = small_divisors(&a0)?;
        let qs = small_divisors(&an)?;
        let mut candidates: Vec<Rational> = Vec::new();
        for p in &ps {
            for q in &qs {
                let r = Rational::new(p.clone(), q.clone());
                candidates.push(r.clone());
                candidates.push(-r);
            }
        }
        candidates.sort();
        candidates.dedup();
        for r in candidates {
            if rest.degree().unwrap_or(0) == 0 {
                break;
            }
            let (mult, next) = rest.strip_root(&r);
            if mult > 0 {
                roots.extend(std::iter::repeat_n(r, mult));
                rest = next;
            }
        }
        roots.sort();
        Some((roots, rest))
    }

    /// Coefficients scaled to coprime integers (sign of the original kept).
    pub fn integer_coefficients(&self) -> Vec<BigInt> {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if g.is_zero() {
            return ints;
        }
        ints.into_iter().map(|c| c / &g).collect()
    }

    /// Splits into `content * primitive` with the primitive part having
    /// coprime integer coefficients and a positive leading coefficient.
    pub fn content_and_primitive(&self) -> (Rational, Poly) {
        if self.is_zero() {
            return (Rational::zero(), Poly::zero());
        }
        let mut ints = self.integer_coefficients();
        if ints.last().is_some_and(|c| c.is_negative()) {
            ints = ints.into_iter().map(|c| -c).collect();
        }
        let primitive = Poly::new(ints.into_iter().map(Rational::from_integer).collect());
        let content = self.leading() / primitive.leading();
        (content, primitive)
    }

    /// Exact Lagrange interpolation through `(x_i, y_i)`.
    pub fn interpolate(points: &[(Rational, Rational)]) -> Poly {
        let mut result = Poly::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            let mut basis = Poly::one();
            let mut denom = Rational::one();
            for (j, (xj, _)) in points.iter().enumerate() {
                if i != j {
                    basis = &basis * &Poly::linear(-xj.clone(), Rational::one());
                    denom *= xi - xj;
                }
            }
            result = &result + &basis.scale(&(yi / denom));
        }
        result
    }
}

fn small_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.to_u64()?;
    if n == 0 {
        return Some(vec![BigInt::one()]);
    }
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut divs = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            divs.push(BigInt::from(d));
            if d * d != n {
                divs.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(divs)
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Renders a rational as `p` or `p/q`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let mag = c.abs();
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = k == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{}", fmt_rational(&mag))?;
                if k > 0 {
                    write!(f, "*")?;
                }
            }
            match k {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}
