//! Exact canonical form: a sum of terms `P(x) · Π bᵢ^eᵢ · Π ln(cⱼ)^kⱼ`.
//!
//! `P` is a polynomial, each `bᵢ` a non-constant polynomial base with a
//! negative-integer or non-integer exponent, each `cⱼ` an affine base. Terms
//! whose logarithms agree and whose exponents agree modulo 1 are merged over
//! a common denominator, so rational-function identities cancel exactly.
//!
//! Bases with integer exponents are scaled to constant term 1 (or leading
//! coefficient 1 when the constant term vanishes). Bases with non-integer
//! exponents and log arguments keep their scale, since pulling it out would
//! introduce irrational constants.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::Expr;
use crate::poly::{Poly, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CanonError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot invert {0}")]
    NotInvertible(String),
    #[error("rational power of a constant")]
    ConstantPower,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Term {
    pub logs: BTreeMap<Poly, u32>,
    pub pows: BTreeMap<Poly, Rational>,
    pub poly: Poly,
}

type ClassKey = (Vec<(Poly, u32)>, Vec<(Poly, Rational)>);

fn frac(q: &Rational) -> Rational {
    q - q.floor()
}

fn is_int(q: &Rational) -> bool {
    q.is_integer()
}

fn pow_rational(c: &Rational, n: i64) -> Result<Rational, CanonError> {
    if n < 0 && c.is_zero() {
        return Err(CanonError::DivisionByZero);
    }
    let r = num_traits::pow(c.clone(), n.unsigned_abs() as usize);
    Ok(if n < 0 { r.recip() } else { r })
}

fn to_i64(q: &Rational) -> i64 {
    i64::try_from(q.to_integer()).expect("exponent fits in i64")
}

/// `(s, b/s)` with `b/s` having constant term 1, or leading coefficient 1
/// when the constant term is zero.
pub(crate) fn split_scale(b: &Poly) -> (Rational, Poly) {
    let c0 = b.coeff(0);
    let s = if c0.is_zero() { b.leading() } else { c0 };
    let nb = b.scale(&s.recip());
    (s, nb)
}

impl Term {
    fn constant(c: Rational) -> Term {
        Term {
            logs: BTreeMap::new(),
            pows: BTreeMap::new(),
            poly: Poly::constant(c),
        }
    }

    fn key(&self) -> ClassKey {
        let logs = self.logs.iter().map(|(b, k)| (b.clone(), *k)).collect();
        let fr = self
            .pows
            .iter()
            .filter(|(_, e)| !is_int(e))
            .map(|(b, e)| (b.clone(), frac(e)))
            .collect();
        (logs, fr)
    }

    /// Multiplies the term by `base^e`.
    fn mul_factor(&mut self, base: &Poly, e: &Rational) -> Result<(), CanonError> {
        if e.is_zero() {
            return Ok(());
        }
        if base.is_constant() {
            if !is_int(e) {
                return Err(CanonError::ConstantPower);
            }
            let c = pow_rational(&base.coeff(0), to_i64(e))?;
            self.poly = self.poly.scale(&c);
            return Ok(());
        }
        if let Some(cur) = self.pows.get(base) {
            let total = cur + e;
            self.pows.insert(base.clone(), total);
            return self.fixup(base);
        }
        if is_int(e) {
            let (s, nb) = split_scale(base);
            let n = to_i64(e);
            self.poly = self.poly.scale(&pow_rational(&s, n)?);
            if let Some(cur) = self.pows.get(&nb) {
                let total = cur + e;
                self.pows.insert(nb.clone(), total);
                return self.fixup(&nb);
            }
            if n > 0 {
                self.poly = &self.poly * &nb.pow(n as u32);
            } else {
                self.pows.insert(nb, e.clone());
            }
            return Ok(());
        }
        self.pows.insert(base.clone(), e.clone());
        Ok(())
    }

    /// Restores the invariants for `key` after its exponent changed.
    fn fixup(&mut self, key: &Poly) -> Result<(), CanonError> {
        let e = self.pows[key].clone();
        if e.is_zero() {
            self.pows.remove(key);
            return Ok(());
        }
        if !is_int(&e) {
            return Ok(());
        }
        let (s, _) = split_scale(key);
        if !s.is_one() {
            self.pows.remove(key);
            return self.mul_factor(key, &e);
        }
        if e.is_positive() {
            self.pows.remove(key);
            self.poly = &self.poly * &key.pow(to_i64(&e) as u32);
        }
        Ok(())
    }

    /// Moves polynomial factors of `poly` into matching denominators or
    /// fractional powers.
    fn absorb(&mut self) {
        if self.poly.is_zero() {
            return;
        }
        let keys: Vec<Poly> = self.pows.keys().cloned().collect();
        for key in keys {
            let mut e = self.pows[&key].clone();
            while is_int(&e) && e.is_negative() || !is_int(&e) {
                match self.poly.div_exact(&key) {
                    Some(q) => {
                        self.poly = q;
                        e += Rational::one();
                    }
                    None => break,
                }
                if e.is_zero() {
                    break;
                }
            }
            if e.is_zero() {
                self.pows.remove(&key);
            } else {
                self.pows.insert(key, e);
            }
        }
    }

    fn mul(&self, other: &Term) -> Result<Term, CanonError> {
        let mut t = self.clone();
        t.poly = &t.poly * &other.poly;
        for (b, k) in &other.logs {
            *t.logs.entry(b.clone()).or_insert(0) += k;
        }
        for (b, e) in &other.pows {
            t.mul_factor(b, e)?;
        }
        Ok(t)
    }

    fn derivative(&self) -> Result<Vec<Term>, CanonError> {
        let mut out = Vec::new();
        let mut t = self.clone();
        t.poly = self.poly.derivative();
        out.push(t);
        for (b, e) in &self.pows {
            let mut t = self.clone();
            t.poly = &self.poly * &b.derivative().scale(e);
            t.mul_factor(b, &-Rational::one())?;
            out.push(t);
        }
        for (b, k) in &self.logs {
            let mut t = self.clone();
            if *k == 1 {
                t.logs.remove(b);
            } else {
                t.logs.insert(b.clone(), k - 1);
            }
            t.poly = &self.poly * &b.derivative().scale(&Rational::from_integer((*k).into()));
            t.mul_factor(b, &-Rational::one())?;
            out.push(t);
        }
        Ok(out)
    }
}

/// A normalized sum of terms; the empty sum is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Canon {
    pub(crate) terms: Vec<Term>,
}

impl Canon {
    pub fn zero() -> Canon {
        Canon { terms: Vec::new() }
    }

    pub fn constant(c: Rational) -> Canon {
        Canon::from_terms(vec![Term::constant(c)])
    }

    pub fn from_poly(p: &Poly) -> Canon {
        Canon::from_terms(vec![Term {
            poly: p.clone(),
            ..Term::constant(Rational::one())
        }])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn from_terms(terms: Vec<Term>) -> Canon {
        let mut classes: BTreeMap<ClassKey, Vec<Term>> = BTreeMap::new();
        for t in terms {
            if !t.poly.is_zero() {
                classes.entry(t.key()).or_default().push(t);
            }
        }
        let mut out = Vec::new();
        for (_, group) in classes {
            let mut merged = merge(group);
            merged.absorb();
            if !merged.poly.is_zero() {
                out.push(merged);
            }
        }
        Canon { terms: out }
    }

    pub fn from_expr(e: &Expr) -> Result<Canon, CanonError> {
        Ok(match e {
            Expr::Const(c) => Canon::constant(c.clone()),
            Expr::X => Canon::from_poly(&Poly::x()),
            Expr::Neg(a) => Canon::from_expr(a)?.neg(),
            Expr::Add(a, b) => Canon::from_expr(a)?.add(&Canon::from_expr(b)?),
            Expr::Sub(a, b) => Canon::from_expr(a)?.add(&Canon::from_expr(b)?.neg()),
            Expr::Mul(a, b) => Canon::from_expr(a)?.mul(&Canon::from_expr(b)?)?,
            Expr::Div(a, b) => Canon::from_expr(a)?.mul(&Canon::from_expr(b)?.inverse()?)?,
            Expr::Pow(a, n) => Canon::from_expr(a)?.powi(*n)?,
            Expr::AffinePow(b, q) => {
                let mut t = Term::constant(Rational::one());
                t.mul_factor(&b.to_poly(), q)?;
                Canon::from_terms(vec![t])
            }
            Expr::Ln(b) => {
                let base = b.to_poly();
                let (s, nb) = split_scale(&base);
                let key = if s.is_one() { nb } else { base };
                let mut t = Term::constant(Rational::one());
                t.logs.insert(key, 1);
                Canon::from_terms(vec![t])
            }
        })
    }

    pub fn neg(&self) -> Canon {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                poly: -&t.poly,
                ..t.clone()
            })
            .collect();
        Canon { terms }
    }

    pub fn add(&self, other: &Canon) -> Canon {
        Canon::from_terms(self.terms.iter().chain(&other.terms).cloned().collect())
    }

    pub fn sub(&self, other: &Canon) -> Canon {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Canon) -> Result<Canon, CanonError> {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.mul(b)?);
            }
        }
        Ok(Canon::from_terms(terms))
    }

    pub fn mul_poly(&self, p: &Poly) -> Canon {
        self.mul(&Canon::from_poly(p))
            .expect("polynomial products never fail")
    }

    /// Reciprocal of a single log-free term.
    pub fn inverse(&self) -> Result<Canon, CanonError> {
        let t = match self.terms.as_slice() {
            [] => return Err(CanonError::DivisionByZero),
            [t] if t.logs.is_empty() => t,
            _ => return Err(CanonError::NotInvertible(self.to_expr().to_string())),
        };
        let (roots, cofactor) = t
            .poly
            .rational_roots()
            .ok_or_else(|| CanonError::NotInvertible(self.to_expr().to_string()))?;
        let mut inv = Term::constant(Rational::one());
        for r in roots {
            inv.mul_factor(&Poly::linear(-r, Rational::one()), &-Rational::one())?;
        }
        if cofactor.is_constant() {
            inv.mul_factor(&cofactor, &-Rational::one())?;
        } else {
            inv.poly = inv.poly.scale(&cofactor.leading().recip());
            for (f, m) in cofactor.squarefree_factors() {
                inv.mul_factor(&f, &-Rational::from_integer((m as i64).into()))?;
            }
        }
        for (b, e) in &t.pows {
            inv.mul_factor(b, &-e)?;
        }
        Ok(Canon::from_terms(vec![inv]))
    }

    pub fn powi(&self, n: i64) -> Result<Canon, CanonError> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Canon::constant(Rational::one());
        let mut sq = base;
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&sq)?;
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul(&sq)?;
            }
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Canon {
        let mut terms = Vec::new();
        for t in &self.terms {
            // exponents only decrease by one, which never divides by zero
            terms.extend(t.derivative().expect("term derivative"));
        }
        Canon::from_terms(terms)
    }

    pub fn nth_derivative(&self, n: usize) -> Canon {
        (0..n).fold(self.clone(), |c, _| c.derivative())
    }

    pub fn as_polynomial(&self) -> Option<Poly> {
        match self.terms.as_slice() {
            [] => Some(Poly::zero()),
            [t] if t.logs.is_empty() && t.pows.is_empty() => Some(t.poly.clone()),
            _ => None,
        }
    }

    pub fn to_expr(&self) -> Expr {
        super::print::canon_expr(self)
    }
}

fn merge(group: Vec<Term>) -> Term {
    if group.len() == 1 {
        return group.into_iter().next().unwrap();
    }
    let mut mins: BTreeMap<Poly, Rational> = BTreeMap::new();
    for t in &group {
        for (b, e) in &t.pows {
            let m = mins.entry(b.clone()).or_insert_with(|| e.clone());
            if e < m {
                *m = e.clone();
            }
        }
    }
    // a base absent from some term has exponent 0 there
    for (b, m) in mins.iter_mut() {
        if group.iter().any(|t| !t.pows.contains_key(b)) && m.is_positive() {
            *m = Rational::zero();
        }
    }
    let mut poly = Poly::zero();
    for t in &group {
        let mut p = t.poly.clone();
        for (b, m) in &mins {
            let e = t.pows.get(b).cloned().unwrap_or_else(Rational::zero);
            let k = to_i64(&(e - m));
            p = &p * &b.pow(k as u32);
        }
        poly = &poly + &p;
    }
    let pows = mins.into_iter().filter(|(_, m)| !m.is_zero()).collect();
    Term {
        logs: group[0].logs.clone(),
        pows,
        poly,
    }
}
