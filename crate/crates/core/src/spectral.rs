//! Galerkin spectra of the Legendre operator and its square.
//!
//! The weak forms are `a₁(u,v) = ∫(1−x²)u′v′` and
//! `a₂(u,v) = ∫(1−x²)²u″v″ + 2(1−x²)u′v′`. The generalized problem
//! `Kv = λMv` is reduced by a Cholesky factor of `M` and diagonalized with
//! cyclic Jacobi rotations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{gauss_legendre, legendre_derivatives, QuadratureError, QuadratureRule};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("mass matrix lost positive definiteness at pivot {pivot} (value {value:e}); reduce N")]
    Conditioning { pivot: usize, value: f64 },
    #[error("monomial basis is limited to N <= {MONOMIAL_MAX_N} (got {0}); reduce N or use the legendre basis")]
    MonomialTooLarge(usize),
    #[error("N must be at least {min} (got {got})")]
    TooSmall { got: usize, min: usize },
    #[error("matrix dimensions do not match")]
    Dimension,
    #[error("Jacobi iteration did not reach off-diagonal tolerance after {0} sweeps")]
    NoConvergence(usize),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("unknown {kind} `{value}`")]
    Unknown { kind: &'static str, value: String },
}

pub const MONOMIAL_MAX_N: usize = 14;
pub const JACOBI_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeakForm {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Legendre,
    Monomial,
}

impl FromStr for Basis {
    type Err = SpectralError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "legendre" => Ok(Basis::Legendre),
            "monomial" => Ok(Basis::Monomial),
            _ => Err(SpectralError::Unknown {
                kind: "basis",
                value: s.into(),
            }),
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Legendre => "legendre",
            Basis::Monomial => "monomial",
        })
    }
}

/// `A` (weak form a₁) or `A²` (weak form a₂).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OpTag {
    A,
    A2,
}

impl OpTag {
    pub fn form(self) -> WeakForm {
        match self {
            OpTag::A => WeakForm::First,
            OpTag::A2 => WeakForm::Second,
        }
    }

    /// n(n+1) or n²(n+1)².
    pub fn target(self, n: usize) -> f64 {
        let v = (n * (n + 1)) as f64;
        match self {
            OpTag::A => v,
            OpTag::A2 => v * v,
        }
    }
}

impl FromStr for OpTag {
    type Err = SpectralError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(OpTag::A),
            "A2" | "a2" => Ok(OpTag::A2),
            _ => Err(SpectralError::Unknown {
                kind: "operator",
                value: s.into(),
            }),
        }
    }
}

/// Dense symmetric matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Matrix::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Matrix::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "matrix must be square");
            m.data[i * n..(i + 1) * n].copy_from_slice(r);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data
            .chunks(self.n.max(1))
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Values of φᵢ and its first two derivatives at x.
fn basis_values(basis: Basis, i: usize, x: f64) -> [f64; 3] {
    match basis {
        Basis::Legendre => {
            let d = legendre_derivatives(i, x, 2);
            [d[0], d[1], d[2]]
        }
        Basis::Monomial => {
            let p = |k: usize| if i >= k { x.powi((i - k) as i32) } else { 0.0 };
            let i_f = i as f64;
            [p(0), i_f * p(1), i_f * (i_f - 1.0) * p(2)]
        }
    }
}

/// The Gauss rule used for a dimension-N assembly (N + 4 nodes).
pub fn assembly_rule(n: usize) -> Result<QuadratureRule, SpectralError> {
    Ok(gauss_legendre(n + 4)?)
}

fn assemble<F: Fn(&[f64; 3], &[f64; 3], f64) -> f64>(
    basis: Basis,
    n: usize,
    rule: &QuadratureRule,
    f: F,
) -> Matrix {
    let tables: Vec<Vec<[f64; 3]>> = rule
        .nodes
        .iter()
        .map(|x| (0..n).map(|i| basis_values(basis, i, *x)).collect())
        .collect();
    let mut m = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let v: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .zip(&tables)
                .map(|((x, w), t)| w * f(&t[i], &t[j], *x))
                .sum();
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Entries `form(φᵢ, φⱼ)`, i, j < n.
pub fn stiffness_matrix(form: WeakForm, basis: Basis, n: usize, rule: &QuadratureRule) -> Matrix {
    assemble(basis, n, rule, |u, v, x| {
        let w = 1.0 - x * x;
        match form {
            WeakForm::First => w * u[1] * v[1],
            WeakForm::Second => w * w * u[2] * v[2] + 2.0 * w * u[1] * v[1],
        }
    })
}

/// Mass entries `∫φᵢφⱼ`.
pub fn gram_matrix(basis: Basis, n: usize, rule: &QuadratureRule) -> Matrix {
    assemble(basis, n, rule, |u, v, _| u[0] * v[0])
}

/// Lower Cholesky factor; a non-positive or vanishing pivot is a
/// conditioning error.
pub fn cholesky(m: &Matrix) -> Result<Matrix, SpectralError> {
    let n = m.n;
    let scale = (0..n).map(|i| m[(i, i)].abs()).fold(0.0, f64::max);
    let mut l = Matrix::zeros(n);
    for j in 0..n {
        let s: f64 = (0..j).map(|k| l[(j, k)] * l[(j, k)]).sum();
        let d = m[(j, j)] - s;
        if !(d > 1e-15 * scale) {
            return Err(SpectralError::Conditioning { pivot: j, value: d });
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let s: f64 = (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum();
            l[(i, j)] = (m[(i, j)] - s) / d;
        }
    }
    Ok(l)
}

/// Solve `L y = b` in place.
fn forward(l: &Matrix, b: &mut [f64]) {
    for i in 0..l.n {
        let s: f64 = (0..i).map(|k| l[(i, k)] * b[k]).sum();
        b[i] = (b[i] - s) / l[(i, i)];
    }
}

/// Solve `Lᵀ y = b` in place.
fn backward(l: &Matrix, b: &mut [f64]) {
    for i in (0..l.n).rev() {
        let s: f64 = (i + 1..l.n).map(|k| l[(k, i)] * b[k]).sum();
        b[i] = (b[i] - s) / l[(i, i)];
    }
}

/// Eigenvalues (ascending) and matching eigenvectors as columns.
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

/// Cyclic Jacobi on a symmetric matrix.
pub fn jacobi_eigen(a: &Matrix) -> Result<Eigen, SpectralError> {
    let n = a.n;
    let mut a = a.clone();
    let mut v = Matrix::identity(n);
    let norm = a
        .data
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    let off = |a: &Matrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..i {
                s += 2.0 * a[(i, j)] * a[(i, j)];
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&a) > JACOBI_TOL * norm {
        if sweeps == MAX_SWEEPS {
            return Err(SpectralError::NoConvergence(sweeps));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|i, j| a[(*i, *i)].total_cmp(&a[(*j, *j)]));
    Ok(Eigen {
        values: order.iter().map(|i| a[(*i, *i)]).collect(),
        vectors: order
            .iter()
            .map(|i| (0..n).map(|k| v[(k, *i)]).collect())
            .collect(),
        sweeps,
    })
}

/// Solve `Kv = λMv` through `M = LLᵀ` and `C = L⁻¹KL⁻ᵀ`.
pub fn generalized_symmetric_eigen(k: &Matrix, m: &Matrix) -> Result<Eigen, SpectralError> {
    if k.n != m.n {
        return Err(SpectralError::Dimension);
    }
    let n = k.n;
    let l = cholesky(m)?;
    // columns of L⁻¹K, then rows of L⁻¹(L⁻¹K)ᵀ
    let mut y = Matrix::zeros(n);
    for j in 0..n {
        let mut col: Vec<f64> = (0..n).map(|i| k[(i, j)]).collect();
        forward(&l, &mut col);
        for i in 0..n {
            y[(i, j)] = col[i];
        }
    }
    let mut c = Matrix::zeros(n);
    for i in 0..n {
        let mut row: Vec<f64> = (0..n).map(|j| y[(i, j)]).collect();
        forward(&l, &mut row);
        for j in 0..n {
            c[(i, j)] = row[j];
        }
    }
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (c[(i, j)] + c[(j, i)]);
            c[(i, j)] = avg;
            c[(j, i)] = avg;
        }
    }
    let mut e = jacobi_eigen(&c)?;
    for v in &mut e.vectors {
        backward(&l, v);
    }
    Ok(e)
}

pub fn generalized_symmetric_eigenvalues(
    k: &Matrix,
    m: &Matrix,
) -> Result<Vec<f64>, SpectralError> {
    Ok(generalized_symmetric_eigen(k, m)?.values)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub index: usize,
    pub eigenvalue: f64,
    pub target: f64,
    pub abs_error: f64,
    /// `‖Kv − λMv‖ / (‖K‖·‖v‖)`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub op: OpTag,
    pub basis: Basis,
    pub n: usize,
    pub sweeps: usize,
    pub entries: Vec<SpectrumEntry>,
}

impl SpectrumResult {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.eigenvalue).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,eigenvalue,target,abs_error\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{:e},{:e},{:e}\n",
                e.index, e.eigenvalue, e.target, e.abs_error
            ));
        }
        out
    }
}

pub const SPECTRUM_MIN_N: usize = 4;

/// Assemble, solve and report against n(n+1) or n²(n+1)².
pub fn spectrum(op: OpTag, basis: Basis, n: usize) -> Result<SpectrumResult, SpectralError> {
    if n < SPECTRUM_MIN_N {
        return Err(SpectralError::TooSmall {
            got: n,
            min: SPECTRUM_MIN_N,
        });
    }
    if basis == Basis::Monomial && n > MONOMIAL_MAX_N {
        return Err(SpectralError::MonomialTooLarge(n));
    }
    let rule = assembly_rule(n)?;
    let k = stiffness_matrix(op.form(), basis, n, &rule);
    let m = gram_matrix(basis, n, &rule);
    let e = generalized_symmetric_eigen(&k, &m)?;
    let k_norm = k.data.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    let entries = e
        .values
        .iter()
        .zip(&e.vectors)
        .enumerate()
        .map(|(i, (lambda, v))| {
            let kv = k.mul_vec(v);
            let mv = m.mul_vec(v);
            let r: f64 = kv
                .iter()
                .zip(&mv)
                .map(|(a, b)| (a - lambda * b).powi(2))
                .sum::<f64>()
                .sqrt();
            let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let target = op.target(i);
            SpectrumEntry {
                index: i,
                eigenvalue: *lambda,
                target,
                abs_error: (lambda - target).abs(),
                residual: r / (k_norm * vn),
            }
        })
        .collect();
    Ok(SpectrumResult {
        op,
        basis,
        n,
        sweeps: e.sweeps,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_matrices_are_diagonal() {
        let n = 10;
        let rule = assembly_rule(n).unwrap();
        let a1 = stiffness_matrix(WeakForm::First, Basis::Legendre, n, &rule);
        let a2 = stiffness_matrix(WeakForm::Second, Basis::Legendre, n, &rule);
        let g = gram_matrix(Basis::Legendre, n, &rule);
        for i in 0..n {
            let h = 2.0 / (2 * i + 1) as f64;
            let l = (i * (i + 1)) as f64;
            assert!((a1[(i, i)] - l * h).abs() < 1e-11 * (1.0 + l));
            assert!((a2[(i, i)] - l * l * h).abs() < 1e-9 * (1.0 + l * l));
            assert!((g[(i, i)] - h).abs() < 1e-14);
            for j in 0..i {
                assert!(
                    a1[(i, j)].abs() < 1e-11 && a2[(i, j)].abs() < 1e-8 && g[(i, j)].abs() < 1e-14
                );
            }
        }
        assert!(a2.max_asymmetry() <= 1e-13);
    }

    #[test]
    fn monomial_entries() {
        let rule = assembly_rule(2).unwrap();
        let a1 = stiffness_matrix(WeakForm::First, Basis::Monomial, 2, &rule);
        assert!((a1[(1, 1)] - 4.0 / 3.0).abs() < 1e-14);
        let g = gram_matrix(Basis::Monomial, 2, &rule);
        let want = [[2.0, 0.0], [0.0, 2.0 / 3.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((g[(i, j)] - want[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn trivial_eigenproblems() {
        let i4 = Matrix::identity(4);
        assert!(generalized_symmetric_eigenvalues(&i4, &i4)
            .unwrap()
            .iter()
            .all(|v| (v - 1.0).abs() < 1e-15));
        let k = Matrix::diagonal(&[12.0, 0.0, 6.0, 2.0]);
        assert_eq!(
            generalized_symmetric_eigenvalues(&k, &i4).unwrap(),
            vec![0.0, 2.0, 6.0, 12.0]
        );
    }

    #[test]
    fn dense_jacobi() {
        let a = Matrix::from_rows(&[
            vec![2.0, 1.0, 0.0],
            vec![1.0, 2.0, 1.0],
            vec![0.0, 1.0, 2.0],
        ]);
        let e = jacobi_eigen(&a).unwrap();
        let r = 2f64.sqrt();
        for (v, w) in e.values.iter().zip([2.0 - r, 2.0, 2.0 + r]) {
            assert!((v - w).abs() < 1e-14);
        }
    }

    #[test]
    fn spectra() {
        let a = spectrum(OpTag::A, Basis::Legendre, 12).unwrap();
        assert!(a.entries.iter().all(|e| e.abs_error <= 1e-9));
        let a2 = spectrum(OpTag::A2, Basis::Legendre, 12).unwrap();
        assert!(a2.entries.iter().all(|e| e.abs_error <= 1e-7));
        let m = spectrum(OpTag::A2, Basis::Monomial, 10).unwrap();
        assert!(
            m.entries[..4].iter().all(|e| e.abs_error <= 1e-4),
            "{:?}",
            m.eigenvalues()
        );
        let m8 = spectrum(OpTag::A, Basis::Monomial, 8).unwrap();
        assert!(m8.entries[..5].iter().all(|e| e.abs_error <= 1e-8));
        assert!(m8.entries.iter().all(|e| e.residual < 1e-10));
    }

    #[test]
    fn monomial_limits() {
        assert!(matches!(
            spectrum(OpTag::A, Basis::Monomial, 15),
            Err(SpectralError::MonomialTooLarge(15))
        ));
        assert!(matches!(
            spectrum(OpTag::A, Basis::Legendre, 3),
            Err(SpectralError::TooSmall { .. })
        ));
        // N = 14 is at the edge: either outcome is acceptable, but a success
        // must still be accurate on the low end.
        if let Ok(r) = spectrum(OpTag::A, Basis::Monomial, 14) {
            assert!(r.entries[..4].iter().all(|e| e.abs_error < 1e-4));
        }
    }

    #[test]
    fn csv_columns() {
        let r = spectrum(OpTag::A, Basis::Legendre, 4).unwrap();
        let csv = r.to_csv();
        assert!(csv.starts_with("index,eigenvalue,target,abs_error\n"));
        assert_eq!(csv.lines().count(), 5);
    }
}
