//! Small dense complex linear algebra for one- and two-qubit operators.
//!
//! Matrices are fixed-size and row-major. For two-qubit operators the first
//! (A) factor indexes the high-order qubit: basis order is |00⟩, |01⟩, |10⟩,
//! |11⟩ with Alice's bit on the left.

use std::cmp::Ordering;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Square complex matrix of fixed dimension `N`, stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix<const N: usize>(pub [[C64; N]; N]);

/// Single-qubit operator.
pub type Op2 = Matrix<2>;
/// Two-qubit operator.
pub type Op4 = Matrix<4>;

pub type Vec2 = [C64; 2];
pub type Vec4 = [C64; 4];

impl<const N: usize> Matrix<N> {
    pub const DIM: usize = N;

    pub fn zeros() -> Self {
        Matrix([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(|i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diag_real(d: [f64; N]) -> Self {
        Self::from_fn(|i, j| if i == j { C64::new(d[i], 0.0) } else { ZERO })
    }

    /// `|v⟩⟨v|`
    pub fn outer(v: &[C64; N]) -> Self {
        Self::from_fn(|i, j| v[i] * v[j].conj())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// `Tr(self · other)`
    pub fn trace_product(&self, other: &Self) -> C64 {
        let mut acc = ZERO;
        for i in 0..N {
            for k in 0..N {
                acc += self.0[i][k] * other.0[k][i];
            }
        }
        acc
    }

    pub fn apply(&self, v: &[C64; N]) -> [C64; N] {
        let mut out = [ZERO; N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..N).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }

    /// `⟨v|M|v⟩`
    pub fn expectation(&self, v: &[C64; N]) -> C64 {
        inner(v, &self.apply(v))
    }

    /// Hermitian part `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_real(0.5)
    }
}

impl<const N: usize> Default for Matrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Index<(usize, usize)> for Matrix<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Matrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl<const N: usize> Neg for Matrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_real(-1.0)
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| (0..N).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
    }
}

impl<const N: usize> Mul<f64> for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale_real(rhs)
    }
}

/// `⟨a|b⟩`, conjugate-linear in the first argument.
pub fn inner<const N: usize>(a: &[C64; N], b: &[C64; N]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vnorm<const N: usize>(v: &[C64; N]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize<const N: usize>(v: &[C64; N]) -> Result<[C64; N]> {
    let n = vnorm(v);
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::usage("cannot normalize a zero or non-finite vector"));
    }
    Ok(v.map(|z| z / n))
}

pub fn real_vec<const N: usize>(v: [f64; N]) -> [C64; N] {
    v.map(|x| C64::new(x, 0.0))
}

/// `|a⟩ ⊗ |b⟩`
pub fn kron_vec(a: &Vec2, b: &Vec2) -> Vec4 {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

/// Single-qubit Pauli label; `I` is σ₀.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Pauli {
        Pauli::ALL[i]
    }

    pub fn label(self) -> &'static str {
        match self {
            Pauli::I => "0",
            Pauli::X => "x",
            Pauli::Y => "y",
            Pauli::Z => "z",
        }
    }

    pub fn matrix(self) -> Op2 {
        match self {
            Pauli::I => Op2::identity(),
            Pauli::X => Op2::from_real([[0.0, 1.0], [1.0, 0.0]]),
            Pauli::Y => Matrix([[ZERO, -I], [I, ZERO]]),
            Pauli::Z => Op2::from_real([[1.0, 0.0], [0.0, -1.0]]),
        }
    }
}

/// `σ_i ⊗ σ_j`
pub fn pauli_product(i: Pauli, j: Pauli) -> Op4 {
    kron(&i.matrix(), &j.matrix())
}

/// Tensor product; `a` acts on the high-order qubit.
pub fn kron(a: &Op2, b: &Op2) -> Op4 {
    Op4::from_fn(|r, c| a.0[r / 2][c / 2] * b.0[r % 2][c % 2])
}

/// Runtime-checked tensor product for dynamically sized operands given as
/// row-major slices. Only 2×2 ⊗ 2×2 is supported.
pub fn kron_dyn(a: &[C64], b: &[C64]) -> Result<Op4> {
    if a.len() != 4 || b.len() != 4 {
        return Err(Error::usage(format!(
            "kron expects two 2x2 operands, got {} and {} entries",
            a.len(),
            b.len()
        )));
    }
    let m = |s: &[C64]| Matrix([[s[0], s[1]], [s[2], s[3]]]);
    Ok(kron(&m(a), &m(b)))
}

/// Which tensor factor a partial transposition acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Transposition of one tensor factor. Entries are only permuted, so the
/// map is exactly involutive.
pub fn partial_transpose(m: &Op4, side: Side) -> Op4 {
    Op4::from_fn(|r, c| {
        let (i, k) = (r / 2, r % 2);
        let (j, l) = (c / 2, c % 2);
        match side {
            Side::B => m.0[2 * i + l][2 * j + k],
            Side::A => m.0[2 * j + k][2 * i + l],
        }
    })
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues ascend; `vectors[k]` pairs with `values[k]`. Each vector has
/// its first component of largest modulus made real positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenSystem<const N: usize> {
    pub values: [f64; N],
    pub vectors: [[C64; N]; N],
}

impl<const N: usize> EigenSystem<N> {
    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    pub fn min_vector(&self) -> [C64; N] {
        self.vectors[0]
    }

    /// `Σ λ_k |v_k⟩⟨v_k|`
    pub fn reconstruct(&self) -> Matrix<N> {
        let mut m = Matrix::<N>::zeros();
        for k in 0..N {
            m = m + Matrix::outer(&self.vectors[k]).scale_real(self.values[k]);
        }
        m
    }

    /// Projector onto the span of eigenvectors whose eigenvalue lies within
    /// `tol` of `lambda`.
    pub fn eigenprojector(&self, lambda: f64, tol: f64) -> Matrix<N> {
        let mut p = Matrix::<N>::zeros();
        for k in 0..N {
            if (self.values[k] - lambda).abs() <= tol {
                p = p + Matrix::outer(&self.vectors[k]);
            }
        }
        p
    }
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Cyclic complex Jacobi eigensolver.
///
/// Fails with a validation error if `‖m − m†‖_max > tol` and with a numeric
/// error if the off-diagonal mass does not vanish within the sweep budget.
/// The result depends only on the input bits.
pub fn hermitian_eig<const N: usize>(m: &Matrix<N>, tol: f64) -> Result<EigenSystem<N>> {
    if !m.is_finite() {
        return Err(Error::validation("matrix has non-finite entries"));
    }
    let asym = m.max_abs_diff(&m.adjoint());
    if asym > tol {
        return Err(Error::validation(format!(
            "matrix is not Hermitian: max |M - M^dagger| = {asym:e} exceeds {tol:e}"
        )));
    }
    let mut a = m.hermitian_part();
    for i in 0..N {
        a.0[i][i].im = 0.0;
    }
    let mut v = Matrix::<N>::identity();
    let scale = a.norm();

    let off = |a: &Matrix<N>| {
        let mut s = 0.0;
        for i in 0..N {
            for j in 0..N {
                if i != j {
                    s += a.0[i][j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off(&a) <= 1e-17 * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let h = a.0[p][q];
                let r = h.norm();
                if r <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = h / r;
                let app = a.0[p][p].re;
                let aqq = a.0[q][q].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta.is_infinite() {
                    0.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                if t == 0.0 {
                    // |h| negligible next to the diagonal gap.
                    a.0[p][q] = ZERO;
                    a.0[q][p] = ZERO;
                    continue;
                }
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = diag(1, conj(phase)) · [[c, s], [-s, c]] in the (p, q) plane.
                let mut g = Matrix::<N>::identity();
                g.0[p][p] = C64::new(c, 0.0);
                g.0[p][q] = C64::new(s, 0.0);
                g.0[q][p] = phase.conj() * (-s);
                g.0[q][q] = phase.conj() * c;
                a = g.adjoint() * a * g;
                a.0[p][q] = ZERO;
                a.0[q][p] = ZERO;
                for i in 0..N {
                    a.0[i][i].im = 0.0;
                }
                v = v * g;
            }
        }
    }
    if off(&a) > 1e-13 * scale {
        return Err(Error::numeric(format!(
            "Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    let mut pairs: Vec<(f64, [C64; N])> = (0..N)
        .map(|k| {
            let col: [C64; N] = std::array::from_fn(|i| v.0[i][k]);
            (a.0[k][k].re, normalize_phase(col))
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

    // Order eigenvectors inside clusters of (numerically) equal eigenvalues.
    let tie = tol.max(f64::EPSILON * 16.0) * scale.max(1.0);
    let mut start = 0;
    while start < N {
        let mut end = start + 1;
        while end < N && pairs[end].0 - pairs[end - 1].0 <= tie {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|x, y| lex_cmp(&x.1, &y.1));
        }
        start = end;
    }

    let mut out = EigenSystem {
        values: [0.0; N],
        vectors: [[ZERO; N]; N],
    };
    for (k, (val, vec)) in pairs.into_iter().enumerate() {
        out.values[k] = val;
        out.vectors[k] = vec;
    }
    Ok(out)
}

/// Rotates the global phase so the first component of largest modulus is
/// real positive.
pub fn normalize_phase<const N: usize>(v: [C64; N]) -> [C64; N] {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return v;
    }
    let lead = v.iter().position(|z| z.norm() >= max * (1.0 - 1e-12)).unwrap_or(0);
    let ph = v[lead].conj() / v[lead].norm();
    let mut out = v.map(|z| z * ph);
    out[lead] = C64::new(out[lead].norm(), 0.0);
    out
}

fn lex_cmp<const N: usize>(a: &[C64; N], b: &[C64; N]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            // Descending, so the vector with the larger leading entry wins.
            return o.reverse();
        }
    }
    Ordering::Equal
}

/// Schmidt form `Σ c_i |u_i⟩|v_i⟩` of a two-qubit pure vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchmidtForm {
    /// Nonnegative, descending.
    pub coefficients: [f64; 2],
    pub basis_a: [Vec2; 2],
    pub basis_b: [Vec2; 2],
}

impl SchmidtForm {
    pub fn reconstruct(&self) -> Vec4 {
        let mut out = [ZERO; 4];
        for k in 0..2 {
            let t = kron_vec(&self.basis_a[k], &self.basis_b[k]);
            for i in 0..4 {
                out[i] += t[i] * self.coefficients[k];
            }
        }
        out
    }

    pub fn is_product(&self, tol: f64) -> bool {
        self.coefficients[1] <= tol
    }
}

/// Schmidt decomposition via the left singular vectors of the 2×2 amplitude
/// matrix `M_{ij} = ⟨ij|ψ⟩`.
pub fn schmidt_decompose(psi: &Vec4) -> Result<SchmidtForm> {
    let n = vnorm(psi);
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::usage("Schmidt decomposition of a zero vector"));
    }
    let m = Matrix([[psi[0], psi[1]], [psi[2], psi[3]]]);
    let mmd = m * m.adjoint();
    let eig = hermitian_eig(&mmd, 1e-12 * n * n)?;
    // Descending singular values: largest eigenvalue first.
    let us = [eig.vectors[1], eig.vectors[0]];
    let mut coeffs = [0.0; 2];
    let mut vs = [[ZERO; 2]; 2];
    for k in 0..2 {
        // w_k = u_k† M, so ψ = Σ_k |u_k⟩ ⊗ w_k exactly.
        let u = us[k];
        let w: Vec2 = [
            u[0].conj() * m.0[0][0] + u[1].conj() * m.0[1][0],
            u[0].conj() * m.0[0][1] + u[1].conj() * m.0[1][1],
        ];
        coeffs[k] = vnorm(&w);
        vs[k] = w;
    }
    let tiny = 1e-15 * n;
    if coeffs[0] <= tiny {
        return Err(Error::numeric("degenerate amplitude matrix"));
    }
    let v0 = vs[0].map(|z| z / coeffs[0]);
    let v1 = if coeffs[1] > tiny {
        vs[1].map(|z| z / coeffs[1])
    } else {
        coeffs[1] = 0.0;
        [-v0[1].conj(), v0[0].conj()]
    };
    // Numerical noise can swap the order when the coefficients are equal.
    if coeffs[1] > coeffs[0] {
        return Ok(SchmidtForm {
            coefficients: [coeffs[1], coeffs[0]],
            basis_a: [us[1], us[0]],
            basis_b: [v1, v0],
        });
    }
    Ok(SchmidtForm {
        coefficients: coeffs,
        basis_a: us,
        basis_b: [v0, v1],
    })
}
