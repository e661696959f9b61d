//! Dense complex linear algebra on small multipartite spaces.
//!
//! Tensor factors are ordered most-significant first: for dims `[a, b]` the
//! basis index of `|i⟩⊗|j⟩` is `i·b + j`, matching the Kronecker product.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{guardrail, invalid, mismatch, Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest matrix handed to the Hermitian eigensolver.
pub const MAX_EIGEN_DIM: usize = 4096;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-9;
pub const NORM_TOL: f64 = 1e-12;
/// Eigenvalues below this are treated as exact zeros by [`psd_power`].
pub const NULL_EIGENVALUE: f64 = 1e-14;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Deterministic generator for task `task` of a run seeded with `seed`.
///
/// Each task gets its own ChaCha stream, so parallel work reproduces the
/// serial result regardless of scheduling.
pub fn task_rng(seed: u64, task: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

fn dims_product(dims: &[usize]) -> Result<usize> {
    if dims.contains(&0) {
        return Err(invalid(format!("factor dimensions must be positive, got {dims:?}")));
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| invalid(format!("factor dimensions {dims:?} overflow")))
}

/// Largest `|A_ij − conj(A_ji)|`.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in j..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_hermitian(a: &CMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(mismatch("square matrix", format!("{}x{}", a.nrows(), a.ncols())));
    }
    let scale = a.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    let defect = hermitian_defect(a);
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// `(A + A†)/2`.
pub fn hermitize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

fn zheevd(a: &CMatrix, vectors: bool) -> Result<(Vec<f64>, CMatrix)> {
    check_hermitian(a)?;
    let n = a.nrows();
    if n > MAX_EIGEN_DIM {
        return Err(guardrail("Hermitian eigendecomposition dimension", n, MAX_EIGEN_DIM));
    }
    let mut w = vec![0.0; n];
    if n == 0 {
        return Ok((w, a.clone()));
    }
    let mut m = hermitize(a);
    let jobz = if vectors { b'V' } else { b'N' };
    let n32 = n as i32;
    let mut info = 0;
    let mut work = vec![ZERO; 1];
    let mut rwork = vec![0.0; 1];
    let mut iwork = vec![0i32; 1];
    // SAFETY: buffers are sized per the LAPACK workspace query and the matrix
    // is a contiguous column-major n×n slice.
    unsafe {
        lapack::zheevd(
            jobz, b'L', n32, m.as_mut_slice(), n32, &mut w, &mut work, -1, &mut rwork, -1,
            &mut iwork, -1, &mut info,
        );
    }
    let lwork = work[0].re as usize;
    let lrwork = rwork[0] as usize;
    let liwork = iwork[0] as usize;
    let mut work = vec![ZERO; lwork.max(1)];
    let mut rwork = vec![0.0; lrwork.max(1)];
    let mut iwork = vec![0i32; liwork.max(1)];
    unsafe {
        lapack::zheevd(
            jobz,
            b'L',
            n32,
            m.as_mut_slice(),
            n32,
            &mut w,
            &mut work,
            lwork as i32,
            &mut rwork,
            lrwork as i32,
            &mut iwork,
            liwork as i32,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Numerical(format!("zheevd failed with info = {info}")));
    }
    Ok((w, m))
}

/// Ascending eigenvalues and the matching orthonormal eigenvectors (columns).
pub fn hermitian_eigen(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    zheevd(a, true)
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    Ok(zheevd(a, false)?.0)
}

/// `V diag(f(w)) V†`.
pub fn spectral_map(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let mut scaled = vectors.clone();
    for (j, &w) in values.iter().enumerate() {
        let s = f(w);
        scaled.column_mut(j).scale_mut(s);
    }
    hermitize(&(scaled * vectors.adjoint()))
}

/// Sum of absolute eigenvalues.
pub fn trace_norm(a: &CMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(a)?.iter().map(|w| w.abs()).sum())
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Maps each index of the permuted space to the index it came from.
///
/// New factor `j` is old factor `perm[j]`.
fn permutation_map(dims: &[usize], perm: &[usize]) -> Result<Vec<usize>> {
    let k = dims.len();
    let mut seen = vec![false; k];
    if perm.len() != k || perm.iter().any(|&p| p >= k || std::mem::replace(&mut seen[p], true)) {
        return Err(invalid(format!("{perm:?} is not a permutation of {k} factors")));
    }
    let total = dims_product(dims)?;
    let mut old_stride = vec![1usize; k];
    for f in (0..k.saturating_sub(1)).rev() {
        old_stride[f] = old_stride[f + 1] * dims[f + 1];
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut map = Vec::with_capacity(total);
    let mut digits = vec![0usize; k];
    for _ in 0..total {
        map.push(digits.iter().zip(perm).map(|(&x, &p)| x * old_stride[p]).sum());
        for f in (0..k).rev() {
            digits[f] += 1;
            if digits[f] < new_dims[f] {
                break;
            }
            digits[f] = 0;
        }
    }
    Ok(map)
}

/// Reorders tensor factors of a vector: new factor `j` is old factor `perm[j]`.
pub fn permute_vector(v: &CVector, dims: &[usize], perm: &[usize]) -> Result<CVector> {
    let map = permutation_map(dims, perm)?;
    if map.len() != v.len() {
        return Err(mismatch(map.len(), v.len()));
    }
    Ok(CVector::from_iterator(map.len(), map.iter().map(|&o| v[o])))
}

/// Reorders tensor factors of an operator: new factor `j` is old factor `perm[j]`.
pub fn permute_matrix(m: &CMatrix, dims: &[usize], perm: &[usize]) -> Result<CMatrix> {
    let map = permutation_map(dims, perm)?;
    if map.len() != m.nrows() || m.nrows() != m.ncols() {
        return Err(mismatch(map.len(), format!("{}x{}", m.nrows(), m.ncols())));
    }
    let n = map.len();
    Ok(CMatrix::from_fn(n, n, |i, j| m[(map[i], map[j])]))
}

/// Traces out every factor not in `keep`; kept factors stay in ascending order.
pub fn partial_trace_matrix(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() || keep_sorted.iter().any(|&f| f >= dims.len()) {
        return Err(invalid(format!("keep set {keep:?} is invalid for {} factors", dims.len())));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|f| !keep_sorted.contains(f)).collect();
    let perm: Vec<usize> = keep_sorted.iter().chain(&traced).copied().collect();
    let map = permutation_map(dims, &perm)?;
    if map.len() != m.nrows() {
        return Err(mismatch(map.len(), m.nrows()));
    }
    let kd: usize = keep_sorted.iter().map(|&f| dims[f]).product();
    let td: usize = traced.iter().map(|&f| dims[f]).product();
    Ok(CMatrix::from_fn(kd, kd, |a, b| {
        (0..td).map(|t| m[(map[a * td + t], map[b * td + t])]).sum()
    }))
}

/// Applies a `dims[factor]`-dimensional operator to one factor of a vector.
pub fn apply_local(v: &CVector, dims: &[usize], factor: usize, op: &CMatrix) -> Result<CVector> {
    let d = *dims.get(factor).ok_or_else(|| invalid(format!("factor {factor} out of range")))?;
    if op.nrows() != d || op.ncols() != d {
        return Err(mismatch(format!("{d}x{d} operator"), format!("{}x{}", op.nrows(), op.ncols())));
    }
    let inner: usize = dims[factor + 1..].iter().product();
    let outer: usize = dims[..factor].iter().product();
    let mut out = CVector::zeros(v.len());
    for o in 0..outer {
        for r in 0..inner {
            let base = o * d * inner + r;
            for a in 0..d {
                let mut acc = ZERO;
                for b in 0..d {
                    acc += op[(a, b)] * v[base + b * inner];
                }
                out[base + a * inner] = acc;
            }
        }
    }
    Ok(out)
}

/// A unit vector on a tensor product space.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: CVector,
    dims: Vec<usize>,
}

impl Ket {
    /// Rejects vectors whose norm is not 1 within [`NORM_TOL`].
    pub fn new(amplitudes: CVector, dims: Vec<usize>) -> Result<Self> {
        let total = dims_product(&dims)?;
        if total != amplitudes.len() {
            return Err(mismatch(total, amplitudes.len()));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(invalid(format!("ket norm is {norm}, expected 1")));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Rescales a non-zero vector to unit norm.
    pub fn normalized(amplitudes: CVector, dims: Vec<usize>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        Self::new(amplitudes.unscale(norm), dims)
    }

    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let total = dims_product(&dims)?;
        if index >= total {
            return Err(invalid(format!("basis index {index} out of range {total}")));
        }
        let mut v = CVector::zeros(total);
        v[index] = ONE;
        Ok(Self { amplitudes: v, dims })
    }

    pub(crate) fn from_parts_unchecked(amplitudes: CVector, dims: Vec<usize>) -> Self {
        Self { amplitudes, dims }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(mismatch(self.dim(), other.dim()));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Ket {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
            dims,
        }
    }

    pub fn tensor_power(&self, n: usize) -> Ket {
        let mut out = Ket {
            amplitudes: CVector::from_element(1, ONE),
            dims: Vec::new(),
        };
        for _ in 0..n {
            out = out.tensor(self);
        }
        out
    }

    pub fn permute_factors(&self, perm: &[usize]) -> Result<Ket> {
        let amplitudes = permute_vector(&self.amplitudes, &self.dims, perm)?;
        let dims = perm.iter().map(|&p| self.dims[p]).collect();
        Ok(Ket { amplitudes, dims })
    }

    /// Applies `op` to factor `factor`; the result is renormalization-free,
    /// so `op` should be unitary.
    pub fn apply_local(&self, factor: usize, op: &UnitaryMatrix) -> Result<Ket> {
        Ok(Ket {
            amplitudes: apply_local(&self.amplitudes, &self.dims, factor, op.matrix())?,
            dims: self.dims.clone(),
        })
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
            dims: self.dims.clone(),
        }
    }
}

/// A quantum state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity (the latter costs an eigendecomposition).
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let rho = Self::from_parts(matrix, dims)?;
        rho.validate()?;
        Ok(rho)
    }

    fn from_parts(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let total = dims_product(&dims)?;
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(mismatch(
                format!("{total}x{total}"),
                format!("{}x{}", matrix.nrows(), matrix.ncols()),
            ));
        }
        Ok(Self { matrix, dims })
    }

    /// For states that are valid by construction; Hermiticity is restored exactly.
    pub(crate) fn from_parts_unchecked(matrix: CMatrix, dims: Vec<usize>) -> Self {
        Self {
            matrix: hermitize(&matrix),
            dims,
        }
    }

    /// Checks the three state invariants.
    pub fn validate(&self) -> Result<()> {
        check_hermitian(&self.matrix)?;
        let tr = self.trace();
        if (tr - 1.0).abs() > NORM_TOL.max(1e-12 * self.dim() as f64) {
            return Err(invalid(format!("trace is {tr}, expected 1")));
        }
        let min = hermitian_eigenvalues(&self.matrix)?.first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(())
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let n = dims_product(&dims)?;
        Ok(Self {
            matrix: CMatrix::identity(n, n).unscale(n as f64),
            dims,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            matrix: kron(&self.matrix, &other.matrix),
            dims,
        }
    }

    pub fn permute_factors(&self, perm: &[usize]) -> Result<DensityMatrix> {
        let matrix = permute_matrix(&self.matrix, &self.dims, perm)?;
        let dims = perm.iter().map(|&p| self.dims[p]).collect();
        Ok(DensityMatrix { matrix, dims })
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }

    /// `U ρ U†` on the whole space.
    pub fn conjugate(&self, u: &UnitaryMatrix) -> Result<DensityMatrix> {
        if u.dim() != self.dim() {
            return Err(mismatch(self.dim(), u.dim()));
        }
        let m = u.matrix() * &self.matrix * u.matrix().adjoint();
        Ok(Self::from_parts_unchecked(m, self.dims.clone()))
    }

    /// `w·self + (1−w)·other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Result<DensityMatrix> {
        if self.dims != other.dims {
            return Err(mismatch(format!("{:?}", self.dims), format!("{:?}", other.dims)));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(invalid(format!("mixing weight {w} outside [0,1]")));
        }
        Ok(DensityMatrix {
            matrix: self.matrix.scale(w) + other.matrix.scale(1.0 - w),
            dims: self.dims.clone(),
        })
    }
}

/// A unitary operator.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: CMatrix,
}

impl UnitaryMatrix {
    /// Rejects matrices with `‖U†U − I‖_max` above 1e−12.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(mismatch("square matrix", format!("{}x{}", matrix.nrows(), matrix.ncols())));
        }
        let u = Self { matrix };
        let defect = u.unitarity_defect();
        if defect > 1e-12 {
            return Err(invalid(format!("unitarity defect {defect:e} exceeds 1e-12")));
        }
        Ok(u)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: CMatrix::identity(n, n),
        }
    }

    /// The permutation unitary `|i⟩ ↦ |perm[i]⟩`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        if perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(invalid(format!("{perm:?} is not a permutation")));
        }
        let mut m = CMatrix::zeros(n, n);
        for (i, &p) in perm.iter().enumerate() {
            m[(p, i)] = ONE;
        }
        Ok(Self { matrix: m })
    }

    /// Exchanges two equal-dimension tensor blocks: `|a⟩|b⟩ ↦ |b⟩|a⟩`.
    pub fn swap(block_dim: usize) -> Self {
        let n = block_dim * block_dim;
        let mut m = CMatrix::zeros(n, n);
        for a in 0..block_dim {
            for b in 0..block_dim {
                m[(b * block_dim + a, a * block_dim + b)] = ONE;
            }
        }
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let g = self.matrix.adjoint() * &self.matrix - CMatrix::identity(n, n);
        g.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    pub fn determinant(&self) -> C64 {
        self.matrix.clone().determinant()
    }

    pub fn tensor(&self, other: &UnitaryMatrix) -> Self {
        Self {
            matrix: kron(&self.matrix, &other.matrix),
        }
    }

    pub fn apply(&self, ket: &Ket) -> Result<Ket> {
        if ket.dim() != self.dim() {
            return Err(mismatch(self.dim(), ket.dim()));
        }
        Ok(Ket::from_parts_unchecked(&self.matrix * ket.amplitudes(), ket.dims().to_vec()))
    }
}

pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let matrix = partial_trace_matrix(&rho.matrix, &rho.dims, keep)?;
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    let dims = keep_sorted.iter().map(|&f| rho.dims[f]).collect();
    Ok(DensityMatrix::from_parts_unchecked(matrix, dims))
}

/// `M^s` for positive semidefinite `M`, with the `0^0 := 0` convention:
/// eigenvalues below [`NULL_EIGENVALUE`] contribute nothing for every `s`.
pub fn psd_power(m: &CMatrix, s: f64) -> Result<CMatrix> {
    if !(0.0..=1.0).contains(&s) {
        return Err(invalid(format!("power {s} outside [0,1]")));
    }
    let (w, v) = hermitian_eigen(m)?;
    if let Some(&min) = w.first() {
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
    }
    Ok(spectral_map(&w, &v, |x| if x < NULL_EIGENVALUE { 0.0 } else { x.powf(s) }))
}

pub fn fractional_power(rho: &DensityMatrix, s: f64) -> Result<CMatrix> {
    psd_power(rho.matrix(), s)
}

/// Squared fidelity `(Tr√(√ρ σ √ρ))²`, computed as `‖√ρ √σ‖₁²` from singular values.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(mismatch(rho.dim(), sigma.dim()));
    }
    let a = psd_power(rho.matrix(), 0.5)?;
    let b = psd_power(sigma.matrix(), 0.5)?;
    let prod = a * b;
    let sv = prod
        .try_svd(false, false, 1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("SVD did not converge in fidelity".into()))?
        .singular_values;
    let f: f64 = sv.iter().sum();
    Ok(f * f)
}

/// A Haar-random unitary from QR of a complex Ginibre matrix.
///
/// The diagonal of `R` is rotated to be positive so the distribution is exactly Haar.
pub fn haar_unitary_from_rng<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    if dim == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if dim > MAX_EIGEN_DIM {
        return Err(guardrail("Haar unitary dimension", dim, MAX_EIGEN_DIM));
    }
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { ONE };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Ok(UnitaryMatrix { matrix: q })
}

/// Haar unitary of dimension `dim`, reproducible from `seed`.
pub fn haar_unitary(dim: usize, seed: u64) -> Result<UnitaryMatrix> {
    haar_unitary_from_rng(dim, &mut task_rng(seed, 0))
}

/// Haar-random pure state on a space with the given factor dimensions.
pub fn haar_ket<R: Rng + ?Sized>(dims: Vec<usize>, rng: &mut R) -> Result<Ket> {
    let n = dims_product(&dims)?;
    let v = CVector::from_fn(n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    Ket::normalized(v, dims)
}

/// Random mixed state `GG†/Tr(GG†)` with `G` complex Ginibre.
pub fn random_density<R: Rng + ?Sized>(dims: Vec<usize>, rng: &mut R) -> Result<DensityMatrix> {
    let n = dims_product(&dims)?;
    let g = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    Ok(DensityMatrix::from_parts_unchecked(m.unscale(tr), dims))
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn max_abs(a: &CMatrix) -> f64 {
        a.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn trace_distance_is_symmetric(seed in any::<u64>(), d in 2usize..6) {
            let mut rng = task_rng(seed, 0);
            let a = random_density(vec![d], &mut rng).unwrap();
            let b = random_density(vec![d], &mut rng).unwrap();
            let ab = trace_norm(&(a.matrix() - b.matrix())).unwrap();
            let ba = trace_norm(&(b.matrix() - a.matrix())).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!((-1e-12..=2.0 + 1e-12).contains(&ab));
        }

        #[test]
        fn partial_trace_undoes_tensor(seed in any::<u64>(), da in 2usize..4, db in 1usize..4) {
            let mut rng = task_rng(seed, 1);
            let a = random_density(vec![da], &mut rng).unwrap();
            let b = random_density(vec![db], &mut rng).unwrap();
            let ab = a.tensor(&b);
            prop_assert!(max_abs(&(ab.partial_trace(&[0]).unwrap().into_matrix() - a.matrix())) < 1e-12);
            prop_assert!(max_abs(&(ab.partial_trace(&[1]).unwrap().into_matrix() - b.matrix())) < 1e-12);
        }

        #[test]
        fn fidelity_is_symmetric_and_bounded(seed in any::<u64>(), d in 2usize..5) {
            let mut rng = task_rng(seed, 2);
            let a = random_density(vec![d], &mut rng).unwrap();
            let b = random_density(vec![d], &mut rng).unwrap();
            let f = fidelity(&a, &b).unwrap();
            prop_assert!((f - fidelity(&b, &a).unwrap()).abs() < 1e-9);
            prop_assert!((-1e-12..=1.0 + 1e-9).contains(&f));
            prop_assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn haar_unitaries_are_unitary(seed in any::<u64>(), d in 1usize..9) {
            let u = haar_unitary(d, seed).unwrap();
            prop_assert!(u.unitarity_defect() < 1e-12);
        }

        #[test]
        fn permutation_round_trip(seed in any::<u64>()) {
            let mut rng = task_rng(seed, 3);
            let rho = random_density(vec![2, 3, 2], &mut rng).unwrap();
            let perm = [2usize, 0, 1];
            let inv = [1usize, 2, 0];
            let back = rho.permute_factors(&perm).unwrap().permute_factors(&inv).unwrap();
            prop_assert!(max_abs(&(back.into_matrix() - rho.matrix())) < 1e-15);
        }
    }
}
