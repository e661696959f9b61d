//! Lower bounds on the error of any strategy: fidelity divergence for
//! sequential strategies and a dual (Yuen–Kennedy–Lax) certificate for
//! strategies with indefinite causal order.

use rayon::prelude::*;

use crate::error::{guardrail, invalid, mismatch, Error, Result};
use crate::linalg::{
    haar_ket, haar_unitary_from_rng, hermitian_eigenvalues, kron, partial_trace_matrix,
    permute_matrix, random_density, task_rng, CMatrix, CVector, Ket, C64,
};
use crate::states::{intermediary_choi, symmetric_choi, ChoiOperator, Symmetry};

/// Largest `d · refDim` accepted by [`fidelity_divergence_sample`].
pub const MAX_DIVERGENCE_DIM: usize = 64;
/// Pairs with input fidelity below this are skipped.
pub const MIN_INPUT_FIDELITY: f64 = 1e-8;
/// Step size of the perturbed pairs mixed into the sample.
const PERTURBATION: f64 = 0.05;

/// Sampled estimate of `inf F(𝒞₁(ψ), 𝒞₂(φ)) / F(ψ, φ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceEstimate {
    pub min_ratio: f64,
    pub argmin: (Ket, Ket),
    pub samples: usize,
    pub skipped: usize,
}

fn as_matrix(ket: &Ket, d: usize, r: usize) -> CMatrix {
    CMatrix::from_fn(d, r, |i, j| ket.amplitudes()[i * r + j])
}

/// `F(𝒞₁(ψ), 𝒞₂(φ))` for the single-query intermediary channels with `U = I`,
/// inputs on `A ⊗ R`.
///
/// `𝒞₁(ψ) = ψ_{B₁R} ⊗ I_{B₂}/d` and `𝒞₂(φ) = I_{B₁}/d ⊗ φ_{B₂R}` have flat
/// spectra on `d`-dimensional supports, so the fidelity reduces to the trace
/// norm of the `d × d` overlap `Φ Ψ†/d` between those supports.
pub fn intermediary_output_fidelity(psi: &Ket, phi: &Ket) -> Result<f64> {
    let dims = psi.dims();
    if dims.len() != 2 || phi.dims() != dims {
        return Err(mismatch(format!("{dims:?} (A ⊗ R)"), format!("{:?}", phi.dims())));
    }
    let (d, r) = (dims[0], dims[1]);
    let overlap = as_matrix(phi, d, r) * as_matrix(psi, d, r).adjoint();
    let sv = overlap
        .try_svd(false, false, 1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?
        .singular_values;
    let f = sv.iter().sum::<f64>() / d as f64;
    Ok(f * f)
}

fn perturbed(psi: &Ket, rng: &mut impl rand::Rng) -> Result<Ket> {
    let noise = haar_ket(psi.dims().to_vec(), rng)?;
    let v: CVector = psi.amplitudes() + noise.amplitudes() * C64::new(PERTURBATION, 0.0);
    Ket::normalized(v, psi.dims().to_vec())
}

/// Minimum fidelity ratio over sampled pure input pairs.
///
/// Even-indexed samples are independent Haar pairs; odd-indexed samples pair a
/// Haar state with a small random perturbation of itself, probing the region
/// near identical inputs where the infimum is attained.
pub fn fidelity_divergence_sample(
    d: usize,
    ref_dim: usize,
    samples: usize,
    seed: u64,
) -> Result<DivergenceEstimate> {
    if d < 2 || ref_dim == 0 {
        return Err(invalid("need d ≥ 2 and refDim ≥ 1"));
    }
    if samples == 0 {
        return Err(invalid("samples must be at least 1"));
    }
    if d * ref_dim > MAX_DIVERGENCE_DIM {
        return Err(guardrail("d·refDim", d * ref_dim, MAX_DIVERGENCE_DIM));
    }
    if ref_dim > d * d {
        return Err(guardrail("reference dimension", ref_dim, d * d));
    }
    let dims = vec![d, ref_dim];
    let results: Vec<Option<(f64, Ket, Ket)>> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<Option<(f64, Ket, Ket)>> {
            let mut rng = task_rng(seed, i as u64);
            let psi = haar_ket(dims.clone(), &mut rng)?;
            let phi = if i % 2 == 0 {
                haar_ket(dims.clone(), &mut rng)?
            } else {
                perturbed(&psi, &mut rng)?
            };
            let f_in = psi.inner(&phi)?.norm_sqr();
            if f_in < MIN_INPUT_FIDELITY {
                return Ok(None);
            }
            let f_out = intermediary_output_fidelity(&psi, &phi)?;
            Ok(Some((f_out / f_in, psi, phi)))
        })
        .collect::<Result<_>>()?;
    let skipped = results.iter().filter(|r| r.is_none()).count();
    let (min_ratio, psi, phi) = results
        .into_iter()
        .flatten()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or_else(|| Error::Numerical("every sampled pair had negligible input fidelity".into()))?;
    Ok(DivergenceEstimate {
        min_ratio,
        argmin: (psi, phi),
        samples,
        skipped,
    })
}

/// The fidelity ratio at identical inputs `ψ = φ` for a Haar-random `ψ`.
pub fn divergence_witness(d: usize, ref_dim: usize, seed: u64) -> Result<f64> {
    if d < 2 || ref_dim == 0 || d * ref_dim > MAX_DIVERGENCE_DIM {
        return Err(invalid(format!("unsupported witness dimensions d = {d}, refDim = {ref_dim}")));
    }
    let psi = haar_ket(vec![d, ref_dim], &mut task_rng(seed, 0))?;
    let f_in = psi.inner(&psi)?.norm_sqr();
    Ok(intermediary_output_fidelity(&psi, &psi)? / f_in)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequentialBound {
    /// `(1 − √(1 − δᴺ))/2`.
    pub tight: f64,
    /// `δᴺ/4`.
    pub loose: f64,
}

/// Error lower bounds for `N` sequential queries from the fidelity divergence `δ`.
pub fn sequential_error_bound(divergence: f64, n: u32) -> Result<SequentialBound> {
    if !(divergence > 0.0 && divergence <= 1.0) {
        return Err(invalid(format!("divergence {divergence} outside (0, 1]")));
    }
    let f = divergence.powi(n as i32);
    // 1 − √(1 − f) = f/(1 + √(1 − f)), stable for small f.
    Ok(SequentialBound {
        tight: f / (1.0 + (1.0 - f).sqrt()) / 2.0,
        loose: f / 4.0,
    })
}

/// A dual feasible point certifying the error bound for indefinite-order strategies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualCertificate {
    pub d: usize,
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub x0: f64,
    pub a: f64,
    pub b: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub lambda: f64,
}

impl DualCertificate {
    /// `(√(D+1) + √(D−1))²/(4D)` with `D = d^N`.
    pub fn closed_form_lambda(&self) -> f64 {
        let dd = (self.d as f64).powi(self.n as i32);
        let s = (dd + 1.0).sqrt() + (dd - 1.0).sqrt();
        s * s / (4.0 * dd)
    }

    /// `1 − λ`, the implied lower bound on the error.
    pub fn implied_error(&self) -> f64 {
        1.0 - self.lambda
    }

    /// `p₊C₊ + p₋C₋` as a dense Choi operator.
    pub fn choi(&self) -> Result<ChoiOperator> {
        let plus = symmetric_choi(Symmetry::Plus, self.d, self.n)?;
        let minus = symmetric_choi(Symmetry::Minus, self.d, self.n)?;
        ChoiOperator::combine(&[(self.p_plus, &plus), (self.p_minus, &minus)])
    }
}

pub fn dual_certificate(d: usize, n: usize) -> Result<DualCertificate> {
    let dd = (d as f64).powi(n as i32);
    if !(dd >= 2.0) || !dd.is_finite() {
        return Err(invalid("need 2 ≤ d^N < ∞"));
    }
    let (sp, sm) = ((dd + 1.0).sqrt(), (dd - 1.0).sqrt());
    let x0 = (1.0 / sp + 1.0 / sm) / (8.0 * dd);
    let alpha = sm * x0;
    let beta = sp * x0;
    let a = 2.0 * (dd + 1.0) * alpha;
    let b = 2.0 * (dd - 1.0) * beta;
    let lambda = a + b;
    let linear = alpha + beta - 1.0 / (2.0 * dd);
    let quadratic = 4.0 * alpha * beta - (alpha + beta) / (2.0 * dd);
    if linear < -1e-12 || quadratic < -1e-12 * alpha * beta {
        return Err(Error::Numerical(format!(
            "certificate conditions violated (linear {linear:e}, quadratic {quadratic:e})"
        )));
    }
    Ok(DualCertificate {
        d,
        n,
        alpha,
        beta,
        x0,
        a,
        b,
        p_plus: a / lambda,
        p_minus: b / lambda,
        lambda,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct YklReport {
    pub per_hypothesis_min_eig: Vec<f64>,
    pub feasible: bool,
    /// `1 − λ`.
    pub implied_err_lower: f64,
}

/// Checks `λC − π_x C_x ≥ 0` for every hypothesis.
///
/// The tolerance is `1e−9` times the largest eigenvalue of `λC` (at least 1).
pub fn ykl_check(lambda: f64, choi: &ChoiOperator, hypotheses: &[(ChoiOperator, f64)]) -> Result<YklReport> {
    if hypotheses.is_empty() {
        return Err(invalid("no hypotheses"));
    }
    let scaled = choi.matrix().scale(lambda);
    let top = hermitian_eigenvalues(&scaled)?.last().copied().unwrap_or(0.0).abs();
    let tol = 1e-9 * top.max(1.0);
    let mut mins = Vec::with_capacity(hypotheses.len());
    for (c, prior) in hypotheses {
        if c.in_dims() != choi.in_dims() || c.out_dims() != choi.out_dims() {
            return Err(mismatch(
                format!("{:?}→{:?}", choi.in_dims(), choi.out_dims()),
                format!("{:?}→{:?}", c.in_dims(), c.out_dims()),
            ));
        }
        let diff = &scaled - c.matrix().scale(*prior);
        mins.push(hermitian_eigenvalues(&diff)?.first().copied().unwrap_or(0.0));
    }
    Ok(YklReport {
        feasible: mins.iter().all(|&m| m >= -tol),
        per_hypothesis_min_eig: mins,
        implied_err_lower: 1.0 - lambda,
    })
}

/// Runs [`ykl_check`] on the certificate against both single-output hypotheses with priors ½.
pub fn certificate_report(cert: &DualCertificate, lambda: f64) -> Result<YklReport> {
    let c = cert.choi()?;
    let hyps = vec![
        (intermediary_choi(0, cert.d, cert.n)?, 0.5),
        (intermediary_choi(1, cert.d, cert.n)?, 0.5),
    ];
    ykl_check(lambda, &c, &hyps)
}

/// Which output factors belong to each input factor of a multi-port channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairLayout {
    outputs: Vec<Vec<usize>>,
}

impl PairLayout {
    /// `outputs[i]` lists the output factors paired with input `i`.
    pub fn new(outputs: Vec<Vec<usize>>) -> Self {
        Self { outputs }
    }

    /// Input `i` paired with outputs `{i, N + i}` (the `B_i`, `C_i` layout).
    pub fn two_slot(n: usize) -> Self {
        Self::new((0..n).map(|i| vec![i, n + i]).collect())
    }

    pub fn outputs(&self) -> &[Vec<usize>] {
        &self.outputs
    }
}

/// Checks that inputs in `subset` cannot signal to the outputs of the other pairs.
///
/// Each trial draws a random mixed input and a second input that differs from
/// it by a Haar unitary on the `subset` factors only, so both share the same
/// marginal on the complement. The output marginals on pairs outside `subset`
/// must agree entrywise within `tol`.
pub fn nosignalling_check(
    choi: &ChoiOperator,
    layout: &PairLayout,
    subset: &[usize],
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<bool> {
    let n_in = choi.in_dims().len();
    if layout.outputs.len() != n_in {
        return Err(mismatch(n_in, layout.outputs.len()));
    }
    let mut claimed = vec![false; choi.out_dims().len()];
    for group in &layout.outputs {
        for &o in group {
            if o >= claimed.len() || std::mem::replace(&mut claimed[o], true) {
                return Err(invalid(format!("output factor {o} missing or paired twice")));
            }
        }
    }
    let mut in_subset = vec![false; n_in];
    for &s in subset {
        if s >= n_in || std::mem::replace(&mut in_subset[s], true) {
            return Err(invalid(format!("subset {subset:?} invalid for {n_in} inputs")));
        }
    }
    if subset.is_empty() {
        return Err(invalid("subset must be non-empty"));
    }
    let mut keep: Vec<usize> = (0..n_in)
        .filter(|&i| !in_subset[i])
        .flat_map(|i| layout.outputs[i].iter().copied())
        .collect();
    keep.sort_unstable();

    let in_dims = choi.in_dims().to_vec();
    // Move the subset to the front to build the local unitary as `U ⊗ I`.
    let front: Vec<usize> = subset
        .iter()
        .copied()
        .chain((0..n_in).filter(|&i| !in_subset[i]))
        .collect();
    let mut back = vec![0usize; n_in];
    for (pos, &f) in front.iter().enumerate() {
        back[f] = pos;
    }
    let front_dims: Vec<usize> = front.iter().map(|&f| in_dims[f]).collect();
    let ds: usize = subset.iter().map(|&s| in_dims[s]).product();
    let rest = choi.in_dim() / ds;

    for t in 0..trials {
        let mut rng = task_rng(seed, t as u64);
        let rho = random_density(in_dims.clone(), &mut rng)?;
        let u = haar_unitary_from_rng(ds, &mut rng)?;
        let local = kron(u.matrix(), &CMatrix::identity(rest, rest));
        let moved = permute_matrix(rho.matrix(), &in_dims, &front)?;
        let rotated = &local * moved * local.adjoint();
        let rho2 = permute_matrix(&rotated, &front_dims, &back)?;
        let out1 = partial_trace_matrix(&choi.apply(rho.matrix())?, choi.out_dims(), &keep)?;
        let out2 = partial_trace_matrix(&choi.apply(&rho2)?, choi.out_dims(), &keep)?;
        let gap = (out1 - out2).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if gap > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A maximally signalling two-pair channel: input `A₁` goes to `B₂`, `A₂` to `B₁`,
/// and `C₁`, `C₂` are maximally mixed.
pub fn swap_pairs_choi(d: usize) -> Result<ChoiOperator> {
    if d < 2 {
        return Err(invalid("d must be at least 2"));
    }
    let mixed = CMatrix::identity(d * d, d * d).unscale((d * d) as f64);
    ChoiOperator::from_channel(vec![d, d], vec![d; 4], |rho| {
        let swapped = permute_matrix(rho, &[d, d], &[1, 0]).expect("two-factor permutation");
        kron(&swapped, &mixed)
    })
}
