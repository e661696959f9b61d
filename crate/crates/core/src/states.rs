//! Probe states, hypothesis channels, Choi operators and depolarizing noise.
//!
//! Factor layouts are fixed:
//!
//! * probes: `A₁ … A_N` (dimension `d` each) then the reference `R`;
//! * intermediary outputs: `B₁` (N factors), …, `B_k` (N factors), then `R`;
//! * cause-probe outputs: per repetition `[B, R₁, …, R_k]`, repetitions concatenated;
//! * two-slot Choi operators: inputs `A₁ … A_N`, outputs `B₁ … B_N, C₁ … C_N`.

use crate::combinatorics::{groupings, grouping_count};
use crate::error::{guardrail, invalid, mismatch, Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, kron, partial_trace_matrix, permute_matrix, permute_vector,
    CMatrix, CVector, DensityMatrix, Ket, UnitaryMatrix, C64, PSD_TOL,
};
use num_traits::ToPrimitive;

/// Largest dense operator (rows) built by the constructors in this module.
pub const MAX_DENSE_DIM: usize = 4096;
/// Largest ket (amplitudes) for the superposed-configuration probe.
pub const MAX_KET_AMPLITUDES: usize = 10_000_000;
/// Largest local dimension for [`singlet_state`].
pub const MAX_SINGLET_D: usize = 6;

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    base.checked_pow(u32::try_from(exp).ok()?)
}

fn dense_dim(what: &'static str, base: usize, exp: usize, extra: usize) -> Result<usize> {
    match checked_pow(base, exp).and_then(|x| x.checked_mul(extra)) {
        Some(n) if n <= MAX_DENSE_DIM => Ok(n),
        Some(n) => Err(guardrail(what, n, MAX_DENSE_DIM)),
        None => Err(guardrail(what, format!("{base}^{exp}·{extra}"), MAX_DENSE_DIM)),
    }
}

/// Sign of a permutation given as a list of distinct values.
fn permutation_sign(p: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 { 1.0 } else { -1.0 }
}

fn for_each_permutation(n: usize, visit: &mut dyn FnMut(&[usize])) {
    fn rec(k: usize, p: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if k == p.len() {
            visit(p);
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            rec(k + 1, p, visit);
            p.swap(k, i);
        }
    }
    let mut p: Vec<usize> = (0..n).collect();
    rec(0, &mut p, visit);
}

/// The totally antisymmetric state of `d` qudits, `(1/√d!) Σ_π sgn(π) |π(0)…π(d−1)⟩`.
pub fn singlet_state(d: usize) -> Result<Ket> {
    if !(2..=MAX_SINGLET_D).contains(&d) {
        return Err(invalid(format!("singlet needs 2 ≤ d ≤ {MAX_SINGLET_D}, got {d}")));
    }
    let dim = d.pow(d as u32);
    let mut v = CVector::zeros(dim);
    for_each_permutation(d, &mut |p| {
        let idx = p.iter().fold(0, |acc, &x| acc * d + x);
        v[idx] = C64::new(permutation_sign(p), 0.0);
    });
    Ket::normalized(v, vec![d; d])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProbeKind {
    /// `|v⟩^{⊗N}` in the computational basis.
    ProductValue,
    /// `|e₀⟩^{⊗N}` with `|e₀⟩ = Σ|i⟩/√d`.
    UniformCoherent,
    /// `N/d` singlets on consecutive blocks.
    SingletProduct,
    /// Equal superposition of all singlet groupings, each tagged by a reference state.
    SuperposedConfig,
    /// Each probe maximally entangled with its own reference qudit.
    EntangledBattery,
}

/// A pure input on `A₁ … A_N ⊗ R`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeState {
    ket: Ket,
    n: usize,
    d: usize,
    ref_dim: usize,
    kind: ProbeKind,
}

impl ProbeState {
    pub fn new(ket: Ket, n: usize, d: usize, kind: ProbeKind) -> Result<Self> {
        let dims = ket.dims();
        if dims.len() != n + 1 || dims[..n].iter().any(|&x| x != d) {
            return Err(mismatch(format!("[{d}]×{n} ++ [ref]"), format!("{dims:?}")));
        }
        let ref_dim = dims[n];
        Ok(Self {
            ket,
            n,
            d,
            ref_dim,
            kind,
        })
    }

    pub fn ket(&self) -> &Ket {
        &self.ket
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn ref_dim(&self) -> usize {
        self.ref_dim
    }

    pub fn kind(&self) -> ProbeKind {
        self.kind
    }

    /// Reduced state on the probes `A₁ … A_N`.
    pub fn probe_marginal(&self) -> Result<DensityMatrix> {
        let keep: Vec<usize> = (0..self.n).collect();
        self.ket.to_density().partial_trace(&keep)
    }
}

fn ket_dim(d: usize, n: usize, ref_dim: usize) -> Result<usize> {
    match checked_pow(d, n).and_then(|x| x.checked_mul(ref_dim)) {
        Some(x) if x <= MAX_KET_AMPLITUDES => Ok(x),
        _ => Err(guardrail("probe amplitudes", format!("{d}^{n}·{ref_dim}"), MAX_KET_AMPLITUDES)),
    }
}

fn with_trivial_reference(ket: Ket, n: usize, d: usize, kind: ProbeKind) -> Result<ProbeState> {
    let r = Ket::basis(vec![1], 0)?;
    ProbeState::new(ket.tensor(&r), n, d, kind)
}

/// `|v⟩^{⊗N}` with a trivial reference.
pub fn product_value_probe(d: usize, n: usize, value: usize) -> Result<ProbeState> {
    if d == 0 || value >= d {
        return Err(invalid(format!("value {value} outside alphabet of size {d}")));
    }
    dense_dim("probe dimension", d, n, 1)?;
    let one = Ket::basis(vec![d], value)?;
    with_trivial_reference(one.tensor_power(n), n, d, ProbeKind::ProductValue)
}

/// `|e₀⟩^{⊗N}` with a trivial reference.
pub fn uniform_probe(d: usize, n: usize) -> Result<ProbeState> {
    if d == 0 {
        return Err(invalid("d must be at least 1"));
    }
    dense_dim("probe dimension", d, n, 1)?;
    let e0 = Ket::normalized(CVector::from_element(d, C64::new(1.0, 0.0)), vec![d])?;
    with_trivial_reference(e0.tensor_power(n), n, d, ProbeKind::UniformCoherent)
}

/// `|S_d⟩^{⊗N/d}` on consecutive blocks with a trivial reference.
pub fn singlet_product_probe(d: usize, n: usize) -> Result<ProbeState> {
    if d == 0 || !n.is_multiple_of(d) {
        return Err(invalid(format!("d = {d} must divide N = {n}")));
    }
    dense_dim("probe dimension", d, n, 1)?;
    let s = singlet_state(d)?;
    with_trivial_reference(s.tensor_power(n / d), n, d, ProbeKind::SingletProduct)
}

/// The vectors `(|S_d⟩^{⊗N/d})ᵢ` for every grouping `i`, in catalog order.
///
/// Fails with a guardrail when the grouping count exceeds `max_count`.
pub fn configuration_vectors(n: usize, d: usize, max_count: usize) -> Result<Vec<CVector>> {
    if d == 0 || !n.is_multiple_of(d) {
        return Err(invalid(format!("d = {d} must divide N = {n}")));
    }
    let count = grouping_count(n, d)?;
    let g = count
        .to_usize()
        .filter(|&g| g <= max_count)
        .ok_or_else(|| guardrail("grouping count", count.to_string(), max_count))?;
    dense_dim("probe dimension", d, n, 1)?;
    let catalog = groupings(n, d)?;
    let configs = catalog
        .configurations
        .ok_or_else(|| guardrail("explicit groupings", g, crate::combinatorics::MAX_EXPLICIT_GROUPINGS))?;
    let consecutive = singlet_state(d)?.tensor_power(n / d);
    let dims = vec![d; n];
    configs
        .iter()
        .map(|blocks| {
            // Qudit blocks[b][p] takes factor b·d + p of the consecutive product.
            let mut perm = vec![0usize; n];
            for (b, block) in blocks.iter().enumerate() {
                for (p, &q) in block.iter().enumerate() {
                    perm[q] = b * d + p;
                }
            }
            permute_vector(consecutive.amplitudes(), &dims, &perm)
        })
        .collect()
}

/// `(1/√G) Σᵢ (|S_d⟩^{⊗N/d})ᵢ ⊗ |i⟩` over all groupings `i` in catalog order; `refDim = G`.
pub fn superposed_config_state(n: usize, d: usize) -> Result<ProbeState> {
    let vectors = configuration_vectors(n, d, MAX_KET_AMPLITUDES)?;
    let g = vectors.len();
    let total = ket_dim(d, n, g)?;
    let mut amps = CVector::zeros(total);
    for (i, v) in vectors.iter().enumerate() {
        for (x, a) in v.iter().enumerate() {
            amps[x * g + i] = *a;
        }
    }
    let mut full_dims = vec![d; n];
    full_dims.push(g);
    let ket = Ket::normalized(amps, full_dims)?;
    ProbeState::new(ket, n, d, ProbeKind::SuperposedConfig)
}

/// `Φ⁺^{⊗N}` between each probe and its own reference qudit; the reference
/// factor is `R₁ … R_N` flattened to dimension `d^N`.
pub fn entangled_battery_probe(d: usize, n: usize) -> Result<ProbeState> {
    let dn = dense_dim("probe dimension", d, n, 1)?;
    ket_dim(d, n, dn)?;
    let mut v = CVector::zeros(dn * dn);
    for a in 0..dn {
        v[a * dn + a] = C64::new(1.0, 0.0);
    }
    let mut dims = vec![d; n];
    dims.push(dn);
    ProbeState::new(Ket::normalized(v, dims)?, n, d, ProbeKind::EntangledBattery)
}

/// A hypothesis channel: `U` applied to the input, routed to output slot `slot`.
///
/// In the intermediary scenario the slot is one of the outputs `B₁ … B_k`
/// (0-based); the remaining outputs are maximally mixed.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalChannel {
    d: usize,
    slot: usize,
    unitary: UnitaryMatrix,
}

impl CausalChannel {
    pub fn new(d: usize, slot: usize, unitary: UnitaryMatrix) -> Result<Self> {
        if unitary.dim() != d {
            return Err(mismatch(d, unitary.dim()));
        }
        Ok(Self { d, slot, unitary })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn slot(&self) -> usize {
        self.slot
    }

    pub fn unitary(&self) -> &UnitaryMatrix {
        &self.unitary
    }
}

/// Output of `N` parallel uses of a `k`-slot intermediary channel on a probe.
///
/// Factors: `B₁` (N qudits), …, `B_k` (N qudits), then `R`.
pub fn apply_intermediary_channel(
    ch: &CausalChannel,
    probe: &ProbeState,
    k: usize,
) -> Result<DensityMatrix> {
    if probe.d() != ch.d() {
        return Err(mismatch(ch.d(), probe.d()));
    }
    if k == 0 || ch.slot() >= k {
        return Err(invalid(format!("slot {} out of range for k = {k}", ch.slot())));
    }
    let (d, n, r) = (probe.d(), probe.n(), probe.ref_dim());
    dense_dim("intermediary output dimension", d, k * n, r)?;
    let mut ket = probe.ket().clone();
    for f in 0..n {
        ket = ket.apply_local(f, ch.unitary())?;
    }
    let dn = d.pow(n as u32);
    let mixed_dim = dn.pow((k - 1) as u32);
    let rest = CMatrix::identity(mixed_dim, mixed_dim).unscale(mixed_dim as f64);
    let sigma = ket.to_density().into_matrix();
    let joint = kron(&sigma, &rest);
    // Current order: A (N), R, others (N(k−1)).
    let mut dims = vec![d; n];
    dims.push(r);
    dims.extend(std::iter::repeat_n(d, n * (k - 1)));
    let mut perm = Vec::with_capacity(k * n + 1);
    let mut other = 0;
    for s in 0..k {
        if s == ch.slot() {
            perm.extend(0..n);
        } else {
            let start = n + 1 + other * n;
            perm.extend(start..start + n);
            other += 1;
        }
    }
    perm.push(n);
    let m = permute_matrix(&joint, &dims, &perm)?;
    let out_dims = perm.iter().map(|&p| dims[p]).collect();
    Ok(DensityMatrix::from_parts_unchecked(m, out_dims))
}

/// `Φ⁺_{B R_x} ⊗ (I/d)^{⊗(k−1)}` per repetition, `N` repetitions.
///
/// Factors per repetition: `[B, R₁, …, R_k]`; `x` is 0-based.
pub fn cause_probe_output(k: usize, d: usize, n: usize, x: usize) -> Result<DensityMatrix> {
    if k == 0 || x >= k {
        return Err(invalid(format!("hypothesis {x} out of range for k = {k}")));
    }
    if d == 0 {
        return Err(invalid("d must be at least 1"));
    }
    dense_dim("cause-probe output dimension", d, n * (k + 1), 1)?;
    let mut phi = CVector::zeros(d * d);
    for i in 0..d {
        phi[i * d + i] = C64::new(1.0, 0.0);
    }
    let phi = Ket::normalized(phi, vec![d, d])?.to_density();
    let mixed = DensityMatrix::maximally_mixed(vec![d; k - 1])?;
    // Order B, R_x, others → B, R_0 … R_{k−1}.
    let joint = phi.tensor(&mixed);
    let mut perm = vec![0usize];
    let mut other = 2;
    for j in 0..k {
        if j == x {
            perm.push(1);
        } else {
            perm.push(other);
            other += 1;
        }
    }
    let one = joint.permute_factors(&perm)?;
    let mut out = DensityMatrix::from_parts_unchecked(CMatrix::identity(1, 1), vec![]);
    for _ in 0..n {
        out = out.tensor(&one);
    }
    Ok(out)
}

/// Depolarizing noise `ρ ↦ (1−p)ρ + p·Tr(ρ) I/d` on each affected qudit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    p: f64,
    d: usize,
}

impl NoiseModel {
    pub fn new(p: f64, d: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("depolarizing probability {p} outside [0,1]")));
        }
        if d == 0 {
            return Err(invalid("d must be at least 1"));
        }
        Ok(Self { p, d })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }
}

/// Replaces factor `f` by `I/d_f`, keeping the marginal on all other factors.
fn replace_with_mixed(m: &CMatrix, dims: &[usize], f: usize) -> CMatrix {
    let df = dims[f];
    let stride: usize = dims[f + 1..].iter().product();
    let n = m.nrows();
    let digit = |i: usize| (i / stride) % df;
    CMatrix::from_fn(n, n, |i, j| {
        if digit(i) != digit(j) {
            return C64::new(0.0, 0.0);
        }
        let (bi, bj) = (i - digit(i) * stride, j - digit(j) * stride);
        let s: C64 = (0..df).map(|t| m[(bi + t * stride, bj + t * stride)]).sum();
        s / df as f64
    })
}

/// Applies independent depolarizing noise to each listed factor.
pub fn depolarize(rho: &DensityMatrix, noise: &NoiseModel, factors: &[usize]) -> Result<DensityMatrix> {
    let dims = rho.dims().to_vec();
    let mut seen = vec![false; dims.len()];
    for &f in factors {
        if f >= dims.len() || std::mem::replace(&mut seen[f], true) {
            return Err(invalid(format!("factor set {factors:?} invalid for {} factors", dims.len())));
        }
        if dims[f] != noise.d() {
            return Err(mismatch(noise.d(), dims[f]));
        }
    }
    let p = noise.p();
    let mut m = rho.matrix().clone();
    for &f in factors {
        let replaced = replace_with_mixed(&m, &dims, f);
        m = m.scale(1.0 - p) + replaced.scale(p);
    }
    Ok(DensityMatrix::from_parts_unchecked(m, dims))
}

/// Choi operator `C = Σ |i⟩⟨j| ⊗ 𝒞(|i⟩⟨j|)`, ordered input ⊗ output.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiOperator {
    matrix: CMatrix,
    in_dims: Vec<usize>,
    out_dims: Vec<usize>,
}

impl ChoiOperator {
    /// Validates size and positivity.
    pub fn new(matrix: CMatrix, in_dims: Vec<usize>, out_dims: Vec<usize>) -> Result<Self> {
        let c = Self::sized(matrix, in_dims, out_dims)?;
        let min = c.min_eigenvalue()?;
        let scale = c.matrix.iter().fold(1.0f64, |m, z| m.max(z.norm()));
        if min < -PSD_TOL * scale {
            return Err(Error::NotPositive(min));
        }
        Ok(c)
    }

    fn sized(matrix: CMatrix, in_dims: Vec<usize>, out_dims: Vec<usize>) -> Result<Self> {
        let din: usize = in_dims.iter().product();
        let dout: usize = out_dims.iter().product();
        if matrix.nrows() != din * dout || matrix.ncols() != din * dout {
            return Err(mismatch(
                format!("{0}x{0}", din * dout),
                format!("{}x{}", matrix.nrows(), matrix.ncols()),
            ));
        }
        Ok(Self {
            matrix,
            in_dims,
            out_dims,
        })
    }

    /// Builds the Choi operator of a linear map given on matrix units.
    pub fn from_channel(
        in_dims: Vec<usize>,
        out_dims: Vec<usize>,
        channel: impl Fn(&CMatrix) -> CMatrix,
    ) -> Result<Self> {
        let din: usize = in_dims.iter().product();
        let dout: usize = out_dims.iter().product();
        let total = din
            .checked_mul(dout)
            .filter(|&t| t <= MAX_DENSE_DIM)
            .ok_or_else(|| guardrail("Choi dimension", format!("{din}·{dout}"), MAX_DENSE_DIM))?;
        let mut m = CMatrix::zeros(total, total);
        let mut unit = CMatrix::zeros(din, din);
        for i in 0..din {
            for j in 0..din {
                unit[(i, j)] = C64::new(1.0, 0.0);
                let out = channel(&unit);
                unit[(i, j)] = C64::new(0.0, 0.0);
                if out.nrows() != dout || out.ncols() != dout {
                    return Err(mismatch(dout, out.nrows()));
                }
                m.view_mut((i * dout, j * dout), (dout, dout)).copy_from(&out);
            }
        }
        Self::sized(m, in_dims, out_dims)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn in_dims(&self) -> &[usize] {
        &self.in_dims
    }

    pub fn out_dims(&self) -> &[usize] {
        &self.out_dims
    }

    pub fn in_dim(&self) -> usize {
        self.in_dims.iter().product()
    }

    pub fn out_dim(&self) -> usize {
        self.out_dims.iter().product()
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eigenvalues(&self.matrix)?.first().copied().unwrap_or(0.0))
    }

    /// `max |Tr_out C − I|`.
    pub fn trace_preservation_defect(&self) -> Result<f64> {
        let mut dims = self.in_dims.clone();
        dims.extend_from_slice(&self.out_dims);
        let keep: Vec<usize> = (0..self.in_dims.len()).collect();
        let red = partial_trace_matrix(&self.matrix, &dims, &keep)?;
        let n = red.nrows();
        let diff = red - CMatrix::identity(n, n);
        Ok(diff.iter().fold(0.0f64, |m, z| m.max(z.norm())))
    }

    /// `𝒞(ρ) = Tr_in[(ρᵀ ⊗ I) C]`.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        let (din, dout) = (self.in_dim(), self.out_dim());
        if rho.nrows() != din || rho.ncols() != din {
            return Err(mismatch(din, rho.nrows()));
        }
        let mut out = CMatrix::zeros(dout, dout);
        for i in 0..din {
            for j in 0..din {
                let r = rho[(i, j)];
                if r == C64::new(0.0, 0.0) {
                    continue;
                }
                out += self.matrix.view((i * dout, j * dout), (dout, dout)) * r;
            }
        }
        Ok(out)
    }

    /// `Σ wᵢ Cᵢ` over operators with identical layouts.
    pub fn combine(terms: &[(f64, &ChoiOperator)]) -> Result<Self> {
        let (_, first) = terms.first().ok_or_else(|| invalid("empty combination"))?;
        let mut m = CMatrix::zeros(first.matrix.nrows(), first.matrix.ncols());
        for (w, c) in terms {
            if c.in_dims != first.in_dims || c.out_dims != first.out_dims {
                return Err(mismatch(
                    format!("{:?}→{:?}", first.in_dims, first.out_dims),
                    format!("{:?}→{:?}", c.in_dims, c.out_dims),
                ));
            }
            m += c.matrix.scale(*w);
        }
        Self::sized(m, first.in_dims.clone(), first.out_dims.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// Symmetric subspace: the universal cloning channel.
    Plus,
    /// Antisymmetric subspace: the universal NOT channel.
    Minus,
}

/// `(I ± SWAP)/2` on two blocks of dimension `block_dim`.
pub fn symmetry_projector(block_dim: usize, sign: Symmetry) -> CMatrix {
    let n = block_dim * block_dim;
    let swap = UnitaryMatrix::swap(block_dim);
    let s = match sign {
        Symmetry::Plus => 1.0,
        Symmetry::Minus => -1.0,
    };
    (CMatrix::identity(n, n) + swap.matrix().scale(s)).scale(0.5)
}

fn two_slot_dims(d: usize, n: usize) -> Result<(usize, Vec<usize>, Vec<usize>)> {
    if d == 0 || n == 0 {
        return Err(invalid("need d ≥ 1 and N ≥ 1"));
    }
    dense_dim("Choi dimension", d, 3 * n, 1)?;
    Ok((d.pow(n as u32), vec![d; n], vec![d; 2 * n]))
}

/// `C_±(ρ) = 2/(D±1) · P_±(ρ ⊗ I_D)P_±` with `D = d^N`, the swap acting
/// between the whole `B` block and the whole `C` block.
///
/// The dense Choi matrix has dimension `d^{3N}`, capped at [`MAX_DENSE_DIM`].
pub fn symmetric_choi(sign: Symmetry, d: usize, n: usize) -> Result<ChoiOperator> {
    let (dd, in_dims, out_dims) = two_slot_dims(d, n)?;
    if dd < 2 {
        return Err(invalid("d^N must be at least 2"));
    }
    let p = symmetry_projector(dd, sign);
    let norm = match sign {
        Symmetry::Plus => 2.0 / (dd as f64 + 1.0),
        Symmetry::Minus => 2.0 / (dd as f64 - 1.0),
    };
    let id = CMatrix::identity(dd, dd);
    ChoiOperator::from_channel(in_dims, out_dims, |rho| {
        (&p * kron(rho, &id) * &p).scale(norm)
    })
}

/// `N` uses of the two-output intermediary channel with `U = I`:
/// slot 0 gives `ρ_B ⊗ I_C/D`, slot 1 gives `I_B/D ⊗ ρ_C`.
pub fn intermediary_choi(slot: usize, d: usize, n: usize) -> Result<ChoiOperator> {
    if slot > 1 {
        return Err(invalid(format!("slot {slot} out of range for two outputs")));
    }
    let (dd, in_dims, out_dims) = two_slot_dims(d, n)?;
    let mixed = CMatrix::identity(dd, dd).unscale(dd as f64);
    ChoiOperator::from_channel(in_dims, out_dims, |rho| {
        if slot == 0 { kron(rho, &mixed) } else { kron(&mixed, rho) }
    })
}
