//! Labeled finite-dimensional tensor-product spaces, state vectors and dense
//! complex operators.
//!
//! Basis indexing is row-major over registers in declaration order: the
//! first register varies slowest. All types are immutable after
//! construction.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::DEFAULT_TOL;

/// Errors raised by space, state and operator constructors.
#[derive(Debug, Clone, PartialEq)]
pub enum HilbertError {
    /// Two states or operators live on different composite spaces.
    SpaceMismatch,
    /// A basis label is not declared in the named register.
    UnknownLabel { register: String, label: String },
    /// No register with this name in the composite space.
    UnknownRegister(String),
    /// Number of labels does not match the number of registers.
    LabelCountMismatch { expected: usize, got: usize },
    /// An operator or vector has the wrong dimension for its space.
    DimensionMismatch { expected: usize, got: usize },
    /// Normalization was requested for a (numerically) zero vector.
    ZeroNorm,
    /// An operation required a normalized state and did not get one.
    NotNormalized { norm: f64 },
    /// The matrix does not satisfy the contract of its declared kind.
    KindViolation { kind: OperatorKind, deviation: f64 },
    /// Duplicate register name or basis label.
    DuplicateName(String),
}

impl fmt::Display for HilbertError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HilbertError::SpaceMismatch => write!(f, "operands live on different spaces"),
            HilbertError::UnknownLabel { register, label } => {
                write!(f, "label {label:?} not in register {register:?}")
            }
            HilbertError::UnknownRegister(name) => write!(f, "no register named {name:?}"),
            HilbertError::LabelCountMismatch { expected, got } => {
                write!(f, "expected {expected} labels, got {got}")
            }
            HilbertError::DimensionMismatch { expected, got } => {
                write!(f, "expected dimension {expected}, got {got}")
            }
            HilbertError::ZeroNorm => write!(f, "cannot normalize a zero vector"),
            HilbertError::NotNormalized { norm } => {
                write!(f, "state is not normalized (norm = {norm})")
            }
            HilbertError::KindViolation { kind, deviation } => {
                write!(f, "matrix violates kind {kind:?} by {deviation:e}")
            }
            HilbertError::DuplicateName(name) => write!(f, "duplicate name {name:?}"),
        }
    }
}

impl core::error::Error for HilbertError {}

pub type Result<T> = core::result::Result<T, HilbertError>;

/// A named register: one tensor factor with an ordered, labeled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Register {
    name: String,
    labels: Vec<String>,
}

impl Register {
    pub fn new(name: &str, labels: &[&str]) -> Result<Self> {
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return Err(HilbertError::DuplicateName(a.to_string()));
            }
        }
        Ok(Register {
            name: name.to_string(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
        })
    }

    /// A register whose labels are the decimal strings `"0" .. "n-1"`.
    pub fn numeric(name: &str, n: usize) -> Self {
        use alloc::format;
        Register {
            name: name.to_string(),
            labels: (0..n).map(|i| format!("{i}")).collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| HilbertError::UnknownLabel {
                register: self.name.clone(),
                label: label.to_string(),
            })
    }
}

#[derive(Debug, PartialEq)]
struct SpaceInner {
    registers: Vec<Register>,
    /// Row-major strides: index = Σ component_i · stride_i.
    strides: Vec<usize>,
    dimension: usize,
}

/// An ordered tensor product of registers.
///
/// Cheap to clone (shared internally); equality is structural.
#[derive(Debug, Clone)]
pub struct CompositeSpace {
    inner: Arc<SpaceInner>,
}

impl PartialEq for CompositeSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner == other.inner
    }
}

impl CompositeSpace {
    pub fn new(registers: Vec<Register>) -> Result<Self> {
        for (i, r) in registers.iter().enumerate() {
            if registers[..i].iter().any(|q| q.name == r.name) {
                return Err(HilbertError::DuplicateName(r.name.clone()));
            }
        }
        let mut strides = vec![0usize; registers.len()];
        let mut acc = 1usize;
        for (i, r) in registers.iter().enumerate().rev() {
            strides[i] = acc;
            acc *= r.dimension();
        }
        Ok(CompositeSpace {
            inner: Arc::new(SpaceInner {
                registers,
                strides,
                dimension: acc,
            }),
        })
    }

    pub fn registers(&self) -> &[Register] {
        &self.inner.registers
    }

    pub fn dimension(&self) -> usize {
        self.inner.dimension
    }

    pub fn register_position(&self, name: &str) -> Result<usize> {
        self.inner
            .registers
            .iter()
            .position(|r| r.name == name)
            .ok_or_else(|| HilbertError::UnknownRegister(name.to_string()))
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        Ok(&self.inner.registers[self.register_position(name)?])
    }

    /// Per-register basis components of a flat index.
    pub fn components_of(&self, index: usize) -> Vec<usize> {
        let mut rem = index;
        self.inner
            .registers
            .iter()
            .zip(&self.inner.strides)
            .map(|(_, &s)| {
                let c = rem / s;
                rem %= s;
                c
            })
            .collect()
    }

    /// Flat index from per-register basis components.
    pub fn index_from_components(&self, components: &[usize]) -> usize {
        components
            .iter()
            .zip(&self.inner.strides)
            .map(|(&c, &s)| c * s)
            .sum()
    }

    /// Flat index of the basis element with one label per register.
    pub fn index_of(&self, labels: &[&str]) -> Result<usize> {
        if labels.len() != self.inner.registers.len() {
            return Err(HilbertError::LabelCountMismatch {
                expected: self.inner.registers.len(),
                got: labels.len(),
            });
        }
        let mut idx = 0;
        for ((reg, label), stride) in self
            .inner
            .registers
            .iter()
            .zip(labels)
            .zip(&self.inner.strides)
        {
            idx += reg.label_index(label)? * stride;
        }
        Ok(idx)
    }

    /// Labels of the basis element at a flat index, one per register.
    pub fn labels_at(&self, index: usize) -> Vec<&str> {
        self.components_of(index)
            .iter()
            .zip(&self.inner.registers)
            .map(|(&c, r)| r.labels[c].as_str())
            .collect()
    }
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::ONE;
        }
        m
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let dim = rows.len();
        let mut m = Matrix::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "matrix must be square");
            m.data[i * dim..(i + 1) * dim].copy_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        let n = self.dim;
        (0..n)
            .map(|i| {
                v.iter()
                    .enumerate()
                    .map(|(j, x)| self.data[i * n + j] * x)
                    .sum()
            })
            .collect()
    }

    pub fn adjoint(&self) -> Matrix {
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    /// max |a_ij − b_ij|
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn deviation_from_unitary(&self) -> f64 {
        self.adjoint().mul(self).max_abs_diff(&Matrix::identity(self.dim))
    }

    pub fn deviation_from_projector(&self) -> f64 {
        let idem = self.mul(self).max_abs_diff(self);
        let herm = self.adjoint().max_abs_diff(self);
        idem.max(herm)
    }

    pub fn deviation_from_hermitian(&self) -> f64 {
        self.adjoint().max_abs_diff(self)
    }
}

/// Structural classification of an operator, with a checked contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Unitary,
    Projector,
    Hermitian,
    General,
}

/// A complex linear operator over a composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    space: CompositeSpace,
    matrix: Matrix,
    kind: OperatorKind,
}

impl LinearOperator {
    /// Wraps a matrix, verifying the declared kind to `DEFAULT_TOL`.
    pub fn new(space: CompositeSpace, matrix: Matrix, kind: OperatorKind) -> Result<Self> {
        if matrix.dim() != space.dimension() {
            return Err(HilbertError::DimensionMismatch {
                expected: space.dimension(),
                got: matrix.dim(),
            });
        }
        let deviation = match kind {
            OperatorKind::Unitary => matrix.deviation_from_unitary(),
            OperatorKind::Projector => matrix.deviation_from_projector(),
            OperatorKind::Hermitian => matrix.deviation_from_hermitian(),
            OperatorKind::General => 0.0,
        };
        if deviation > DEFAULT_TOL {
            return Err(HilbertError::KindViolation { kind, deviation });
        }
        Ok(LinearOperator {
            space,
            matrix,
            kind,
        })
    }

    pub fn identity(space: CompositeSpace) -> Self {
        let matrix = Matrix::identity(space.dimension());
        LinearOperator {
            space,
            matrix,
            kind: OperatorKind::Unitary,
        }
    }

    /// The rank-one projector |ψ⟩⟨ψ| of a normalized state.
    pub fn projector_onto(state: &StateVector) -> Result<Self> {
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(HilbertError::NotNormalized { norm });
        }
        let n = state.space.dimension();
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, state.amplitudes[i] * state.amplitudes[j].conj());
            }
        }
        Ok(LinearOperator {
            space: state.space.clone(),
            matrix: m,
            kind: OperatorKind::Projector,
        })
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if self.space != state.space {
            return Err(HilbertError::SpaceMismatch);
        }
        Ok(StateVector {
            space: state.space.clone(),
            amplitudes: self.matrix.matvec(&state.amplitudes),
        })
    }

    /// `self · rhs` (rhs acts first).
    pub fn compose(&self, rhs: &LinearOperator) -> Result<LinearOperator> {
        if self.space != rhs.space {
            return Err(HilbertError::SpaceMismatch);
        }
        let kind = if self.kind == OperatorKind::Unitary && rhs.kind == OperatorKind::Unitary {
            OperatorKind::Unitary
        } else {
            OperatorKind::General
        };
        Ok(LinearOperator {
            space: self.space.clone(),
            matrix: self.matrix.mul(&rhs.matrix),
            kind,
        })
    }

    pub fn adjoint(&self) -> LinearOperator {
        LinearOperator {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
            kind: self.kind,
        }
    }

    /// `self + rhs`, downgrading the kind to hermitian or general.
    pub fn add(&self, rhs: &LinearOperator) -> Result<LinearOperator> {
        if self.space != rhs.space {
            return Err(HilbertError::SpaceMismatch);
        }
        let hermitian = matches!(
            self.kind,
            OperatorKind::Projector | OperatorKind::Hermitian
        ) && matches!(rhs.kind, OperatorKind::Projector | OperatorKind::Hermitian);
        let n = self.matrix.dim();
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.matrix.get(i, j) + rhs.matrix.get(i, j));
            }
        }
        Ok(LinearOperator {
            space: self.space.clone(),
            matrix: m,
            kind: if hermitian {
                OperatorKind::Hermitian
            } else {
                OperatorKind::General
            },
        })
    }

    /// Tensor-extends `self` onto `space`, acting on `target_registers`
    /// (one name per register of `self.space`, in matching order) and as
    /// identity elsewhere. Preserves the operator kind.
    pub fn embed(&self, target_registers: &[&str], space: &CompositeSpace) -> Result<LinearOperator> {
        let targets = resolve_targets(&self.space, target_registers, space)?;
        let n = space.dimension();
        let sub = &self.matrix;
        let mut m = Matrix::zeros(n);
        for col in 0..n {
            let comps = space.components_of(col);
            let tc = flatten_sub(&comps, &targets, &self.space);
            for tr in 0..sub.dim() {
                let a = sub.get(tr, tc);
                if a == Complex64::ZERO {
                    continue;
                }
                let row = replace_sub(&comps, &targets, &self.space, tr, space);
                m.set(row, col, a);
            }
        }
        Ok(LinearOperator {
            space: space.clone(),
            matrix: m,
            kind: self.kind,
        })
    }

    /// Like [`embed`](Self::embed), but the operator acts only when
    /// `control_register` carries `control_label`; identity otherwise.
    pub fn controlled_embed(
        &self,
        control_register: &str,
        control_label: &str,
        target_registers: &[&str],
        space: &CompositeSpace,
    ) -> Result<LinearOperator> {
        let ctrl_pos = space.register_position(control_register)?;
        let ctrl_idx = space.register(control_register)?.label_index(control_label)?;
        if target_registers.contains(&control_register) {
            return Err(HilbertError::DuplicateName(control_register.into()));
        }
        let targets = resolve_targets(&self.space, target_registers, space)?;
        let n = space.dimension();
        let sub = &self.matrix;
        let mut m = Matrix::zeros(n);
        for col in 0..n {
            let comps = space.components_of(col);
            if comps[ctrl_pos] != ctrl_idx {
                m.set(col, col, Complex64::ONE);
                continue;
            }
            let tc = flatten_sub(&comps, &targets, &self.space);
            for tr in 0..sub.dim() {
                let a = sub.get(tr, tc);
                if a == Complex64::ZERO {
                    continue;
                }
                let row = replace_sub(&comps, &targets, &self.space, tr, space);
                m.set(row, col, a);
            }
        }
        Ok(LinearOperator {
            space: space.clone(),
            matrix: m,
            kind: self.kind,
        })
    }
}

/// Positions in `space` of the target registers, with dimension checks
/// against the sub-operator's own registers.
fn resolve_targets(
    sub_space: &CompositeSpace,
    target_registers: &[&str],
    space: &CompositeSpace,
) -> Result<Vec<usize>> {
    if target_registers.len() != sub_space.registers().len() {
        return Err(HilbertError::LabelCountMismatch {
            expected: sub_space.registers().len(),
            got: target_registers.len(),
        });
    }
    let mut positions = Vec::with_capacity(target_registers.len());
    for (name, sub_reg) in target_registers.iter().zip(sub_space.registers()) {
        let pos = space.register_position(name)?;
        let reg = &space.registers()[pos];
        if reg.dimension() != sub_reg.dimension() {
            return Err(HilbertError::DimensionMismatch {
                expected: sub_reg.dimension(),
                got: reg.dimension(),
            });
        }
        if positions.contains(&pos) {
            return Err(HilbertError::DuplicateName(reg.name().into()));
        }
        positions.push(pos);
    }
    Ok(positions)
}

/// Flat sub-space index of the target components of a full-space index.
fn flatten_sub(comps: &[usize], targets: &[usize], sub_space: &CompositeSpace) -> usize {
    let sub_comps: Vec<usize> = targets.iter().map(|&p| comps[p]).collect();
    sub_space.index_from_components(&sub_comps)
}

/// Full-space index with the target components replaced by sub-index `tr`.
fn replace_sub(
    comps: &[usize],
    targets: &[usize],
    sub_space: &CompositeSpace,
    tr: usize,
    space: &CompositeSpace,
) -> usize {
    let sub_comps = sub_space.components_of(tr);
    let mut out = comps.to_vec();
    for (&p, &c) in targets.iter().zip(&sub_comps) {
        out[p] = c;
    }
    space.index_from_components(&out)
}

/// Tensor product of two states: the result lives on the concatenation
/// of both register lists (names must stay unique).
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let mut registers: Vec<Register> = a.space.registers().to_vec();
    registers.extend(b.space.registers().iter().cloned());
    let space = CompositeSpace::new(registers)?;
    let nb = b.space.dimension();
    let mut amps = Vec::with_capacity(space.dimension());
    for x in &a.amplitudes {
        for y in &b.amplitudes {
            amps.push(x * y);
        }
    }
    debug_assert_eq!(amps.len(), a.amplitudes.len() * nb);
    StateVector::from_amplitudes(space, amps)
}

/// A complex amplitude vector over a composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: CompositeSpace,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(space: CompositeSpace, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != space.dimension() {
            return Err(HilbertError::DimensionMismatch {
                expected: space.dimension(),
                got: amplitudes.len(),
            });
        }
        Ok(StateVector { space, amplitudes })
    }

    pub fn zero(space: CompositeSpace) -> Self {
        let amplitudes = vec![Complex64::ZERO; space.dimension()];
        StateVector { space, amplitudes }
    }

    /// The unit computational basis vector for one label per register.
    pub fn basis_state(space: &CompositeSpace, labels: &[&str]) -> Result<Self> {
        let idx = space.index_of(labels)?;
        let mut s = StateVector::zero(space.clone());
        s.amplitudes[idx] = Complex64::ONE;
        Ok(s)
    }

    /// Linear combination of same-space states. Not auto-normalized.
    pub fn superpose(terms: &[(Complex64, &StateVector)]) -> Result<Self> {
        let (_, first) = terms.first().ok_or(HilbertError::ZeroNorm)?;
        let mut out = StateVector::zero(first.space.clone());
        for (coeff, state) in terms {
            if state.space != out.space {
                return Err(HilbertError::SpaceMismatch);
            }
            for (o, a) in out.amplitudes.iter_mut().zip(&state.amplitudes) {
                *o += coeff * a;
            }
        }
        Ok(out)
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude_of(&self, labels: &[&str]) -> Result<Complex64> {
        Ok(self.amplitudes[self.space.index_of(labels)?])
    }

    pub fn norm(&self) -> f64 {
        num_traits::Float::sqrt(self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>())
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn normalized(&self) -> Result<StateVector> {
        let n = self.norm();
        if n < 1e-12 {
            return Err(HilbertError::ZeroNorm);
        }
        let inv = Complex64::new(1.0 / n, 0.0);
        Ok(StateVector {
            space: self.space.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * inv).collect(),
        })
    }

    pub fn scaled(&self, factor: Complex64) -> StateVector {
        StateVector {
            space: self.space.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    /// ⟨bra|ket⟩ — conjugate-linear in `self`, linear in `ket`.
    pub fn inner(&self, ket: &StateVector) -> Result<Complex64> {
        if self.space != ket.space {
            return Err(HilbertError::SpaceMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&ket.amplitudes)
            .map(|(b, k)| b.conj() * k)
            .sum())
    }

    /// |⟨a|b⟩| for normalized states; 1 iff equal up to a global phase.
    pub fn fidelity_up_to_phase(&self, other: &StateVector) -> Result<f64> {
        for s in [self, other] {
            let n = s.norm();
            if (n - 1.0).abs() > 1e-10 {
                return Err(HilbertError::NotNormalized { norm: n });
            }
        }
        Ok(self.inner(other)?.norm())
    }

    /// max_i |a_i − b_i| over raw amplitudes.
    pub fn max_amplitude_diff(&self, other: &StateVector) -> Result<f64> {
        if self.space != other.space {
            return Err(HilbertError::SpaceMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Born probability of finding `register` in basis state `label`.
    pub fn marginal_probability(&self, register: &str, label: &str) -> Result<f64> {
        let pos = self.space.register_position(register)?;
        let idx = self.space.register(register)?.label_index(label)?;
        let mut p = 0.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if self.space.components_of(i)[pos] == idx {
                p += a.norm_sqr();
            }
        }
        Ok(p)
    }

    /// Purity Tr ρ² of the reduced density matrix of one register.
    pub fn reduced_purity(&self, register: &str) -> Result<f64> {
        let pos = self.space.register_position(register)?;
        let d = self.space.register(register)?.dimension();
        let mut rho = vec![Complex64::ZERO; d * d];
        let n = self.space.dimension();
        // group indices by non-target components
        for i in 0..n {
            let ci = self.space.components_of(i);
            for j in 0..n {
                let cj = self.space.components_of(j);
                let mut same_rest = true;
                for p in 0..ci.len() {
                    if p != pos && ci[p] != cj[p] {
                        same_rest = false;
                        break;
                    }
                }
                if same_rest {
                    rho[ci[pos] * d + cj[pos]] += self.amplitudes[i] * self.amplitudes[j].conj();
                }
            }
        }
        let mut purity = Complex64::ZERO;
        for a in 0..d {
            for b in 0..d {
                purity += rho[a * d + b] * rho[b * d + a];
            }
        }
        Ok(purity.re)
    }

    /// Fixes `register` to `label` and returns the (unnormalized)
    /// amplitude vector on the remaining registers.
    pub fn slice_register(&self, register: &str, label: &str) -> Result<StateVector> {
        let pos = self.space.register_position(register)?;
        let idx = self.space.register(register)?.label_index(label)?;
        let remaining: Vec<Register> = self
            .space
            .registers()
            .iter()
            .enumerate()
            .filter(|(p, _)| *p != pos)
            .map(|(_, r)| r.clone())
            .collect();
        let sub_space = CompositeSpace::new(remaining)?;
        let mut amps = vec![Complex64::ZERO; sub_space.dimension()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let comps = self.space.components_of(i);
            if comps[pos] != idx {
                continue;
            }
            let rest: Vec<usize> = comps
                .iter()
                .enumerate()
                .filter(|(p, _)| *p != pos)
                .map(|(_, &c)| c)
                .collect();
            amps[sub_space.index_from_components(&rest)] = *a;
        }
        Ok(StateVector {
            space: sub_space,
            amplitudes: amps,
        })
    }
}
