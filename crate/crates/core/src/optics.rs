//! Optical elements and the wave-particle toolbox.
//!
//! Every element is a concrete unitary on a small register space. The
//! toolbox composes polarizing beam splitter, half-wave plate, balanced
//! beam splitters and phase shifters into the wave-particle superposition
//! `cos α |W⟩ + sin α |P⟩` on the four output modes.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // needed for f64 math under no_std
use num_traits::Float;

use crate::hilbert::{
    CompositeSpace, HilbertError, LinearOperator, Matrix, OperatorKind, Register, Result,
    StateVector,
};

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// The two-arm register {L, R}.
pub fn arm_register() -> Register {
    Register::new("arm", &["L", "R"]).expect("static labels")
}

/// The four-mode register {1..4} at the toolbox output.
pub fn mode_register() -> Register {
    Register::new("mode", &["1", "2", "3", "4"]).expect("static labels")
}

/// Polarization register {H, V}; only used inside the toolbox.
pub fn pol_register() -> Register {
    Register::new("pol", &["H", "V"]).expect("static labels")
}

/// Path register {a, 1..4}: the input port plus the four internal paths.
pub fn path_register() -> Register {
    Register::new("path", &["a", "1", "2", "3", "4"]).expect("static labels")
}

pub fn mode_space() -> CompositeSpace {
    CompositeSpace::new(vec![mode_register()]).expect("static registers")
}

pub fn arm_space() -> CompositeSpace {
    CompositeSpace::new(vec![arm_register()]).expect("static registers")
}

fn pol_path_space() -> CompositeSpace {
    CompositeSpace::new(vec![pol_register(), path_register()]).expect("static registers")
}

/// Which concrete optical element an [`Element`] is, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementKind {
    Pbs,
    HwpPath1,
    BsSym { m: String, n: String },
    PhaseShifter { mode: String, phi: f64 },
    Sigma1234,
    Bs3,
    WaveRouter { phi1: f64, phi2: f64 },
}

/// A named optical element: a unitary on its own register space.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    kind: ElementKind,
    op: LinearOperator,
}

impl Element {
    pub fn kind(&self) -> &ElementKind {
        &self.kind
    }

    pub fn operator(&self) -> &LinearOperator {
        &self.op
    }
}

/// Toolbox parameters: the polarization angle and the two path phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToolboxParams {
    pub alpha: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl ToolboxParams {
    pub fn new(alpha: f64, phi1: f64, phi2: f64) -> Self {
        ToolboxParams { alpha, phi1, phi2 }
    }

    /// The flagship scenario fixes φ1 = φ2; unequal phases are permitted
    /// but the run is flagged as leaving that scenario.
    pub fn is_paper_scenario(&self) -> bool {
        (self.phi1 - self.phi2).abs() <= 1e-12
    }
}

/// Polarizing beam splitter on pol ⊗ path: |H⟩|a⟩ → |H⟩|1⟩ and
/// |V⟩|a⟩ → |V⟩|2⟩, completed to a unitary by the reverse mappings.
pub fn pbs() -> Element {
    let sp = pol_path_space();
    let n = sp.dimension();
    let mut m = Matrix::identity(n);
    let swaps = [(("H", "a"), ("H", "1")), (("V", "a"), ("V", "2"))];
    for ((p1, m1), (p2, m2)) in swaps {
        let i = sp.index_of(&[p1, m1]).expect("static labels");
        let j = sp.index_of(&[p2, m2]).expect("static labels");
        m.set(i, i, Complex64::ZERO);
        m.set(j, j, Complex64::ZERO);
        m.set(i, j, Complex64::ONE);
        m.set(j, i, Complex64::ONE);
    }
    Element {
        kind: ElementKind::Pbs,
        op: LinearOperator::new(sp, m, OperatorKind::Unitary).expect("permutation is unitary"),
    }
}

/// Half-wave plate on path 1 only: |H⟩ ↔ |V⟩ when path = 1.
pub fn hwp_path1() -> Element {
    let sp = pol_path_space();
    let mut m = Matrix::identity(sp.dimension());
    let i = sp.index_of(&["H", "1"]).expect("static labels");
    let j = sp.index_of(&["V", "1"]).expect("static labels");
    m.set(i, i, Complex64::ZERO);
    m.set(j, j, Complex64::ZERO);
    m.set(i, j, Complex64::ONE);
    m.set(j, i, Complex64::ONE);
    Element {
        kind: ElementKind::HwpPath1,
        op: LinearOperator::new(sp, m, OperatorKind::Unitary).expect("permutation is unitary"),
    }
}

/// Balanced beam splitter on ports (m, n) of `register`:
/// |m⟩ → (|m⟩+|n⟩)/√2, |n⟩ → (|m⟩−|n⟩)/√2, identity elsewhere.
pub fn bs_sym(register: &Register, port_m: &str, port_n: &str) -> Result<Element> {
    if port_m == port_n {
        return Err(HilbertError::DuplicateName(port_m.to_string()));
    }
    let i = register.label_index(port_m)?;
    let j = register.label_index(port_n)?;
    let sp = CompositeSpace::new(vec![register.clone()])?;
    let mut m = Matrix::identity(sp.dimension());
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    m.set(i, i, h);
    m.set(i, j, h);
    m.set(j, i, h);
    m.set(j, j, -h);
    Ok(Element {
        kind: ElementKind::BsSym {
            m: port_m.to_string(),
            n: port_n.to_string(),
        },
        op: LinearOperator::new(sp, m, OperatorKind::Unitary)?,
    })
}

/// Phase shifter: multiplies the amplitude of one basis label by e^{iφ}.
pub fn phase_shifter(register: &Register, label: &str, phi: f64) -> Result<Element> {
    let i = register.label_index(label)?;
    let sp = CompositeSpace::new(vec![register.clone()])?;
    let mut m = Matrix::identity(sp.dimension());
    m.set(i, i, Complex64::from_polar(1.0, phi));
    Ok(Element {
        kind: ElementKind::PhaseShifter {
            mode: label.to_string(),
            phi,
        },
        op: LinearOperator::new(sp, m, OperatorKind::Unitary)?,
    })
}

/// The mode permutation swapping 1 ↔ 2 and 3 ↔ 4.
pub fn sigma1234() -> Element {
    let sp = mode_space();
    let mut m = Matrix::zeros(4);
    m.set(0, 1, Complex64::ONE);
    m.set(1, 0, Complex64::ONE);
    m.set(2, 3, Complex64::ONE);
    m.set(3, 2, Complex64::ONE);
    Element {
        kind: ElementKind::Sigma1234,
        op: LinearOperator::new(sp, m, OperatorKind::Unitary).expect("permutation is unitary"),
    }
}

/// The recombining arm beam splitter:
/// |L⟩ → (|R⟩−|L⟩)/√2, |R⟩ → (|R⟩+|L⟩)/√2.
pub fn bs3() -> Element {
    let sp = arm_space();
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let mut m = Matrix::zeros(2);
    m.set(0, 0, -h); // ⟨L|U|L⟩
    m.set(1, 0, h); // ⟨R|U|L⟩
    m.set(0, 1, h); // ⟨L|U|R⟩
    m.set(1, 1, h); // ⟨R|U|R⟩
    Element {
        kind: ElementKind::Bs3,
        op: LinearOperator::new(sp, m, OperatorKind::Unitary).expect("orthogonal matrix"),
    }
}

/// The wave state |W⟩ = e^{iφ1/2}(cos(φ1/2)|1⟩ − i sin(φ1/2)|3⟩).
pub fn wave_state(phi1: f64) -> StateVector {
    let sp = mode_space();
    let g = Complex64::from_polar(1.0, phi1 / 2.0);
    let amps = vec![
        g * Complex64::new((phi1 / 2.0).cos(), 0.0),
        Complex64::ZERO,
        g * Complex64::new(0.0, -(phi1 / 2.0).sin()),
        Complex64::ZERO,
    ];
    StateVector::from_amplitudes(sp, amps).expect("dimension 4")
}

/// The particle state |P⟩ = (|2⟩ + e^{iφ2}|4⟩)/√2.
pub fn particle_state(phi2: f64) -> StateVector {
    let sp = mode_space();
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let amps = vec![
        Complex64::ZERO,
        h,
        Complex64::ZERO,
        h * Complex64::from_polar(1.0, phi2),
    ];
    StateVector::from_amplitudes(sp, amps).expect("dimension 4")
}

/// |W̄⟩ = e^{iφ1/2}(sin(φ1/2)|1⟩ + i cos(φ1/2)|3⟩): the orthogonal
/// complement of |W⟩ within span{|1⟩, |3⟩}.
pub fn wave_bar_state(phi1: f64) -> StateVector {
    let sp = mode_space();
    let g = Complex64::from_polar(1.0, phi1 / 2.0);
    let amps = vec![
        g * Complex64::new((phi1 / 2.0).sin(), 0.0),
        Complex64::ZERO,
        g * Complex64::new(0.0, (phi1 / 2.0).cos()),
        Complex64::ZERO,
    ];
    StateVector::from_amplitudes(sp, amps).expect("dimension 4")
}

/// |P̄⟩ = (|2⟩ − e^{iφ2}|4⟩)/√2: the orthogonal complement of |P⟩
/// within span{|2⟩, |4⟩}.
pub fn particle_bar_state(phi2: f64) -> StateVector {
    let sp = mode_space();
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let amps = vec![
        Complex64::ZERO,
        h,
        Complex64::ZERO,
        -h * Complex64::from_polar(1.0, phi2),
    ];
    StateVector::from_amplitudes(sp, amps).expect("dimension 4")
}

/// Router realizing the measurement effect of X = |W⟩⟨W| as a two-outcome
/// element: |W⟩ → port 1 (transmitted), |P⟩ → port 2, |W̄⟩ → port 3,
/// |P̄⟩ → port 4 (all three reflected).
pub fn wave_router(phi1: f64, phi2: f64) -> Element {
    let sp = mode_space();
    let basis = [
        wave_state(phi1),
        particle_state(phi2),
        wave_bar_state(phi1),
        particle_bar_state(phi2),
    ];
    // U = Σ_k |port_k⟩⟨ξ_k|
    let mut m = Matrix::zeros(4);
    for (port, xi) in basis.iter().enumerate() {
        for (j, a) in xi.amplitudes().iter().enumerate() {
            m.set(port, j, a.conj());
        }
    }
    Element {
        kind: ElementKind::WaveRouter { phi1, phi2 },
        op: LinearOperator::new(sp, m, OperatorKind::Unitary)
            .expect("orthonormal basis change is unitary"),
    }
}

/// Looks up an element's unitary by catalog name, for the circuit DSL.
pub fn element_names() -> &'static [&'static str] {
    &["pbs", "hwp", "bs_sym", "phase", "sigma1234", "bs3", "wave_router"]
}

/// Drops the unused input port "a" from a path-register state, returning
/// the state on the four-mode register. The amplitude on "a" must be
/// negligible.
pub fn path_to_mode(state: &StateVector) -> Result<StateVector> {
    let reg = state.space().register("path")?;
    let a_amp = state.amplitude_of(&["a"])?;
    if a_amp.norm() > 1e-12 {
        return Err(HilbertError::KindViolation {
            kind: OperatorKind::General,
            deviation: a_amp.norm(),
        });
    }
    let _ = reg;
    let mut amps = Vec::with_capacity(4);
    for label in ["1", "2", "3", "4"] {
        amps.push(state.amplitude_of(&[label])?);
    }
    StateVector::from_amplitudes(mode_space(), amps)
}

/// The element sequence of the toolbox on pol ⊗ path, in application order.
pub fn toolbox_pipeline(params: &ToolboxParams) -> Result<Vec<LinearOperator>> {
    let sp = pol_path_space();
    let path = path_register();
    let ops = vec![
        pbs().op,
        hwp_path1().op,
        bs_sym(&path, "1", "3")?.op.embed(&["path"], &sp)?,
        bs_sym(&path, "2", "4")?.op.embed(&["path"], &sp)?,
        phase_shifter(&path, "3", params.phi1)?.op.embed(&["path"], &sp)?,
        phase_shifter(&path, "4", params.phi2)?.op.embed(&["path"], &sp)?,
        bs_sym(&path, "1", "3")?.op.embed(&["path"], &sp)?,
    ];
    Ok(ops)
}

/// Runs (cos α|H⟩ + sin α|V⟩)|a⟩ through the toolbox and returns
/// |ψ_out⟩ = cos α|W⟩ + sin α|P⟩ on the mode register.
///
/// The polarization factor is verified separable (reduced purity 1 to
/// 1e−10) before being dropped.
pub fn toolbox(params: &ToolboxParams) -> Result<StateVector> {
    let sp = pol_path_space();
    let h = StateVector::basis_state(&sp, &["H", "a"])?;
    let v = StateVector::basis_state(&sp, &["V", "a"])?;
    let mut state = StateVector::superpose(&[
        (Complex64::new(params.alpha.cos(), 0.0), &h),
        (Complex64::new(params.alpha.sin(), 0.0), &v),
    ])?;
    for op in toolbox_pipeline(params)? {
        state = op.apply(&state)?;
    }
    let purity = state.reduced_purity("pol")?;
    if (purity - 1.0).abs() > 1e-10 {
        return Err(HilbertError::NotNormalized { norm: purity });
    }
    // after the HWP all amplitude carries |V⟩
    let on_v = state.slice_register("pol", "V")?;
    path_to_mode(&on_v)
}

impl ElementKind {
    /// Catalog name as used by the circuit DSL.
    pub fn name(&self) -> &'static str {
        match self {
            ElementKind::Pbs => "pbs",
            ElementKind::HwpPath1 => "hwp",
            ElementKind::BsSym { .. } => "bs_sym",
            ElementKind::PhaseShifter { .. } => "phase",
            ElementKind::Sigma1234 => "sigma1234",
            ElementKind::Bs3 => "bs3",
            ElementKind::WaveRouter { .. } => "wave_router",
        }
    }
}

impl core::fmt::Display for ElementKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ElementKind::BsSym { m, n } => write!(f, "bs_sym {m} {n}"),
            ElementKind::PhaseShifter { mode, phi } => write!(f, "phase {mode} {phi}"),
            other => write!(f, "{}", other.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn pbs_splits_polarization() {
        let sp = pol_path_space();
        let alpha = 0.7;
        let h = StateVector::basis_state(&sp, &["H", "a"]).unwrap();
        let v = StateVector::basis_state(&sp, &["V", "a"]).unwrap();
        let input = StateVector::superpose(&[
            (Complex64::new(alpha.cos(), 0.0), &h),
            (Complex64::new(alpha.sin(), 0.0), &v),
        ])
        .unwrap();
        let out = pbs().op.apply(&input).unwrap();
        assert!((out.amplitude_of(&["H", "1"]).unwrap().re - alpha.cos()).abs() <= 1e-12);
        assert!((out.amplitude_of(&["V", "2"]).unwrap().re - alpha.sin()).abs() <= 1e-12);
        // α = 0 case
        let out = pbs().op.apply(&h).unwrap();
        assert_eq!(out.amplitude_of(&["H", "1"]).unwrap(), Complex64::ONE);
    }

    #[test]
    fn hwp_flips_polarization_on_path_1_only() {
        let sp = pol_path_space();
        let h1 = StateVector::basis_state(&sp, &["H", "1"]).unwrap();
        let out = hwp_path1().op.apply(&h1).unwrap();
        assert_eq!(out.amplitude_of(&["V", "1"]).unwrap(), Complex64::ONE);
        let v2 = StateVector::basis_state(&sp, &["V", "2"]).unwrap();
        let out = hwp_path1().op.apply(&v2).unwrap();
        assert_eq!(out.amplitude_of(&["V", "2"]).unwrap(), Complex64::ONE);
        // involution
        let twice = hwp_path1().op.compose(&hwp_path1().op).unwrap();
        assert!(twice
            .matrix()
            .max_abs_diff(&Matrix::identity(sp.dimension()))
            <= 1e-12);
    }

    #[test]
    fn bs_sym_mach_zehnder_zero_phase_returns_input() {
        let mode = mode_register();
        let bs = bs_sym(&mode, "1", "3").unwrap();
        let sp = mode_space();
        let one = StateVector::basis_state(&sp, &["1"]).unwrap();
        let split = bs.op.apply(&one).unwrap();
        let recombined = bs.op.apply(&split).unwrap();
        assert!(recombined.max_amplitude_diff(&one).unwrap() <= 1e-12);
    }

    #[test]
    fn bs_sym_produces_wave_state_with_phase() {
        let phi1 = PI / 3.0;
        let mode = mode_register();
        let sp = mode_space();
        let one = StateVector::basis_state(&sp, &["1"]).unwrap();
        let three = StateVector::basis_state(&sp, &["3"]).unwrap();
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let input = StateVector::superpose(&[
            (h, &one),
            (h * Complex64::from_polar(1.0, phi1), &three),
        ])
        .unwrap();
        let out = bs_sym(&mode, "1", "3").unwrap().op.apply(&input).unwrap();
        assert!(out.max_amplitude_diff(&wave_state(phi1)).unwrap() <= 1e-12);
    }

    #[test]
    fn bs_sym_rejects_bad_ports() {
        let mode = mode_register();
        assert!(bs_sym(&mode, "1", "1").is_err());
        assert!(bs_sym(&mode, "1", "7").is_err());
    }

    #[test]
    fn phase_shifter_edge_cases() {
        let mode = mode_register();
        let sp = mode_space();
        let id = Matrix::identity(sp.dimension());
        assert!(phase_shifter(&mode, "3", 0.0).unwrap().op.matrix().max_abs_diff(&id) <= 1e-12);
        assert!(
            phase_shifter(&mode, "3", 2.0 * PI).unwrap().op.matrix().max_abs_diff(&id) <= 1e-12
        );
        assert!(phase_shifter(&mode, "9", 1.0).is_err());
    }

    #[test]
    fn sigma1234_permutes_and_squares_to_identity() {
        let sp = mode_space();
        let two = StateVector::basis_state(&sp, &["2"]).unwrap();
        let out = sigma1234().op.apply(&two).unwrap();
        assert_eq!(out.amplitude_of(&["1"]).unwrap(), Complex64::ONE);
        let four = StateVector::basis_state(&sp, &["4"]).unwrap();
        let out = sigma1234().op.apply(&four).unwrap();
        assert_eq!(out.amplitude_of(&["3"]).unwrap(), Complex64::ONE);
        let twice = sigma1234().op.compose(&sigma1234().op).unwrap();
        assert!(twice.matrix().max_abs_diff(&Matrix::identity(4)) <= 1e-12);
    }

    #[test]
    fn sigma1234_converts_shifted_particle_to_wave() {
        // e^{iφ/2}(cos(φ/2)|2⟩ − i sin(φ/2)|4⟩) → |W⟩
        let phi = 1.1;
        let sp = mode_space();
        let g = Complex64::from_polar(1.0, phi / 2.0);
        let two = StateVector::basis_state(&sp, &["2"]).unwrap();
        let four = StateVector::basis_state(&sp, &["4"]).unwrap();
        let input = StateVector::superpose(&[
            (g * Complex64::new((phi / 2.0).cos(), 0.0), &two),
            (g * Complex64::new(0.0, -(phi / 2.0).sin()), &four),
        ])
        .unwrap();
        let out = sigma1234().op.apply(&input).unwrap();
        assert!(out.max_amplitude_diff(&wave_state(phi)).unwrap() <= 1e-12);
    }

    #[test]
    fn bs3_recombines_arms() {
        let sp = arm_space();
        let l = StateVector::basis_state(&sp, &["L"]).unwrap();
        let r = StateVector::basis_state(&sp, &["R"]).unwrap();
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let plus = StateVector::superpose(&[(h, &l), (h, &r)]).unwrap();
        let out = bs3().op.apply(&plus).unwrap();
        assert!(out.max_amplitude_diff(&r).unwrap() <= 1e-12);
        let minus = StateVector::superpose(&[(h, &r), (-h, &l)]).unwrap();
        let out = bs3().op.apply(&minus).unwrap();
        assert!(out.max_amplitude_diff(&l).unwrap() <= 1e-12);
    }

    #[test]
    fn wave_and_particle_states() {
        assert!(wave_state(0.0)
            .max_amplitude_diff(&StateVector::basis_state(&mode_space(), &["1"]).unwrap())
            .unwrap()
            <= 1e-12);
        // ⟨W|P⟩ = 0 on disjoint supports, any phases
        for k in 0..8 {
            let phi1 = k as f64 * PI / 4.0;
            for j in 0..8 {
                let phi2 = j as f64 * PI / 4.0;
                let ip = wave_state(phi1).inner(&particle_state(phi2)).unwrap();
                assert_eq!(ip, Complex64::ZERO);
            }
        }
        // particle detection in mode 2 is phase-independent; wave follows cos²(φ/2)
        for k in 0..=8 {
            let phi = k as f64 * PI / 4.0;
            let p2 = particle_state(phi).marginal_probability("mode", "2").unwrap();
            assert!((p2 - 0.5).abs() <= 1e-12);
            let w1 = wave_state(phi).marginal_probability("mode", "1").unwrap();
            assert!((w1 - (phi / 2.0).cos().powi(2)).abs() <= 1e-12);
        }
    }

    #[test]
    fn router_separates_wave_and_particle() {
        let phi = PI / 3.0;
        let router = wave_router(phi, phi);
        let out = router.op.apply(&wave_state(phi)).unwrap();
        assert!((out.marginal_probability("mode", "1").unwrap() - 1.0).abs() <= 1e-12);
        let out = router.op.apply(&particle_state(phi)).unwrap();
        assert!((out.marginal_probability("mode", "2").unwrap() - 1.0).abs() <= 1e-12);
        // equal superposition transmits with probability 1/2
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let mix = StateVector::superpose(&[(h, &wave_state(phi)), (h, &particle_state(phi))])
            .unwrap();
        let out = router.op.apply(&mix).unwrap();
        assert!((out.marginal_probability("mode", "1").unwrap() - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn wp_basis_is_orthonormal() {
        let phi1 = 0.9;
        let phi2 = 2.3;
        let basis = [
            wave_state(phi1),
            wave_bar_state(phi1),
            particle_state(phi2),
            particle_bar_state(phi2),
        ];
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let ip = a.inner(b).unwrap();
                let expected = if i == j { Complex64::ONE } else { Complex64::ZERO };
                assert!((ip - expected).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn toolbox_matches_closed_form() {
        let params = ToolboxParams::new(PI / 4.0, PI / 3.0, PI / 3.0);
        let out = toolbox(&params).unwrap();
        let expected = StateVector::superpose(&[
            (Complex64::new(params.alpha.cos(), 0.0), &wave_state(params.phi1)),
            (Complex64::new(params.alpha.sin(), 0.0), &particle_state(params.phi2)),
        ])
        .unwrap();
        assert!(out.max_amplitude_diff(&expected).unwrap() <= 1e-12);
    }

    #[test]
    fn toolbox_extremes() {
        let w = toolbox(&ToolboxParams::new(0.0, 0.8, 0.8)).unwrap();
        assert!(w.max_amplitude_diff(&wave_state(0.8)).unwrap() <= 1e-12);
        let p = toolbox(&ToolboxParams::new(PI / 2.0, 0.8, 0.8)).unwrap();
        assert!(p.max_amplitude_diff(&particle_state(0.8)).unwrap() <= 1e-12);
    }
}
