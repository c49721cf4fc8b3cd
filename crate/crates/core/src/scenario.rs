//! The flagship protocol: pre/post-selected states, the eight
//! arm⊗attribute projectors, analytic weak values, the analyzer circuit
//! and detector statistics.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)] // needed for f64 math under no_std
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hilbert::{
    tensor, CompositeSpace, HilbertError, LinearOperator, StateVector,
};
use crate::optics::{
    arm_register, bs3, bs_sym, mode_register, particle_bar_state, particle_state, sigma1234,
    toolbox, wave_bar_state, wave_router, wave_state, ToolboxParams,
};

/// Errors from the protocol layer.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioError {
    Hilbert(HilbertError),
    /// ⟨Ψ_f|Ψ_i⟩ is numerically zero; weak values are undefined.
    VanishingOverlap { magnitude: f64 },
    /// Monte Carlo sampling needs at least one shot.
    ZeroShots,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Hilbert(e) => write!(f, "{e}"),
            ScenarioError::VanishingOverlap { magnitude } => {
                write!(f, "pre/post overlap too small for weak values: |⟨f|i⟩| = {magnitude:e}")
            }
            ScenarioError::ZeroShots => write!(f, "sampling requires shots ≥ 1"),
        }
    }
}

impl core::error::Error for ScenarioError {}

impl From<HilbertError> for ScenarioError {
    fn from(e: HilbertError) -> Self {
        ScenarioError::Hilbert(e)
    }
}

pub type Result<T> = core::result::Result<T, ScenarioError>;

/// Protocol parameters; identical shape to [`ToolboxParams`] but named for
/// the pre/post-selection context.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub alpha: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl ScenarioConfig {
    pub fn new(alpha: f64, phi1: f64, phi2: f64) -> Self {
        ScenarioConfig { alpha, phi1, phi2 }
    }

    pub fn toolbox_params(&self) -> ToolboxParams {
        ToolboxParams::new(self.alpha, self.phi1, self.phi2)
    }

    /// φ1 = φ2 is the published scenario; other settings are permitted
    /// but flagged.
    pub fn is_paper_scenario(&self) -> bool {
        self.toolbox_params().is_paper_scenario()
    }

    /// ⟨Ψ_f|Ψ_i⟩ = (cos α + sin α)/2 in closed form.
    pub fn analytic_overlap(&self) -> f64 {
        (self.alpha.cos() + self.alpha.sin()) / 2.0
    }
}

/// The joint arm ⊗ mode space of the interferometer.
pub fn arm_mode_space() -> CompositeSpace {
    CompositeSpace::new(vec![arm_register(), mode_register()]).expect("static registers")
}

/// The eight projectors Π^{L,R}_{W,W̄,P,P̄} on arm ⊗ mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectorLabel {
    LW,
    LWBar,
    LP,
    LPBar,
    RW,
    RWBar,
    RP,
    RPBar,
}

impl ProjectorLabel {
    pub const ALL: [ProjectorLabel; 8] = [
        ProjectorLabel::LW,
        ProjectorLabel::LWBar,
        ProjectorLabel::LP,
        ProjectorLabel::LPBar,
        ProjectorLabel::RW,
        ProjectorLabel::RWBar,
        ProjectorLabel::RP,
        ProjectorLabel::RPBar,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ProjectorLabel::LW => "Pi_L_W",
            ProjectorLabel::LWBar => "Pi_L_Wbar",
            ProjectorLabel::LP => "Pi_L_P",
            ProjectorLabel::LPBar => "Pi_L_Pbar",
            ProjectorLabel::RW => "Pi_R_W",
            ProjectorLabel::RWBar => "Pi_R_Wbar",
            ProjectorLabel::RP => "Pi_R_P",
            ProjectorLabel::RPBar => "Pi_R_Pbar",
        }
    }

    fn arm(&self) -> &'static str {
        match self {
            ProjectorLabel::LW | ProjectorLabel::LWBar | ProjectorLabel::LP
            | ProjectorLabel::LPBar => "L",
            _ => "R",
        }
    }
}

/// The full projector family for one (φ1, φ2) setting.
#[derive(Debug, Clone)]
pub struct ProjectorSet {
    projectors: Vec<(ProjectorLabel, LinearOperator)>,
}

impl ProjectorSet {
    pub fn new(phi1: f64, phi2: f64) -> Result<Self> {
        let arm_sp = CompositeSpace::new(vec![arm_register()])?;
        let mut projectors = Vec::with_capacity(8);
        for label in ProjectorLabel::ALL {
            let attribute = match label {
                ProjectorLabel::LW | ProjectorLabel::RW => wave_state(phi1),
                ProjectorLabel::LWBar | ProjectorLabel::RWBar => wave_bar_state(phi1),
                ProjectorLabel::LP | ProjectorLabel::RP => particle_state(phi2),
                ProjectorLabel::LPBar | ProjectorLabel::RPBar => particle_bar_state(phi2),
            };
            let arm = StateVector::basis_state(&arm_sp, &[label.arm()])?;
            let joint = tensor(&arm, &attribute)?;
            projectors.push((label, LinearOperator::projector_onto(&joint)?));
        }
        Ok(ProjectorSet { projectors })
    }

    pub fn get(&self, label: ProjectorLabel) -> &LinearOperator {
        &self
            .projectors
            .iter()
            .find(|(l, _)| *l == label)
            .expect("all labels present")
            .1
    }

    pub fn iter(&self) -> impl Iterator<Item = (ProjectorLabel, &LinearOperator)> {
        self.projectors.iter().map(|(l, p)| (*l, p))
    }
}

/// Pre-selected state (|L⟩+|R⟩)/√2 ⊗ (cos α|W⟩ + sin α|P⟩), built by
/// sending the toolbox output through the arm splitter BS1.
pub fn pre_state(cfg: &ScenarioConfig) -> Result<StateVector> {
    let arm_sp = CompositeSpace::new(vec![arm_register()])?;
    let left = StateVector::basis_state(&arm_sp, &["L"])?;
    let psi_out = toolbox(&cfg.toolbox_params())?;
    let entering = tensor(&left, &psi_out)?;
    let bs1 = bs_sym(&arm_register(), "L", "R")?
        .operator()
        .embed(&["arm"], &arm_mode_space())?;
    Ok(bs1.apply(&entering)?)
}

/// Post-selected state (|L⟩|W⟩ + |R⟩|P⟩)/√2.
pub fn post_state(cfg: &ScenarioConfig) -> Result<StateVector> {
    let arm_sp = CompositeSpace::new(vec![arm_register()])?;
    let lw = tensor(
        &StateVector::basis_state(&arm_sp, &["L"])?,
        &wave_state(cfg.phi1),
    )?;
    let rp = tensor(
        &StateVector::basis_state(&arm_sp, &["R"])?,
        &particle_state(cfg.phi2),
    )?;
    let h = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    Ok(StateVector::superpose(&[(h, &lw), (h, &rp)])?)
}

/// The weak value ⟨post|A|pre⟩ / ⟨post|pre⟩.
pub fn weak_value(
    op: &LinearOperator,
    pre: &StateVector,
    post: &StateVector,
) -> Result<Complex64> {
    let overlap = post.inner(pre)?;
    if overlap.norm() <= 1e-12 {
        return Err(ScenarioError::VanishingOverlap {
            magnitude: overlap.norm(),
        });
    }
    let numerator = post.inner(&op.apply(pre)?)?;
    Ok(numerator / overlap)
}

/// Weak values for all eight projectors plus the complementarity sums.
#[derive(Debug, Clone)]
pub struct WeakValueReport {
    pub config: ScenarioConfig,
    pub values: Vec<(ProjectorLabel, Complex64)>,
    pub sum_all: Complex64,
    pub sum_rp_lw: Complex64,
    pub postselection_probability: f64,
    pub paper_scenario: bool,
}

impl WeakValueReport {
    pub fn value(&self, label: ProjectorLabel) -> Complex64 {
        self.values
            .iter()
            .find(|(l, _)| *l == label)
            .expect("all labels present")
            .1
    }
}

pub fn weak_value_report(cfg: &ScenarioConfig) -> Result<WeakValueReport> {
    let pre = pre_state(cfg)?;
    let post = post_state(cfg)?;
    let projectors = ProjectorSet::new(cfg.phi1, cfg.phi2)?;
    let mut values = Vec::with_capacity(8);
    let mut sum_all = Complex64::ZERO;
    for (label, proj) in projectors.iter() {
        let wv = weak_value(proj, &pre, &post)?;
        sum_all += wv;
        values.push((label, wv));
    }
    let sum_rp_lw = values
        .iter()
        .filter(|(l, _)| matches!(l, ProjectorLabel::RP | ProjectorLabel::LW))
        .map(|(_, v)| v)
        .sum();
    let postselection_probability = post.inner(&pre)?.norm_sqr();
    Ok(WeakValueReport {
        config: *cfg,
        values,
        sum_all,
        sum_rp_lw,
        postselection_probability,
        paper_scenario: cfg.is_paper_scenario(),
    })
}

/// The analyzer pipeline on arm ⊗ mode, in application order:
/// BS2 on the right arm's (2,4) mode pair, σ^1234 on the right arm,
/// BS3 on the arm register, then the wave router on the modes.
pub fn analyzer_circuit(cfg: &ScenarioConfig) -> Result<Vec<LinearOperator>> {
    let sp = arm_mode_space();
    let mode = mode_register();
    let ops = vec![
        bs_sym(&mode, "2", "4")?
            .operator()
            .controlled_embed("arm", "R", &["mode"], &sp)?,
        sigma1234()
            .operator()
            .controlled_embed("arm", "R", &["mode"], &sp)?,
        bs3().operator().embed(&["arm"], &sp)?,
        wave_router(cfg.phi1, cfg.phi2)
            .operator()
            .embed(&["mode"], &sp)?,
    ];
    Ok(ops)
}

/// Detector probabilities (or counts, when sampled).
///
/// Detector ports after the analyzer: D1 is the right-arm transmitted
/// wave port (mode 1), D2 aggregates the whole left arm, D3 the
/// remaining right-arm (reflected) ports.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorStats {
    pub p_d1: f64,
    pub p_d2: f64,
    pub p_d3: f64,
    /// 0 means analytic probabilities only.
    pub shots: u64,
    pub counts: Option<[u64; 3]>,
}

fn port_probabilities(state: &StateVector) -> Result<[f64; 3]> {
    let sp = state.space();
    let mut p = [0.0f64; 3];
    for (i, a) in state.amplitudes().iter().enumerate() {
        let labels = sp.labels_at(i);
        let (arm, mode) = (labels[0], labels[1]);
        let w = a.norm_sqr();
        match (arm, mode) {
            ("R", "1") => p[0] += w,
            ("L", _) => p[1] += w,
            ("R", _) => p[2] += w,
            _ => unreachable!("arm register has labels L and R"),
        }
    }
    Ok(p)
}

/// Pushes a normalized arm⊗mode state through the analyzer and returns
/// Born-rule detector probabilities.
pub fn detector_probabilities(state: &StateVector, cfg: &ScenarioConfig) -> Result<DetectorStats> {
    let norm = state.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(ScenarioError::Hilbert(HilbertError::NotNormalized { norm }));
    }
    let mut s = state.clone();
    for op in analyzer_circuit(cfg)? {
        s = op.apply(&s)?;
    }
    let p = port_probabilities(&s)?;
    Ok(DetectorStats {
        p_d1: p[0],
        p_d2: p[1],
        p_d3: p[2],
        shots: 0,
        counts: None,
    })
}

/// Multinomial sampling of the detector distribution with a deterministic
/// seeded generator.
pub fn sample_detectors(
    state: &StateVector,
    cfg: &ScenarioConfig,
    shots: u64,
    seed: u64,
) -> Result<DetectorStats> {
    if shots == 0 {
        return Err(ScenarioError::ZeroShots);
    }
    let analytic = detector_probabilities(state, cfg)?;
    let p = [analytic.p_d1, analytic.p_d2, analytic.p_d3];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = [0u64; 3];
    for _ in 0..shots {
        let u: f64 = rng.gen();
        let det = if u < p[0] {
            0
        } else if u < p[0] + p[1] {
            1
        } else {
            2
        };
        counts[det] += 1;
    }
    Ok(DetectorStats {
        p_d1: analytic.p_d1,
        p_d2: analytic.p_d2,
        p_d3: analytic.p_d3,
        shots,
        counts: Some(counts),
    })
}

/// Lifts a mode-register state onto arm ⊗ mode with a definite arm label.
pub fn with_arm(arm_label: &str, mode_state: &StateVector) -> Result<StateVector> {
    let arm_sp = CompositeSpace::new(vec![arm_register()])?;
    let arm = StateVector::basis_state(&arm_sp, &[arm_label])?;
    Ok(tensor(&arm, mode_state)?)
}
