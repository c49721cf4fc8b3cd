//! Von-Neumann weak-measurement engine with a discretized Gaussian pointer.
//!
//! The interaction exp(−i g A ⊗ p̂) for a projector A translates the
//! pointer by g on the A = 1 eigenspace and leaves it fixed on the A = 0
//! eigenspace. After post-selecting the system, the weak value is read off
//! the conditional pointer: real part from the position shift, imaginary
//! part from the momentum shift. This route never evaluates the analytic
//! weak-value quotient, so it serves as an independent oracle for it.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)] // needed for f64 math under no_std
use num_traits::Float;

use crate::hilbert::{
    tensor, CompositeSpace, HilbertError, LinearOperator, Register, StateVector,
};
use crate::scenario::{post_state, pre_state, ScenarioConfig, ScenarioError};

#[derive(Debug, Clone, PartialEq)]
pub enum PointerError {
    /// Grid violates its construction constraints.
    InvalidGrid { reason: &'static str },
    /// The coupled observable must be a projector.
    NotProjector { deviation: f64 },
    /// Coupling strength would push the shifted pointer off the grid.
    CouplingTooLarge { g: f64, extent: f64 },
    /// The conditional pointer state has vanishing norm.
    PostSelectionFailed { conditional_norm: f64 },
    Hilbert(HilbertError),
    Scenario(ScenarioError),
}

impl fmt::Display for PointerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointerError::InvalidGrid { reason } => write!(f, "invalid pointer grid: {reason}"),
            PointerError::NotProjector { deviation } => {
                write!(f, "observable is not a projector (deviation {deviation:e})")
            }
            PointerError::CouplingTooLarge { g, extent } => {
                write!(f, "coupling g = {g} exceeds extent/2 = {}", extent / 2.0)
            }
            PointerError::PostSelectionFailed { conditional_norm } => {
                write!(f, "post-selection failed (conditional norm {conditional_norm:e})")
            }
            PointerError::Hilbert(e) => write!(f, "{e}"),
            PointerError::Scenario(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PointerError {}

impl From<HilbertError> for PointerError {
    fn from(e: HilbertError) -> Self {
        PointerError::Hilbert(e)
    }
}

impl From<ScenarioError> for PointerError {
    fn from(e: ScenarioError) -> Self {
        PointerError::Scenario(e)
    }
}

pub type Result<T> = core::result::Result<T, PointerError>;

/// Uniform position grid over [−extent, extent] carrying a Gaussian of
/// width σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerGrid {
    n_points: usize,
    extent: f64,
    sigma: f64,
}

impl PointerGrid {
    /// Defaults keeping discretization and weak-coupling bias each below
    /// 1e−3: σ = 1, extent = 8, 801 points.
    pub fn default_grid() -> Self {
        PointerGrid {
            n_points: 801,
            extent: 8.0,
            sigma: 1.0,
        }
    }

    pub fn new(n_points: usize, extent: f64, sigma: f64) -> Result<Self> {
        if n_points < 3 {
            return Err(PointerError::InvalidGrid {
                reason: "need at least 3 grid points",
            });
        }
        if sigma <= 0.0 || sigma.is_nan() || !extent.is_finite() {
            return Err(PointerError::InvalidGrid {
                reason: "sigma must be positive and extent finite",
            });
        }
        if extent < 6.0 * sigma {
            // keeps the truncated tail probability below 1e-8
            return Err(PointerError::InvalidGrid {
                reason: "extent must be at least 6 sigma",
            });
        }
        Ok(PointerGrid {
            n_points,
            extent,
            sigma,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / (self.n_points as f64 - 1.0)
    }

    pub fn position(&self, i: usize) -> f64 {
        -self.extent + i as f64 * self.spacing()
    }

    pub fn register(&self) -> Register {
        Register::numeric("ptr", self.n_points)
    }

    pub fn space(&self) -> CompositeSpace {
        CompositeSpace::new(vec![self.register()]).expect("single register")
    }

    /// Centered angular momentum-grid value for DFT bin `j`.
    fn momentum(&self, j: usize) -> f64 {
        let n = self.n_points as f64;
        let f = if j < self.n_points.div_ceil(2) {
            j as f64
        } else {
            j as f64 - n
        };
        2.0 * core::f64::consts::PI * f / (n * self.spacing())
    }
}

/// Coupling strength and the projector it multiplies in exp(−i g A ⊗ p̂).
#[derive(Debug, Clone)]
pub struct CouplingParams {
    pub g: f64,
    pub observable: LinearOperator,
}

impl CouplingParams {
    /// The weak regime used for readout: g at most σ/50.
    pub fn is_weak_regime(&self, grid: &PointerGrid) -> bool {
        self.g.abs() <= grid.sigma() / 50.0
    }
}

/// Normalized Gaussian amplitudes ∝ exp(−x²/(4σ²)) on the grid.
pub fn gaussian_pointer(grid: &PointerGrid) -> StateVector {
    let s2 = grid.sigma() * grid.sigma();
    let mut amps: Vec<Complex64> = (0..grid.n_points())
        .map(|i| {
            let x = grid.position(i);
            Complex64::new((-x * x / (4.0 * s2)).exp(), 0.0)
        })
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_amplitudes(grid.space(), amps).expect("grid-sized vector")
}

/// Naive DFT via a shared twiddle table; n ≤ ~1000 keeps this cheap.
fn dft(amps: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let n = amps.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    let table: Vec<Complex64> = (0..n)
        .map(|m| Complex64::from_polar(1.0, sign * 2.0 * core::f64::consts::PI * m as f64 / n as f64))
        .collect();
    let mut out = vec![Complex64::ZERO; n];
    for (j, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::ZERO;
        for (k, a) in amps.iter().enumerate() {
            acc += a * table[(j * k) % n];
        }
        if inverse {
            acc /= n as f64;
        }
        *o = acc;
    }
    out
}

/// Translates grid amplitudes by `shift` via the diagonal phase in the
/// discrete momentum representation; exact for non-grid-multiple shifts
/// up to tail truncation.
pub fn translate(grid: &PointerGrid, amps: &[Complex64], shift: f64) -> Vec<Complex64> {
    let mut freq = dft(amps, false);
    for (j, f) in freq.iter_mut().enumerate() {
        *f *= Complex64::from_polar(1.0, -grid.momentum(j) * shift);
    }
    dft(&freq, true)
}

/// ⟨x⟩ of a (not necessarily normalized) grid state.
pub fn mean_position(grid: &PointerGrid, amps: &[Complex64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, a) in amps.iter().enumerate() {
        let w = a.norm_sqr();
        num += grid.position(i) * w;
        den += w;
    }
    num / den
}

/// ⟨p⟩ via the discrete momentum representation.
pub fn mean_momentum(grid: &PointerGrid, amps: &[Complex64]) -> f64 {
    let freq = dft(amps, false);
    let mut num = 0.0;
    let mut den = 0.0;
    for (j, f) in freq.iter().enumerate() {
        let w = f.norm_sqr();
        num += grid.momentum(j) * w;
        den += w;
    }
    num / den
}

/// Couples a system state to a pointer state:
/// joint = (I−A)ψ ⊗ ψ_ptr + Aψ ⊗ T_g ψ_ptr.
pub fn weak_couple(
    system: &StateVector,
    pointer: &StateVector,
    grid: &PointerGrid,
    params: &CouplingParams,
) -> Result<StateVector> {
    let deviation = params.observable.matrix().deviation_from_projector();
    if deviation > 1e-10 {
        return Err(PointerError::NotProjector { deviation });
    }
    if params.g.abs() > grid.extent() / 2.0 {
        return Err(PointerError::CouplingTooLarge {
            g: params.g,
            extent: grid.extent(),
        });
    }
    let projected = params.observable.apply(system)?;
    let rest = StateVector::superpose(&[
        (Complex64::ONE, system),
        (-Complex64::ONE, &projected),
    ])?;
    let shifted = StateVector::from_amplitudes(
        grid.space(),
        translate(grid, pointer.amplitudes(), params.g),
    )?;
    let unshifted_part = tensor(&rest, pointer)?;
    let shifted_part = tensor(&projected, &shifted)?;
    Ok(StateVector::superpose(&[
        (Complex64::ONE, &unshifted_part),
        (Complex64::ONE, &shifted_part),
    ])?)
}

/// Projects the system factor of a joint state onto `post` and returns the
/// renormalized conditional pointer state and the post-selection
/// probability.
pub fn post_select_pointer(
    joint: &StateVector,
    post: &StateVector,
    grid: &PointerGrid,
) -> Result<(StateVector, f64)> {
    let n = grid.n_points();
    let sys_dim = post.space().dimension();
    if joint.space().dimension() != sys_dim * n {
        return Err(PointerError::Hilbert(HilbertError::DimensionMismatch {
            expected: sys_dim * n,
            got: joint.space().dimension(),
        }));
    }
    // pointer register is last, so it is the fastest-varying index
    let mut cond = vec![Complex64::ZERO; n];
    for (s, b) in post.amplitudes().iter().enumerate() {
        let coeff = b.conj();
        let block = &joint.amplitudes()[s * n..(s + 1) * n];
        for (c, a) in cond.iter_mut().zip(block) {
            *c += coeff * a;
        }
    }
    let prob = cond.iter().map(|a| a.norm_sqr()).sum::<f64>();
    let norm = prob.sqrt();
    if norm < 1e-12 {
        return Err(PointerError::PostSelectionFailed {
            conditional_norm: norm,
        });
    }
    for c in &mut cond {
        *c /= norm;
    }
    Ok((
        StateVector::from_amplitudes(grid.space(), cond)?,
        prob,
    ))
}

/// Recovers a weak value operationally: prepare the pre-selected state,
/// weakly couple `projector` to a fresh Gaussian pointer, post-select,
/// then read Re from ⟨x⟩/g and Im from 2σ²⟨p⟩/g.
pub fn estimate_weak_value(
    cfg: &ScenarioConfig,
    projector: &LinearOperator,
    grid: &PointerGrid,
    g: f64,
) -> Result<Complex64> {
    let pre = pre_state(cfg)?;
    let post = post_state(cfg)?;
    let pointer = gaussian_pointer(grid);
    let params = CouplingParams {
        g,
        observable: projector.clone(),
    };
    let joint = weak_couple(&pre, &pointer, grid, &params)?;
    let (cond, _prob) = post_select_pointer(&joint, &post, grid)?;
    let re = mean_position(grid, cond.amplitudes()) / g;
    let im = 2.0 * grid.sigma() * grid.sigma() * mean_momentum(grid, cond.amplitudes()) / g;
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::arm_mode_space;

    fn small_grid() -> PointerGrid {
        PointerGrid::new(401, 8.0, 1.0).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(PointerGrid::new(2, 8.0, 1.0).is_err());
        assert!(PointerGrid::new(401, 5.0, 1.0).is_err());
        assert!(PointerGrid::new(401, 8.0, -1.0).is_err());
        let g = small_grid();
        assert!((g.spacing() - 16.0 / 400.0).abs() <= 1e-15);
    }

    #[test]
    fn gaussian_moments() {
        let grid = small_grid();
        let p = gaussian_pointer(&grid);
        assert!(p.is_normalized(1e-12));
        assert!(mean_position(&grid, p.amplitudes()).abs() <= 1e-10);
        // variance within 1% of σ² (discrete-sum oracle vs Gaussian moments)
        let var: f64 = p
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(i, a)| grid.position(i).powi(2) * a.norm_sqr())
            .sum();
        assert!((var - 1.0).abs() <= 0.01);
        assert!(mean_momentum(&grid, p.amplitudes()).abs() <= 1e-10);
    }

    #[test]
    fn spectral_translation_shifts_mean() {
        let grid = small_grid();
        let p = gaussian_pointer(&grid);
        for shift in [0.013, -0.4, grid.spacing() * 3.0] {
            let t = translate(&grid, p.amplitudes(), shift);
            let norm: f64 = t.iter().map(|a| a.norm_sqr()).sum();
            assert!((norm - 1.0).abs() <= 1e-10);
            assert!((mean_position(&grid, &t) - shift).abs() <= 1e-9);
        }
    }

    #[test]
    fn identity_coupling_translates_whole_pointer() {
        let grid = small_grid();
        let cfg = ScenarioConfig::new(0.6, 1.0, 1.0);
        let pre = pre_state(&cfg).unwrap();
        let pointer = gaussian_pointer(&grid);
        let g = 0.25;
        let params = CouplingParams {
            g,
            observable: LinearOperator::identity(arm_mode_space()),
        };
        let joint = weak_couple(&pre, &pointer, &grid, &params).unwrap();
        assert!((joint.norm() - 1.0).abs() <= 1e-10);
        let post = post_state(&cfg).unwrap();
        let (cond, prob) = post_select_pointer(&joint, &post, &grid).unwrap();
        assert!((prob - cfg.analytic_overlap().powi(2)).abs() <= 1e-10);
        assert!((mean_position(&grid, cond.amplitudes()) - g).abs() <= 1e-9);
    }

    #[test]
    fn identity_estimate_is_exactly_one() {
        let grid = small_grid();
        for alpha in [0.3, core::f64::consts::FRAC_PI_4, 1.2] {
            let cfg = ScenarioConfig::new(alpha, 1.0, 1.0);
            let est = estimate_weak_value(
                &cfg,
                &LinearOperator::identity(arm_mode_space()),
                &grid,
                0.01,
            )
            .unwrap();
            assert!((est - Complex64::ONE).norm() <= 1e-10, "alpha = {alpha}");
        }
    }

    #[test]
    fn zero_coupling_leaves_pointer_unchanged() {
        let grid = small_grid();
        let cfg = ScenarioConfig::new(0.8, 0.9, 0.9);
        let pre = pre_state(&cfg).unwrap();
        let post = post_state(&cfg).unwrap();
        let pointer = gaussian_pointer(&grid);
        let set = crate::scenario::ProjectorSet::new(cfg.phi1, cfg.phi2).unwrap();
        let params = CouplingParams {
            g: 0.0,
            observable: set.get(crate::scenario::ProjectorLabel::RP).clone(),
        };
        let joint = weak_couple(&pre, &pointer, &grid, &params).unwrap();
        let (cond, prob) = post_select_pointer(&joint, &post, &grid).unwrap();
        assert!((prob - cfg.analytic_overlap().powi(2)).abs() <= 1e-10);
        assert!(cond.max_amplitude_diff(&pointer).unwrap() <= 1e-10);
    }

    #[test]
    fn rejects_non_projector_and_oversized_coupling() {
        let grid = small_grid();
        let cfg = ScenarioConfig::new(0.5, 0.5, 0.5);
        let pre = pre_state(&cfg).unwrap();
        let pointer = gaussian_pointer(&grid);
        let sp = arm_mode_space();
        // a unitary that is not a projector
        let bad = crate::optics::sigma1234()
            .operator()
            .embed(&["mode"], &sp)
            .unwrap();
        let params = CouplingParams {
            g: 0.01,
            observable: bad,
        };
        assert!(matches!(
            weak_couple(&pre, &pointer, &grid, &params),
            Err(PointerError::NotProjector { .. })
        ));
        let params = CouplingParams {
            g: 5.0,
            observable: LinearOperator::identity(sp),
        };
        assert!(matches!(
            weak_couple(&pre, &pointer, &grid, &params),
            Err(PointerError::CouplingTooLarge { .. })
        ));
    }
}
