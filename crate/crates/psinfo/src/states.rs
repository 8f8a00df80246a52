//! Oscillator wavefunctions in position and momentum space.
//!
//! Units are ℏ = m = ω = 1 throughout, for the Hamiltonian
//! H = p²/2 + x²/2 + (λ/4)x⁴. Unperturbed eigenstates are the familiar
//! Hermite–Gaussians u_n(t) = π^{−1/4}(2ⁿn!)^{−1/2}H_n(t)e^{−t²/2}; the
//! quartic term is treated to first order in perturbation theory, which
//! mixes u_n with u_{n±2} and u_{n±4} only.
//!
//! Two constructions of the perturbed state are provided and cross-validated
//! in the test suite: closed-form polynomial-times-Gaussian expressions for
//! the lowest two levels ([`aho_wavefunction`]) and a basis-coefficient
//! expansion valid for any level ([`perturbed_state_general`]). All
//! normalization constants are recomputed numerically by quadrature, and
//! global phases are discarded — every measure downstream depends only on
//! densities, so amplitudes here are real-valued.

use std::sync::Arc;

use num_complex::Complex64;

use crate::quadrature::{integrate_1d, GridSpec1D, SampledField1D};
use crate::{Error, Result};

/// Conjugate representation tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Space {
    Position,
    Momentum,
}

/// Quantum number and quartic coupling of an oscillator state.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OscillatorSpec {
    pub n: usize,
    pub lambda: f64,
}

impl OscillatorSpec {
    pub fn new(n: usize, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidCoupling(lambda));
        }
        Ok(Self { n, lambda })
    }

    /// First-order perturbation theory is trustworthy for small couplings;
    /// beyond this point results remain computable but should be read as the
    /// behavior of the truncated expansion, not of the true eigenstate.
    pub fn perturbative(&self) -> bool {
        self.lambda <= 0.5
    }
}

/// A normalized one-dimensional wavefunction: an evaluator valid at any
/// coordinate plus cached samples on a working grid.
///
/// Amplitudes are real (global phases are discarded at construction), so the
/// density at t is simply `evaluate(t)²`.
#[derive(Clone)]
pub struct Wavefunction {
    pub space: Space,
    evaluator: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    sampled: SampledField1D,
    norm: f64,
}

impl std::fmt::Debug for Wavefunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Wavefunction")
            .field("space", &self.space)
            .field("grid", self.sampled.grid())
            .field("norm", &self.norm)
            .finish()
    }
}

impl Wavefunction {
    /// Normalize a raw real-valued evaluator against the given grid: the L²
    /// norm is recomputed by quadrature and divided out.
    pub(crate) fn from_raw(
        space: Space,
        grid: &GridSpec1D,
        raw: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    ) -> Result<Self> {
        let raw_density = SampledField1D::from_fn(grid.clone(), |t| raw(t) * raw(t))?;
        let norm_sq = integrate_1d(&raw_density);
        if !(norm_sq.is_finite() && norm_sq > 0.0) {
            return Err(Error::NotNormalized(norm_sq));
        }
        let norm = norm_sq.sqrt();
        let values = grid.coords().iter().map(|&t| raw(t) / norm).collect();
        let sampled = SampledField1D::new(grid.clone(), values)?;
        let evaluator: Arc<dyn Fn(f64) -> f64 + Send + Sync> =
            Arc::new(move |t| raw(t) / norm);
        Ok(Self {
            space,
            evaluator,
            sampled,
            norm,
        })
    }

    /// Normalized amplitude at an arbitrary coordinate.
    pub fn evaluate(&self, t: f64) -> f64 {
        (self.evaluator)(t)
    }

    /// Cached normalized samples on the working grid.
    pub fn sampled(&self) -> &SampledField1D {
        &self.sampled
    }

    pub fn grid(&self) -> &GridSpec1D {
        self.sampled.grid()
    }

    /// The numerically recomputed L² norm of the raw (pre-normalization)
    /// form.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// |ψ|² sampled on the working grid; integrates to 1 by construction.
    pub fn density(&self) -> SampledField1D {
        let values = self.sampled.values().iter().map(|&v| v * v).collect();
        SampledField1D::new(self.sampled.grid().clone(), values)
            .expect("density inherits a validated grid")
    }
}

/// Physicists' Hermite polynomial H_n(x) by the three-term recurrence
/// H_{n+1} = 2x·H_n − 2n·H_{n−1}.
pub fn hermite(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        (prev, cur) = (cur, 2.0 * x * cur - 2.0 * k as f64 * prev);
    }
    cur
}

/// Normalized oscillator function u_n(t) = π^{−1/4}(2ⁿn!)^{−1/2}H_n(t)e^{−t²/2},
/// evaluated with the normalized recurrence
/// u_{k+1} = t·√(2/(k+1))·u_k − √(k/(k+1))·u_{k−1}
/// so intermediate values stay O(1) for any level.
pub(crate) fn oscillator_fn(n: usize, t: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-t * t / 2.0).exp();
    for k in 0..n {
        let k = k as f64;
        (prev, cur) = (
            cur,
            t * (2.0 / (k + 1.0)).sqrt() * cur - (k / (k + 1.0)).sqrt() * prev,
        );
    }
    cur
}

/// Harmonic-oscillator eigenstate u_n in either representation (the two
/// share the same real functional form once global phases are dropped).
pub fn ho_eigenstate(n: usize, space: Space, grid: &GridSpec1D) -> Result<Wavefunction> {
    Wavefunction::from_raw(space, grid, Arc::new(move |t| oscillator_fn(n, t)))
}

/// First-order mixing coefficients of the quartic perturbation (λ/4)x⁴ on
/// level n: support {n−4, n−2, n, n+2, n+4} ∩ ℤ≥0, unit Euclidean norm.
///
/// Matrix elements of x⁴ between oscillator levels (ladder-operator algebra):
/// ⟨n+2|x⁴|n⟩ = (2n+3)/2·√((n+1)(n+2)),   ⟨n+4|x⁴|n⟩ = ¼√((n+1)(n+2)(n+3)(n+4)),
/// and mirrored forms for the lower levels. In momentum space the same
/// magnitudes apply with the sign of the ±2 couplings flipped (x → p maps
/// each basis function to itself times a quarter-cycle phase per level, and
/// the global phase is discarded).
#[derive(Debug, Clone)]
pub struct BasisExpansion {
    /// coefficient for level m at index m; zero outside the support
    coefficients: Vec<f64>,
}

impl BasisExpansion {
    pub fn coefficient(&self, m: usize) -> f64 {
        self.coefficients.get(m).copied().unwrap_or(0.0)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Σ_m c_m·u_m(t).
    fn evaluate(&self, t: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(m, &c)| c * oscillator_fn(m, t))
            .sum()
    }
}

/// First-order coefficients for the given spec and representation.
pub fn first_order_expansion(spec: &OscillatorSpec, space: Space) -> BasisExpansion {
    let n = spec.n;
    let g = spec.lambda / 4.0; // coupling of the x⁴ term itself
    let nf = n as f64;
    let mut coefficients = vec![0.0; n + 5];
    coefficients[n] = 1.0;

    // (level, ⟨level|x⁴|n⟩, energy denominator n − level)
    let mut push = |m: i64, elem: f64| {
        if m >= 0 {
            coefficients[m as usize] = g * elem / (nf - m as f64);
        }
    };
    push(
        n as i64 + 2,
        (2.0 * nf + 3.0) / 2.0 * ((nf + 1.0) * (nf + 2.0)).sqrt(),
    );
    push(
        n as i64 + 4,
        0.25 * ((nf + 1.0) * (nf + 2.0) * (nf + 3.0) * (nf + 4.0)).sqrt(),
    );
    push(
        n as i64 - 2,
        (2.0 * nf - 1.0) / 2.0 * (nf * (nf - 1.0)).sqrt(),
    );
    push(
        n as i64 - 4,
        0.25 * (nf * (nf - 1.0) * (nf - 2.0) * (nf - 3.0)).sqrt(),
    );

    if space == Space::Momentum {
        // flip the ±2 neighbors (odd quarter-cycle offset), keep ±4
        for (m, c) in coefficients.iter_mut().enumerate() {
            let offset = (m as i64 - n as i64).unsigned_abs();
            if offset % 4 == 2 {
                *c = -*c;
            }
        }
    }

    let norm: f64 = coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
    for c in &mut coefficients {
        *c /= norm;
    }
    BasisExpansion { coefficients }
}

/// First-order perturbed state for any level n, built from
/// [`first_order_expansion`] summed against oscillator basis functions.
pub fn perturbed_state_general(
    spec: &OscillatorSpec,
    space: Space,
    grid: &GridSpec1D,
) -> Result<Wavefunction> {
    let expansion = first_order_expansion(spec, space);
    Wavefunction::from_raw(space, grid, Arc::new(move |t| expansion.evaluate(t)))
}

/// Closed-form first-order states for the lowest two levels:
/// polynomial-times-Gaussian expressions with the polynomial coefficients
/// written out explicitly. Normalization constants are recomputed
/// numerically (the closed-form constants add nothing but rounding noise),
/// and global phases are discarded.
///
/// Levels beyond n = 1 have no closed form here; use
/// [`perturbed_state_general`], which agrees with these expressions to
/// machine precision on the shared domain.
pub fn aho_wavefunction(
    spec: &OscillatorSpec,
    space: Space,
    grid: &GridSpec1D,
) -> Result<Wavefunction> {
    let lam = spec.lambda;
    let raw: Arc<dyn Fn(f64) -> f64 + Send + Sync> = match (spec.n, space) {
        (0, Space::Position) => Arc::new(move |x| {
            let poly = 1.0
                - lam / 16.0 * (0.25 * (4.0 * x.powi(4) - 12.0 * x * x + 3.0)
                    + 3.0 * (2.0 * x * x - 1.0));
            poly * (-x * x / 2.0).exp()
        }),
        (0, Space::Momentum) => Arc::new(move |p| {
            let poly = 16.0 - lam / 4.0 * (4.0 * p.powi(4) - 36.0 * p * p + 15.0);
            poly * (-p * p / 2.0).exp()
        }),
        (1, Space::Position) => Arc::new(move |x| {
            let poly = 1.0
                - lam / 32.0
                    * (10.0 * (2.0 * x * x - 3.0)
                        + 0.5 * (4.0 * x.powi(4) - 20.0 * x * x + 15.0));
            poly * x * (-x * x / 2.0).exp()
        }),
        (1, Space::Momentum) => Arc::new(move |p| {
            let poly = 4.0 * lam * p.powi(4) - 60.0 * lam * p * p + 75.0 * lam - 64.0;
            poly * p * (-p * p / 2.0).exp()
        }),
        (n, _) => return Err(Error::UnsupportedLevel(n)),
    };
    Wavefunction::from_raw(space, grid, raw)
}

/// Conjugate-representation transform by direct quadrature on the input's
/// working grid: φ(p) = (2π)^{−1/2}∫ψ(x)e^{∓ipx}dx, the exponent sign
/// following the input space so that transforming twice round-trips.
///
/// The output's global phase is discarded (rotated so the largest sample is
/// real and positive) and the result renormalized.
pub fn fourier_transform(psi: &Wavefunction) -> Result<Wavefunction> {
    let grid = psi.grid().clone();
    let coords = grid.coords();
    let weights = grid.weights();
    let samples: Vec<f64> = psi.sampled().values().to_vec();
    let sign = match psi.space {
        Space::Position => -1.0,
        Space::Momentum => 1.0,
    };
    let out_space = match psi.space {
        Space::Position => Space::Momentum,
        Space::Momentum => Space::Position,
    };

    let transform_at = {
        let coords = coords.clone();
        let weights = weights.clone();
        move |k: f64| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for ((&x, &w), &s) in coords.iter().zip(&weights).zip(&samples) {
                acc += w * s * Complex64::from_polar(1.0, sign * k * x);
            }
            acc / (2.0 * std::f64::consts::PI).sqrt()
        }
    };

    // global phase from the largest-magnitude sample
    let complex_samples: Vec<Complex64> = coords.iter().map(|&k| transform_at(k)).collect();
    let peak = complex_samples
        .iter()
        .cloned()
        .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = peak / peak.norm();

    let raw: Arc<dyn Fn(f64) -> f64 + Send + Sync> =
        Arc::new(move |k| (transform_at(k) * phase.conj()).re);
    Wavefunction::from_raw(out_space, &grid, raw)
}
