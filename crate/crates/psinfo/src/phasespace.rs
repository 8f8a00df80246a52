//! Wigner and Husimi phase-space distributions.
//!
//! The Wigner transform of a real wavefunction,
//! W(x,p) = (1/π)∫dy ψ(x−y)ψ(x+y)e^{−2ipy},
//! is evaluated on a product grid by reusing the x axis as the offset (y)
//! axis. Both shifted arguments x_i ± y_j then land on a single fine lattice
//! with the same spacing, so ψ is evaluated only 2N−1 times per shift
//! direction and the transform reduces to one dense matrix product between
//! the shifted-product matrix and a cosine kernel carrying the quadrature
//! weights. The sine (imaginary) part is accumulated in the same pass purely
//! as a diagnostic: for real inputs it must vanish, and a residue above
//! 1e−8 aborts rather than silently returning a complex field.
//!
//! The Husimi distribution is the Gaussian smoothing
//! H(x,p) = (1/π)∫∫dx′dp′ W(x′,p′)e^{−(x−x′)²/2}e^{−2s²(p−p′)²},
//! computed as two separable 1D convolution passes (O(N³) instead of the
//! naive O(N⁴)). The x kernel keeps unit width while the p kernel narrows
//! with s; for s ≠ 1 the 1/π prefactor no longer normalizes exactly, so the
//! result is always renormalized numerically, which also absorbs kernel
//! truncation at the grid edge (~1e−6 for high-lying states).
//!
//! Marginals integrate one axis out and are deliberately *not* renormalized:
//! downstream joint-vs-marginal comparisons (mutual information) rely on the
//! marginals being exactly the quadrature reductions of the joint field.

use std::f64::consts::PI;

use crate::quadrature::{integrate_1d, integrate_2d, simpson_fold, GridSpec2D, SampledField1D, SampledField2D};
use crate::states::{Space, Wavefunction};
use crate::{Error, Result};

/// Which distribution a [`PhaseSpaceField`] holds. The distinction matters
/// downstream: Wigner fields may be negative (complex-valued entropies),
/// Husimi fields are nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum FieldKind {
    Wigner,
    Husimi,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Wigner => "wigner",
            FieldKind::Husimi => "husimi",
        }
    }
}

/// A normalized distribution over the (x, p) plane.
#[derive(Debug, Clone)]
pub struct PhaseSpaceField {
    kind: FieldKind,
    field: SampledField2D,
}

impl PhaseSpaceField {
    /// Wrap a sampled field, enforcing unit normalization (within 1e−6) and,
    /// for Husimi fields, nonnegativity (values below −1e−8 are rejected).
    pub fn new(kind: FieldKind, field: SampledField2D) -> Result<Self> {
        let total = integrate_2d(&field);
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::NotNormalized(total));
        }
        if kind == FieldKind::Husimi {
            let min = field.values().iter().cloned().fold(f64::INFINITY, f64::min);
            if min < -1e-8 {
                return Err(Error::NegativeDensity(min));
            }
        }
        Ok(Self { kind, field })
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn grid(&self) -> &GridSpec2D {
        self.field.grid()
    }

    pub fn sampled(&self) -> &SampledField2D {
        &self.field
    }

    pub fn at(&self, ix: usize, ip: usize) -> f64 {
        self.field.at(ix, ip)
    }

    pub fn min_value(&self) -> f64 {
        self.field.values().iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// The two single-variable densities obtained by integrating a phase-space
/// field over the conjugate axis.
#[derive(Debug, Clone)]
pub struct MarginalPair {
    pub rho_x: SampledField1D,
    pub rho_p: SampledField1D,
}

/// Wigner transform of a normalized position-space wavefunction.
///
/// The offset integral reuses the x axis of `grid` as the y axis, so the
/// window must be wide enough that ψ(x−y)ψ(x+y) has decayed at the edges —
/// the default ±8 window leaves Gaussian tails below e^{−32} for every state
/// this crate constructs. The raw field must come out normalized within
/// 1e−6 (a larger defect means the window clipped the state); the residual
/// dust is then renormalized away so downstream integrals see exactly 1.
pub fn wigner(psi: &Wavefunction, grid: &GridSpec2D) -> Result<PhaseSpaceField> {
    if psi.space != Space::Position {
        return Err(Error::WrongFieldKind {
            expected: "position-space wavefunction",
            got: "momentum-space wavefunction",
        });
    }
    let nx = grid.x.points();
    let np = grid.p.points();
    let h = grid.x.step();
    let xmin = grid.x.min();
    let xmax = grid.x.max();

    // Both shifted arguments live on fine lattices with the grid's spacing:
    //   x_i + y_j = 2·xmin + (i+j)h          → fine_plus[i+j]
    //   x_i − y_j = (xmin−xmax) + (i−j+N−1)h → fine_minus[i−j+N−1]
    let fine_plus: Vec<f64> = (0..2 * nx - 1)
        .map(|k| psi.evaluate(2.0 * xmin + k as f64 * h))
        .collect();
    let fine_minus: Vec<f64> = (0..2 * nx - 1)
        .map(|k| psi.evaluate((xmin - xmax) + k as f64 * h))
        .collect();

    // Row-major kernels over the p grid: cos for the field, sin for the
    // imaginary-residue diagnostic, both carrying the y quadrature weights.
    let ys = grid.x.coords();
    let wy = grid.x.weights();
    let ps = grid.p.coords();
    let mut ecos = vec![0.0f64; np * nx];
    let mut esin = vec![0.0f64; np * nx];
    for (k, &p) in ps.iter().enumerate() {
        for (j, (&y, &w)) in ys.iter().zip(&wy).enumerate() {
            let (s, c) = (2.0 * p * y).sin_cos();
            ecos[k * nx + j] = w * c;
            esin[k * nx + j] = w * s;
        }
    }

    let mut values = vec![0.0f64; nx * np];
    let mut g_row = vec![0.0f64; nx];
    let mut max_imag = 0.0f64;
    for i in 0..nx {
        for j in 0..nx {
            g_row[j] = fine_minus[i + nx - 1 - j] * fine_plus[i + j];
        }
        for k in 0..np {
            let ec = &ecos[k * nx..(k + 1) * nx];
            let es = &esin[k * nx..(k + 1) * nx];
            let mut re = 0.0;
            let mut im = 0.0;
            for j in 0..nx {
                re += g_row[j] * ec[j];
                im += g_row[j] * es[j];
            }
            values[i * np + k] = re / PI;
            max_imag = max_imag.max((im / PI).abs());
        }
    }
    if max_imag > 1e-8 {
        return Err(Error::ImaginaryResidue(max_imag));
    }

    let mut field = SampledField2D::new(grid.clone(), values)?;
    let total = integrate_2d(&field);
    if !total.is_finite() || (total - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized(total));
    }
    field = SampledField2D::new(
        grid.clone(),
        field.values().iter().map(|v| v / total).collect(),
    )?;
    PhaseSpaceField::new(FieldKind::Wigner, field)
}

/// Gaussian smoothing of a Wigner field into a Husimi field.
///
/// Separable kernels: unit-variance-style e^{−Δx²/2} along x and
/// e^{−2s²Δp²} along p (variance 1/(4s²)), applied as two 1D passes. The
/// output is renormalized numerically and must be nonnegative up to −1e−8.
pub fn husimi_from_wigner(w: &PhaseSpaceField, s: f64) -> Result<PhaseSpaceField> {
    if w.kind() != FieldKind::Wigner {
        return Err(Error::WrongFieldKind {
            expected: "wigner",
            got: w.kind().name(),
        });
    }
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::InvalidSmoothing(s));
    }
    let grid = w.grid().clone();
    let nx = grid.x.points();
    let np = grid.p.points();
    let xs = grid.x.coords();
    let wx = grid.x.weights();
    let ps = grid.p.coords();
    let wp = grid.p.weights();

    // kx[i'][i] = w_i·e^{−(x_i'−x_i)²/2}; kp[k'][k] = w_k·e^{−2s²(p_k'−p_k)²}
    let mut kx = vec![0.0f64; nx * nx];
    for (ir, &xo) in xs.iter().enumerate() {
        for (ic, (&xi, &w)) in xs.iter().zip(&wx).enumerate() {
            kx[ir * nx + ic] = w * (-(xo - xi) * (xo - xi) / 2.0).exp();
        }
    }
    let mut kp = vec![0.0f64; np * np];
    for (kr, &po) in ps.iter().enumerate() {
        for (kc, (&pi, &w)) in ps.iter().zip(&wp).enumerate() {
            kp[kr * np + kc] = w * (-2.0 * s * s * (po - pi) * (po - pi)).exp();
        }
    }

    // First pass along x (accumulate kernel-weighted rows), second along p
    // (row·kernel-row dot products).
    let wv = w.sampled().values();
    let mut t = vec![0.0f64; nx * np];
    for ir in 0..nx {
        let trow = &mut t[ir * np..(ir + 1) * np];
        for ic in 0..nx {
            let kv = kx[ir * nx + ic];
            if kv == 0.0 {
                continue;
            }
            let wrow = &wv[ic * np..(ic + 1) * np];
            for k in 0..np {
                trow[k] += kv * wrow[k];
            }
        }
    }
    let mut values = vec![0.0f64; nx * np];
    for ir in 0..nx {
        let trow = &t[ir * np..(ir + 1) * np];
        for kr in 0..np {
            let krow = &kp[kr * np..(kr + 1) * np];
            let mut acc = 0.0;
            for k in 0..np {
                acc += trow[k] * krow[k];
            }
            values[ir * np + kr] = acc / PI;
        }
    }

    let field = SampledField2D::new(grid.clone(), values)?;
    let total = integrate_2d(&field);
    if !total.is_finite() || total <= 0.0 {
        return Err(Error::NotNormalized(total));
    }
    let min = field.values().iter().cloned().fold(f64::INFINITY, f64::min) / total;
    if min < -1e-8 {
        return Err(Error::NegativeDensity(min));
    }
    let field = SampledField2D::new(
        grid.clone(),
        field.values().iter().map(|v| v / total).collect(),
    )?;
    PhaseSpaceField::new(FieldKind::Husimi, field)
}

/// Integrate out one axis at a time: ρ_x(x) = ∫dp field, ρ_p(p) = ∫dx field.
///
/// The marginals are returned exactly as reduced — no renormalization — and
/// each must integrate to 1 within 1e−5.
pub fn marginals(field: &PhaseSpaceField) -> Result<MarginalPair> {
    let grid = field.grid();
    let nx = grid.x.points();
    let np = grid.p.points();
    let hp = grid.p.step();
    let hx = grid.x.step();

    let rho_x_vals: Vec<f64> = (0..nx)
        .map(|i| simpson_fold(field.sampled().row(i), hp))
        .collect();
    let mut column = vec![0.0f64; nx];
    let rho_p_vals: Vec<f64> = (0..np)
        .map(|k| {
            for (i, c) in column.iter_mut().enumerate() {
                *c = field.at(i, k);
            }
            simpson_fold(&column, hx)
        })
        .collect();

    let rho_x = SampledField1D::new(grid.x.clone(), rho_x_vals)?;
    let rho_p = SampledField1D::new(grid.p.clone(), rho_p_vals)?;
    for m in [&rho_x, &rho_p] {
        let total = integrate_1d(m);
        if (total - 1.0).abs() > 1e-5 {
            return Err(Error::NotNormalized(total));
        }
    }
    Ok(MarginalPair { rho_x, rho_p })
}

/// Phase-space average ∫∫ symbol·W dxdp of a classical symbol against a
/// Wigner field. With unit-normalized fields no 2π prefactor appears: the
/// identity symbol must average to exactly 1.
pub fn expectation(symbol: &SampledField2D, w: &PhaseSpaceField) -> Result<f64> {
    if w.kind() != FieldKind::Wigner {
        return Err(Error::WrongFieldKind {
            expected: "wigner",
            got: w.kind().name(),
        });
    }
    if symbol.grid() != w.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = w.grid().clone();
    let product = SampledField2D::new(
        grid,
        symbol
            .values()
            .iter()
            .zip(w.sampled().values())
            .map(|(s, v)| s * v)
            .collect(),
    )?;
    Ok(integrate_2d(&product))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GridSpec1D;
    use crate::states::{
        aho_wavefunction, fourier_transform, perturbed_state_general, OscillatorSpec,
    };
    use std::sync::Arc;

    fn default_grid() -> GridSpec2D {
        GridSpec2D::default_working()
    }

    fn state(n: usize, lambda: f64) -> Wavefunction {
        let spec = OscillatorSpec::new(n, lambda).unwrap();
        perturbed_state_general(&spec, Space::Position, &GridSpec1D::default_working()).unwrap()
    }

    /// index of coordinate 0 on the default axis (odd count, symmetric window)
    fn origin(grid: &GridSpec1D) -> usize {
        (grid.points() - 1) / 2
    }

    #[test]
    fn ground_state_wigner_is_the_symmetric_gaussian() {
        let grid = default_grid();
        let w = wigner(&state(0, 0.0), &grid).unwrap();
        let i0 = origin(&grid.x);
        assert!((w.at(i0, i0) - 1.0 / PI).abs() < 1e-8);
        let xs = grid.x.coords();
        let ps = grid.p.coords();
        for (i, k) in [(200, 300), (256, 310), (280, 280), (100, 256)] {
            let expect = (1.0 / PI) * (-xs[i] * xs[i] - ps[k] * ps[k]).exp();
            assert!(
                (w.at(i, k) - expect).abs() < 1e-8,
                "W({}, {}) = {} vs {}",
                xs[i],
                ps[k],
                w.at(i, k),
                expect
            );
        }
    }

    /// Independent oracle for a single point: at fixed (x, p) the transform
    /// is a plain 1D cosine integral, evaluated here with the generic
    /// quadrature engine instead of the offset-lattice fast path.
    fn wigner_point_oracle(psi: &Wavefunction, x: f64, p: f64) -> f64 {
        let f = SampledField1D::from_fn(GridSpec1D::default_working(), |y| {
            psi.evaluate(x - y) * psi.evaluate(x + y) * (2.0 * p * y).cos()
        })
        .unwrap();
        integrate_1d(&f) / PI
    }

    #[test]
    fn first_excited_wigner_is_negative_at_the_origin() {
        let grid = default_grid();
        let psi = state(1, 0.0);
        let w = wigner(&psi, &grid).unwrap();
        let i0 = origin(&grid.x);
        assert!((w.at(i0, i0) + 1.0 / PI).abs() < 1e-6);
        assert!((w.at(i0, i0) - wigner_point_oracle(&psi, 0.0, 0.0)).abs() < 1e-9);
    }

    #[test]
    fn fast_path_matches_pointwise_oracle_off_origin() {
        let grid = default_grid();
        let psi = state(1, 0.2);
        let w = wigner(&psi, &grid).unwrap();
        let xs = grid.x.coords();
        let ps = grid.p.coords();
        for (i, k) in [(256, 256), (272, 300), (230, 240), (310, 210)] {
            let oracle = wigner_point_oracle(&psi, xs[i], ps[k]);
            assert!(
                (w.at(i, k) - oracle).abs() < 1e-9,
                "W({}, {}) = {} vs oracle {}",
                xs[i],
                ps[k],
                w.at(i, k),
                oracle
            );
        }
    }

    #[test]
    fn wigner_fields_are_normalized() {
        for (n, lambda) in [(0, 0.0), (1, 0.3), (5, 0.1)] {
            let w = wigner(&state(n, lambda), &default_grid()).unwrap();
            assert!((integrate_2d(w.sampled()) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn purity_is_one_over_two_pi_for_pure_states() {
        for (n, lambda) in [(0usize, 0.0), (1, 0.1), (0, 0.3), (2, 0.1), (5, 0.05)] {
            let w = wigner(&state(n, lambda), &default_grid()).unwrap();
            let sq = SampledField2D::new(
                w.grid().clone(),
                w.sampled().values().iter().map(|v| v * v).collect(),
            )
            .unwrap();
            let purity = integrate_2d(&sq);
            assert!(
                (purity - 1.0 / (2.0 * PI)).abs() < 1e-5,
                "n={n} lambda={lambda}: purity {purity}"
            );
        }
    }

    #[test]
    fn even_state_field_has_point_symmetry() {
        let grid = default_grid();
        let w = wigner(&state(0, 0.1), &grid).unwrap();
        let n = grid.x.points();
        for (i, k) in [(0, 0), (100, 388), (200, 50), (256, 400), (313, 313)] {
            assert!((w.at(i, k) - w.at(n - 1 - i, n - 1 - k)).abs() < 1e-10);
        }
    }

    #[test]
    fn wigner_rejects_momentum_space_input() {
        let spec = OscillatorSpec::new(0, 0.1).unwrap();
        let phi =
            aho_wavefunction(&spec, Space::Momentum, &GridSpec1D::default_working()).unwrap();
        assert!(matches!(
            wigner(&phi, &default_grid()),
            Err(Error::WrongFieldKind { .. })
        ));
    }

    #[test]
    fn wigner_marginals_reproduce_both_densities() {
        let grid = default_grid();
        let spec = OscillatorSpec::new(0, 0.1).unwrap();
        let psi =
            aho_wavefunction(&spec, Space::Position, &GridSpec1D::default_working()).unwrap();
        let w = wigner(&psi, &grid).unwrap();
        let m = marginals(&w).unwrap();

        let dens = psi.density();
        let worst_x = m
            .rho_x
            .values()
            .iter()
            .zip(dens.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(worst_x < 1e-6, "worst x-marginal gap {worst_x:.3e}");

        let phi = fourier_transform(&psi).unwrap();
        let pdens = phi.density();
        let worst_p = m
            .rho_p
            .values()
            .iter()
            .zip(pdens.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(worst_p < 1e-6, "worst p-marginal gap {worst_p:.3e}");
    }

    #[test]
    fn marginal_point_values_match_closed_forms() {
        let grid = default_grid();
        let i0 = origin(&grid.x);

        let w0 = wigner(&state(0, 0.0), &grid).unwrap();
        let m0 = marginals(&w0).unwrap();
        assert!((m0.rho_x.values()[i0] - 1.0 / PI.sqrt()).abs() < 1e-8);

        let w1 = wigner(&state(1, 0.0), &grid).unwrap();
        let m1 = marginals(&w1).unwrap();
        assert!(m1.rho_x.values()[i0].abs() < 1e-8);

        let h0 = husimi_from_wigner(&w0, 1.0).unwrap();
        let mh = marginals(&h0).unwrap();
        assert!((mh.rho_x.values()[i0] - 1.0 / (3.0 * PI).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn ground_state_husimi_peak_value() {
        let w = wigner(&state(0, 0.0), &default_grid()).unwrap();
        let h = husimi_from_wigner(&w, 1.0).unwrap();
        let i0 = origin(&h.grid().x);
        let expect = 2.0f64.sqrt() / (3.0 * PI);
        assert!((h.at(i0, i0) - expect).abs() < 1e-6);
        assert!((integrate_2d(h.sampled()) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn husimi_is_nonnegative_even_where_wigner_is_not() {
        let w = wigner(&state(5, 0.1), &default_grid()).unwrap();
        assert!(w.min_value() < -1e-3, "n=5 Wigner should dip negative");
        let h = husimi_from_wigner(&w, 1.0).unwrap();
        assert!(h.min_value() >= -1e-10, "min H = {:.3e}", h.min_value());
    }

    fn marginal_variance(m: &SampledField1D) -> f64 {
        let grid = m.grid().clone();
        let coords = grid.coords();
        let mean = integrate_1d(
            &SampledField1D::new(
                grid.clone(),
                m.values()
                    .iter()
                    .zip(&coords)
                    .map(|(&v, &t)| t * v)
                    .collect(),
            )
            .unwrap(),
        );
        let second = integrate_1d(
            &SampledField1D::new(
                grid,
                m.values()
                    .iter()
                    .zip(&coords)
                    .map(|(&v, &t)| t * t * v)
                    .collect(),
            )
            .unwrap(),
        );
        second - mean * mean
    }

    #[test]
    fn smoothing_adds_fixed_variance_in_each_direction() {
        let w = wigner(&state(0, 0.2), &default_grid()).unwrap();
        let h = husimi_from_wigner(&w, 1.0).unwrap();
        let mw = marginals(&w).unwrap();
        let mh = marginals(&h).unwrap();
        let dx = marginal_variance(&mh.rho_x) - marginal_variance(&mw.rho_x);
        let dp = marginal_variance(&mh.rho_p) - marginal_variance(&mw.rho_p);
        assert!((dx - 1.0).abs() < 1e-5, "x variance gain {dx}");
        assert!((dp - 0.25).abs() < 1e-5, "p variance gain {dp}");
    }

    #[test]
    fn narrow_input_reveals_the_kernel_variances() {
        let grid = default_grid();
        let sigma = 0.1f64;
        let mut narrow = SampledField2D::from_fn(grid.clone(), |x, p| {
            (-(x * x + p * p) / (2.0 * sigma * sigma)).exp()
        })
        .unwrap();
        let total = integrate_2d(&narrow);
        narrow = SampledField2D::new(
            grid.clone(),
            narrow.values().iter().map(|v| v / total).collect(),
        )
        .unwrap();
        let w = PhaseSpaceField::new(FieldKind::Wigner, narrow).unwrap();
        let h = husimi_from_wigner(&w, 1.0).unwrap();
        let m = marginals(&h).unwrap();
        let vx = marginal_variance(&m.rho_x);
        let vp = marginal_variance(&m.rho_p);
        assert!((vx - (1.0 + sigma * sigma)).abs() < 1e-4, "x variance {vx}");
        assert!((vp - (0.25 + sigma * sigma)).abs() < 1e-4, "p variance {vp}");
    }

    #[test]
    fn smoothing_width_controls_momentum_kernel_only() {
        let w = wigner(&state(0, 0.0), &default_grid()).unwrap();
        // wider s → narrower p kernel → less added p variance
        let h2 = husimi_from_wigner(&w, 2.0).unwrap();
        let m2 = marginals(&h2).unwrap();
        let vx = marginal_variance(&m2.rho_x);
        let vp = marginal_variance(&m2.rho_p);
        assert!((vx - 1.5).abs() < 1e-5, "x variance {vx}");
        assert!((vp - (0.5 + 1.0 / 16.0)).abs() < 1e-5, "p variance {vp}");
    }

    #[test]
    fn husimi_rejects_bad_inputs() {
        let w = wigner(&state(0, 0.0), &default_grid()).unwrap();
        let h = husimi_from_wigner(&w, 1.0).unwrap();
        assert!(matches!(
            husimi_from_wigner(&h, 1.0),
            Err(Error::WrongFieldKind { .. })
        ));
        for s in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                husimi_from_wigner(&w, s),
                Err(Error::InvalidSmoothing(_))
            ));
        }
    }

    #[test]
    fn expectation_recovers_normalization_and_energy() {
        let grid = default_grid();
        let one = SampledField2D::from_fn(grid.clone(), |_, _| 1.0).unwrap();
        let energy = SampledField2D::from_fn(grid.clone(), |x, p| (x * x + p * p) / 2.0).unwrap();

        let w0 = wigner(&state(0, 0.0), &grid).unwrap();
        assert!((expectation(&one, &w0).unwrap() - 1.0).abs() < 1e-12);
        assert!((expectation(&energy, &w0).unwrap() - 0.5).abs() < 1e-6);

        // level moments: ⟨x²⟩ = ⟨p²⟩ = n + ½, so the quadratic symbol
        // averages to n + ½ as well
        let w1 = wigner(&state(1, 0.0), &grid).unwrap();
        assert!((expectation(&energy, &w1).unwrap() - 1.5).abs() < 1e-6);

        let h = husimi_from_wigner(&w0, 1.0).unwrap();
        assert!(matches!(
            expectation(&one, &h),
            Err(Error::WrongFieldKind { .. })
        ));
    }

    #[test]
    fn coarse_grid_superpositions_keep_purity_and_marginals() {
        // cheaper 257-point window (129 is too coarse for the n=4
        // component to integrate within the normalization bar),
        // mixed-parity pairs at several angles
        let axis = GridSpec1D::new(-8.0, 8.0, 257).unwrap();
        let grid = GridSpec2D::square(axis.clone());
        for (a, b, theta) in [(0usize, 2usize, 0.4f64), (1, 3, 1.1), (0, 4, 0.9)] {
            let psi = Wavefunction::from_raw(
                Space::Position,
                &axis,
                Arc::new(move |t| {
                    theta.cos() * crate::states::oscillator_fn(a, t)
                        + theta.sin() * crate::states::oscillator_fn(b, t)
                }),
            )
            .unwrap();
            let w = wigner(&psi, &grid).unwrap();
            let sq = SampledField2D::new(
                w.grid().clone(),
                w.sampled().values().iter().map(|v| v * v).collect(),
            )
            .unwrap();
            assert!((integrate_2d(&sq) - 1.0 / (2.0 * PI)).abs() < 1e-5);
            let m = marginals(&w).unwrap();
            let worst = m
                .rho_x
                .values()
                .iter()
                .zip(psi.density().values())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0f64, f64::max);
            assert!(worst < 1e-6, "marginal gap {worst:.3e}");
        }
    }
}
