//! Survival (upper-tail) functions, cumulative residual entropies, the
//! cross-cumulative residual entropy, and the Jeffreys divergence between
//! survival curves.
//!
//! A survival function s(a) = ∫_a^∞ ρ replaces the density by the mass above
//! each threshold; entropies built on it weight spread rather than local
//! density values. Thresholds always reuse the source grid, and suffix
//! integration uses the reverse cumulative Simpson rule, so s at the lowest
//! threshold reproduces the full integral bit-for-bit.
//!
//! The cross term couples the two axes of a phase-space field:
//! 𝒞 = C_x − ε with ε = −∫∫dx db G(x,b)·ln(G(x,b)/ρ_x(x)), where
//! G(x,b) = ∫_b^∞ dp field(x,p) is the per-row suffix. For a separable field
//! ε collapses to C_p and 𝒞 = C_x − C_p. Signed (Wigner) fields keep their
//! negative suffix values — no clamping — and the logarithm runs on the
//! principal branch, so 𝒞 picks up an imaginary part exactly where
//! negativity survives the partial integration; smoothed fields clamp dust
//! and stay strictly real.

use crate::entropy::{ComplexEntropy, DENSITY_FLOOR};
use crate::phasespace::{marginals, FieldKind, PhaseSpaceField};
use crate::quadrature::{
    cumulative_from_above, integrate_1d, integrate_2d, GridSpec1D, GridSpec2D, SampledField1D,
    SampledField2D,
};
use crate::{Error, Result};

/// Floor inside ratio logarithms: far-tail survivals collapse to this value
/// so the ratio stays finite while the weight in front is already zero.
const RATIO_FLOOR: f64 = 1e-300;

/// Upper-tail mass of a 1D density at every grid threshold.
#[derive(Debug, Clone)]
pub struct SurvivalField1D {
    grid: GridSpec1D,
    values: Vec<f64>,
}

impl SurvivalField1D {
    pub fn grid(&self) -> &GridSpec1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Joint upper-tail mass s(a,b) = ∫_a^∞∫_b^∞ field of a phase-space field,
/// on the field's own threshold grid. Signed sources may push values
/// outside [0,1] locally; that is information, not an error.
#[derive(Debug, Clone)]
pub struct SurvivalField2D {
    grid: GridSpec2D,
    values: Vec<f64>,
    source_kind: FieldKind,
}

impl SurvivalField2D {
    pub fn grid(&self) -> &GridSpec2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source_kind(&self) -> FieldKind {
        self.source_kind
    }

    pub fn at(&self, ia: usize, ib: usize) -> f64 {
        self.values[ia * self.grid.p.points() + ib]
    }
}

/// Suffix quadrature of a density at every threshold of its own grid.
pub fn survival_1d(rho: &SampledField1D) -> SurvivalField1D {
    SurvivalField1D {
        grid: rho.grid().clone(),
        values: cumulative_from_above(rho.values(), rho.grid().step()),
    }
}

/// Two-dimensional suffix quadrature: suffix over p within each x row, then
/// suffix over x at each momentum threshold.
pub fn survival_2d(field: &PhaseSpaceField) -> SurvivalField2D {
    let grid = field.grid().clone();
    let nx = grid.x.points();
    let np = grid.p.points();
    let hp = grid.p.step();
    let hx = grid.x.step();

    let mut row_suffix = vec![0.0f64; nx * np];
    for i in 0..nx {
        let suffix = cumulative_from_above(field.sampled().row(i), hp);
        row_suffix[i * np..(i + 1) * np].copy_from_slice(&suffix);
    }

    let mut values = vec![0.0f64; nx * np];
    let mut column = vec![0.0f64; nx];
    for kb in 0..np {
        for (i, c) in column.iter_mut().enumerate() {
            *c = row_suffix[i * np + kb];
        }
        let suffix = cumulative_from_above(&column, hx);
        for (ia, v) in suffix.into_iter().enumerate() {
            values[ia * np + kb] = v;
        }
    }

    SurvivalField2D {
        grid,
        values,
        source_kind: field.kind(),
    }
}

/// C = −∫ s ln s over the thresholds, with s clamped to [0, 1] (survival of
/// a genuine density can leave that range only by quadrature dust).
pub fn cumulative_residual_entropy(s: &SurvivalField1D) -> f64 {
    let integrand = SampledField1D::new(
        s.grid().clone(),
        s.values()
            .iter()
            .map(|&v| {
                let v = v.clamp(0.0, 1.0);
                if v < DENSITY_FLOOR {
                    0.0
                } else {
                    -v * v.ln()
                }
            })
            .collect(),
    )
    .expect("clamped survival integrand inherits a validated grid");
    integrate_1d(&integrand)
}

/// 𝒞 = C_x − ε for a phase-space field, ε being the cross term built from
/// the per-row momentum suffix G(x,b) against the position marginal.
///
/// Husimi fields clamp suffix dust and return an exactly-zero imaginary
/// part; Wigner fields keep signed suffixes and may come out complex.
pub fn cross_cumulative_residual_entropy(field: &PhaseSpaceField) -> Result<ComplexEntropy> {
    let grid = field.grid().clone();
    let nx = grid.x.points();
    let np = grid.p.points();
    let hp = grid.p.step();

    let m = marginals(field)?;
    let c_x = cumulative_residual_entropy(&survival_1d(&m.rho_x));
    let rho_x = m.rho_x.values();

    let signed = field.kind() == FieldKind::Wigner;
    let mut eps_re = vec![0.0f64; nx * np];
    let mut eps_im = vec![0.0f64; nx * np];
    for (i, &rho_xi) in rho_x.iter().enumerate() {
        let suffix = cumulative_from_above(field.sampled().row(i), hp);
        let ln_rho = rho_xi.max(RATIO_FLOOR).ln();
        for (kb, &g) in suffix.iter().enumerate() {
            let idx = i * np + kb;
            if signed {
                if g.abs() < DENSITY_FLOOR {
                    continue;
                }
                eps_re[idx] = -g * (g.abs().ln() - ln_rho);
                if g < 0.0 {
                    eps_im[idx] = -g * std::f64::consts::PI;
                }
            } else {
                let g = g.clamp(0.0, 1.0);
                if g < DENSITY_FLOOR {
                    continue;
                }
                eps_re[idx] = -g * (g.ln() - ln_rho);
            }
        }
    }

    let re = integrate_2d(&SampledField2D::new(grid.clone(), eps_re)?);
    if signed {
        let im = integrate_2d(&SampledField2D::new(grid, eps_im)?);
        Ok(ComplexEntropy::new(c_x - re, -im))
    } else {
        Ok(ComplexEntropy::real(c_x - re))
    }
}

/// Symmetric divergence ∫ [s₁ ln(s₁/s₂) + s₂ ln(s₂/s₁)] between two
/// survival curves on the same threshold grid, both clamped to
/// [1e−300, 1] before the ratio.
pub fn jeffreys_divergence(s1: &SurvivalField1D, s2: &SurvivalField1D) -> Result<f64> {
    if s1.grid() != s2.grid() {
        return Err(Error::GridMismatch);
    }
    let integrand = SampledField1D::new(
        s1.grid().clone(),
        s1.values()
            .iter()
            .zip(s2.values())
            .map(|(&a, &b)| {
                let a = a.clamp(RATIO_FLOOR, 1.0);
                let b = b.clamp(RATIO_FLOOR, 1.0);
                (a - b) * (a.ln() - b.ln())
            })
            .collect(),
    )?;
    Ok(integrate_1d(&integrand))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasespace::{husimi_from_wigner, wigner};
    use crate::states::{perturbed_state_general, OscillatorSpec, Space};
    use proptest::prelude::*;

    fn wfield(n: usize, lambda: f64) -> PhaseSpaceField {
        let spec = OscillatorSpec::new(n, lambda).unwrap();
        let psi =
            perturbed_state_general(&spec, Space::Position, &GridSpec1D::default_working())
                .unwrap();
        wigner(&psi, &GridSpec2D::default_working()).unwrap()
    }

    fn hfield(n: usize, lambda: f64) -> PhaseSpaceField {
        husimi_from_wigner(&wfield(n, lambda), 1.0).unwrap()
    }

    fn gaussian_density(grid: &GridSpec1D, sigma: f64) -> SampledField1D {
        let raw = SampledField1D::from_fn(grid.clone(), |x| {
            (-x * x / (2.0 * sigma * sigma)).exp()
        })
        .unwrap();
        let total = integrate_1d(&raw);
        SampledField1D::new(grid.clone(), raw.values().iter().map(|v| v / total).collect())
            .unwrap()
    }

    #[test]
    fn survival_endpoints_reproduce_total_mass_and_zero() {
        let m = marginals(&wfield(0, 0.0)).unwrap();
        let s = survival_1d(&m.rho_x);
        assert_eq!(*s.values().last().unwrap(), 0.0);
        assert_eq!(s.values()[0], integrate_1d(&m.rho_x));
        assert!((s.values()[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn symmetric_density_has_half_mass_above_zero() {
        let m = marginals(&wfield(0, 0.1)).unwrap();
        let s = survival_1d(&m.rho_x);
        let mid = (s.grid().points() - 1) / 2;
        assert!((s.values()[mid] - 0.5).abs() < 1e-8);
    }

    #[test]
    fn gaussian_survival_matches_erfc_value() {
        // variance ½ at threshold 1: ½·erfc(1)
        let m = marginals(&wfield(0, 0.0)).unwrap();
        let s = survival_1d(&m.rho_x);
        let coords = s.grid().coords();
        let i1 = coords.iter().position(|&a| (a - 1.0).abs() < 1e-12).unwrap();
        let half_erfc_one = 0.078_649_603_525_142_57;
        assert!((s.values()[i1] - half_erfc_one).abs() < 1e-6);
    }

    #[test]
    fn survival_of_densities_is_monotone_and_bounded() {
        for (n, lambda) in [(0usize, 0.0), (1, 0.2)] {
            let m = marginals(&hfield(n, lambda)).unwrap();
            for rho in [&m.rho_x, &m.rho_p] {
                let s = survival_1d(rho);
                for pair in s.values().windows(2) {
                    assert!(pair[1] <= pair[0] + 1e-10);
                }
                for &v in s.values() {
                    assert!((-1e-8..=1.0 + 1e-8).contains(&v));
                }
            }
        }
    }

    #[test]
    fn joint_survival_corner_is_the_full_integral() {
        for field in [wfield(1, 0.1), hfield(0, 0.2)] {
            let s = survival_2d(&field);
            assert_eq!(s.at(0, 0), integrate_2d(field.sampled()));
            assert!((s.at(0, 0) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn smoothed_joint_survival_is_monotone_in_both_directions() {
        let s = survival_2d(&hfield(1, 0.1));
        let np = s.grid().p.points();
        let nx = s.grid().x.points();
        for ia in (0..nx).step_by(16) {
            for ib in 1..np {
                assert!(s.at(ia, ib) <= s.at(ia, ib - 1) + 1e-10);
            }
        }
        for ib in (0..np).step_by(16) {
            for ia in 1..nx {
                assert!(s.at(ia, ib) <= s.at(ia - 1, ib) + 1e-10);
            }
        }
        for &v in s.values() {
            assert!((-1e-8..=1.0 + 1e-6).contains(&v));
        }
    }

    #[test]
    fn signed_joint_survival_is_not_monotone() {
        let s = survival_2d(&wfield(1, 0.0));
        let np = s.grid().p.points();
        let nx = s.grid().x.points();
        let mut max_rise = 0.0f64;
        for ia in 0..nx {
            for ib in 1..np {
                max_rise = max_rise.max(s.at(ia, ib) - s.at(ia, ib - 1));
            }
        }
        assert!(
            max_rise > 1e-3,
            "negativity should produce a rising slice, max rise {max_rise:.3e}"
        );
    }

    #[test]
    fn gaussian_cre_matches_high_resolution_oracle() {
        // −∫ ½erfc(a)·ln(½erfc(a)) da for the variance-½ Gaussian,
        // evaluated externally at high resolution
        let m = marginals(&wfield(0, 0.0)).unwrap();
        let c = cumulative_residual_entropy(&survival_1d(&m.rho_x));
        assert!((c - 0.638_656_925_375).abs() < 1e-5, "C = {c}");
    }

    #[test]
    fn cre_shrinks_toward_zero_for_point_masses() {
        let grid = GridSpec1D::new(-2.0, 2.0, 1025).unwrap();
        let wide = cumulative_residual_entropy(&survival_1d(&gaussian_density(&grid, 0.02)));
        let narrow = cumulative_residual_entropy(&survival_1d(&gaussian_density(&grid, 0.01)));
        assert!(narrow < wide);
        assert!(wide < 0.02, "sigma=0.02 CRE = {wide}");
        assert!(narrow < 0.01, "sigma=0.01 CRE = {narrow}");
    }

    #[test]
    fn cre_scales_linearly_with_stretching() {
        let grid = GridSpec1D::default_working();
        let sigma = std::f64::consts::FRAC_1_SQRT_2;
        let k = 1.5;
        let base = cumulative_residual_entropy(&survival_1d(&gaussian_density(&grid, sigma)));
        let stretched =
            cumulative_residual_entropy(&survival_1d(&gaussian_density(&grid, k * sigma)));
        assert!(
            (stretched - k * base).abs() < 1e-5,
            "{stretched} vs {}",
            k * base
        );
    }

    #[test]
    fn cross_term_vanishes_for_the_symmetric_separable_field() {
        let cc = cross_cumulative_residual_entropy(&wfield(0, 0.0)).unwrap();
        assert!(cc.real_part.abs() < 1e-5, "re = {}", cc.real_part);
        assert_eq!(cc.imag_part, 0.0);
    }

    #[test]
    fn cross_term_of_separable_smoothed_field_is_marginal_difference() {
        // separable at λ=0, so 𝒞 = C_x − C_p even though neither side is 0
        let h = hfield(0, 0.0);
        let m = marginals(&h).unwrap();
        let cx = cumulative_residual_entropy(&survival_1d(&m.rho_x));
        let cp = cumulative_residual_entropy(&survival_1d(&m.rho_p));
        let cc = cross_cumulative_residual_entropy(&h).unwrap();
        assert!((cc.real_part - (cx - cp)).abs() < 1e-6);
        assert_eq!(cc.imag_part, 0.0);
        assert!((cc.real_part - 0.323_994_440_5).abs() < 1e-5);
    }

    #[test]
    fn smoothed_cross_term_sign_is_stable_under_refinement() {
        let spec = OscillatorSpec::new(0, 0.1).unwrap();
        let psi =
            perturbed_state_general(&spec, Space::Position, &GridSpec1D::default_working())
                .unwrap();
        let value_at = |points: usize| {
            let axis = GridSpec1D::new(-8.0, 8.0, points).unwrap();
            let w = wigner(&psi, &GridSpec2D::square(axis)).unwrap();
            cross_cumulative_residual_entropy(&husimi_from_wigner(&w, 1.0).unwrap())
                .unwrap()
                .real_part
        };
        let coarse = value_at(513);
        let fine = value_at(769);
        assert!(coarse.abs() > 1e-4, "cross term unexpectedly zero: {coarse}");
        assert_eq!(coarse.signum(), fine.signum());
        assert!((coarse - fine).abs() < 1e-3);
    }

    #[test]
    fn signed_cross_term_goes_complex_for_the_excited_state() {
        let cc0 = cross_cumulative_residual_entropy(&wfield(1, 0.0)).unwrap();
        assert!((cc0.real_part - 0.218_388_953_6).abs() < 1e-6);
        assert!((cc0.imag_part - (-0.206_553_690_3)).abs() < 1e-6);

        let cc = cross_cumulative_residual_entropy(&wfield(1, 0.1)).unwrap();
        assert!(cc.imag_part.abs() > 0.01);
    }

    #[test]
    fn jeffreys_divergence_of_identical_curves_is_exactly_zero() {
        let m = marginals(&wfield(0, 0.1)).unwrap();
        let s = survival_1d(&m.rho_x);
        assert_eq!(jeffreys_divergence(&s, &s).unwrap(), 0.0);
    }

    #[test]
    fn jeffreys_divergence_of_gaussian_pair_matches_oracle() {
        // survivals of the variance-½ and variance-3/2 Gaussians
        let mw = marginals(&wfield(0, 0.0)).unwrap();
        let mh = marginals(&hfield(0, 0.0)).unwrap();
        let sw = survival_1d(&mw.rho_x);
        let sh = survival_1d(&mh.rho_x);
        let r = jeffreys_divergence(&sw, &sh).unwrap();
        assert!((r - 0.349_823_660_577).abs() < 1e-5, "R = {r}");
    }

    #[test]
    fn jeffreys_divergence_is_symmetric_and_nonnegative() {
        let mw = marginals(&wfield(1, 0.2)).unwrap();
        let mh = marginals(&hfield(1, 0.2)).unwrap();
        let a = survival_1d(&mw.rho_p);
        let b = survival_1d(&mh.rho_p);
        let fwd = jeffreys_divergence(&a, &b).unwrap();
        let rev = jeffreys_divergence(&b, &a).unwrap();
        assert!(fwd >= 0.0);
        assert!((fwd - rev).abs() < 1e-12);
    }

    #[test]
    fn jeffreys_divergence_requires_matching_grids() {
        let m = marginals(&wfield(0, 0.0)).unwrap();
        let s = survival_1d(&m.rho_x);
        let other = survival_1d(&gaussian_density(
            &GridSpec1D::new(-4.0, 4.0, 257).unwrap(),
            1.0,
        ));
        assert!(matches!(
            jeffreys_divergence(&s, &other),
            Err(Error::GridMismatch)
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn survival_of_smooth_densities_behaves(
            w in 0.1f64..0.9,
            s1 in 0.5f64..1.5,
            s2 in 0.5f64..1.5,
            mu in -1.0f64..1.0,
        ) {
            let grid = GridSpec1D::default_working();
            let raw = SampledField1D::from_fn(grid.clone(), |x| {
                w * (-(x - mu) * (x - mu) / (2.0 * s1 * s1)).exp()
                    + (1.0 - w) * (-(x + mu) * (x + mu) / (2.0 * s2 * s2)).exp()
            }).unwrap();
            let total = integrate_1d(&raw);
            let rho = SampledField1D::new(
                grid,
                raw.values().iter().map(|v| v / total).collect(),
            ).unwrap();

            let s = survival_1d(&rho);
            for pair in s.values().windows(2) {
                prop_assert!(pair[1] <= pair[0] + 1e-10);
            }
            for &v in s.values() {
                prop_assert!((-1e-8..=1.0 + 1e-8).contains(&v));
            }
            prop_assert!(cumulative_residual_entropy(&s) >= 0.0);
        }
    }
}
