//! Per-state measure reports, (n, λ) sweep tables, and the measure
//! registry that pins the schema.
//!
//! The registry is the single source of truth for which measures exist,
//! their order, and which are complex-valued. Report assembly re-derives
//! the entry list and verifies it against the registry, so a measure that
//! silently drops out of the computation path fails loudly instead of
//! producing a narrower table. Sweep rows are computed on a bounded worker
//! pool but assembled in key order, and every computation in a row is
//! deterministic, so identical inputs serialize to identical bytes.
//!
//! A failing row (for example a grid that clips the state past the
//! normalization bar) records its error string and leaves the other rows
//! intact; callers decide whether partial results are acceptable.

use rayon::prelude::*;

use crate::divergence::{
    cauchy_schwarz_divergence, kl_divergence, mutual_information, renyi_divergence,
    renyi_mutual_information, DensityPair,
};
use crate::entropy::{
    check_renyi_bound, check_shannon_bound, fisher_information, renyi_1d, renyi_phase_space,
    shannon_1d, wehrl_entropy, wigner_entropy, BoundCheck,
};
use crate::phasespace::{husimi_from_wigner, marginals, wigner};
use crate::quadrature::GridSpec2D;
use crate::states::{perturbed_state_general, OscillatorSpec, Space};
use crate::survival::{cross_cumulative_residual_entropy, jeffreys_divergence, survival_1d};
use crate::{Error, Result};

/// One measure in the registry: its column name and whether it carries an
/// imaginary component.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct MeasureDef {
    pub name: String,
    pub complex: bool,
}

/// One computed measure value.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MeasureEntry {
    pub name: String,
    pub real: f64,
    pub imag: f64,
}

/// A bound verdict together with the label it is reported under.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct NamedBound {
    pub name: String,
    #[serde(flatten)]
    pub check: BoundCheck,
}

/// Every measure and bound verdict for a single (n, λ) state.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MeasureReport {
    pub state: OscillatorSpec,
    pub grid: GridSpec2D,
    pub entries: Vec<MeasureEntry>,
    pub bounds: Vec<NamedBound>,
}

impl MeasureReport {
    pub fn entry(&self, name: &str) -> Option<&MeasureEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn bound(&self, name: &str) -> Option<&NamedBound> {
        self.bounds.iter().find(|b| b.name == name)
    }
}

/// One sweep lattice point: either a full report or the error that stopped
/// it, never both.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub lambda: f64,
    pub report: Option<MeasureReport>,
    pub error: Option<String>,
}

/// Numerical tolerances baked into the computation, recorded alongside the
/// data so a table is interpretable on its own.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Tolerances {
    pub normalization: f64,
    pub mutual_information_cross_check: f64,
    pub density_floor: f64,
    pub ratio_floor: f64,
    pub bound_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            normalization: 1e-6,
            mutual_information_cross_check: 1e-4,
            density_floor: 1e-14,
            ratio_floor: 1e-300,
            bound_slack: 1e-9,
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepMetadata {
    pub grid: GridSpec2D,
    pub smoothing: f64,
    pub alphas: Vec<u32>,
    pub tolerances: Tolerances,
    pub version: String,
}

/// Ordered sweep results plus the metadata needed to reproduce them.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub metadata: SweepMetadata,
}

impl SweepTable {
    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

/// The full measure schema for a given set of Rényi orders, in emission
/// order.
pub fn registry(alphas: &[u32]) -> Vec<MeasureDef> {
    let real = |name: String| MeasureDef {
        name,
        complex: false,
    };
    let complex = |name: &str| MeasureDef {
        name: name.to_string(),
        complex: true,
    };

    let mut defs = Vec::new();
    for name in ["S_x_W", "S_p_W", "S_x_H", "S_p_H"] {
        defs.push(real(name.to_string()));
    }
    defs.push(complex("S_W"));
    defs.push(real("S_H".to_string()));
    for kind in ["W", "H"] {
        for a in alphas {
            defs.push(real(format!("R{a}_{kind}")));
        }
    }
    for kind in ["W", "H"] {
        for a in alphas {
            defs.push(real(format!("R{a}_x_{kind}")));
            defs.push(real(format!("R{a}_p_{kind}")));
        }
    }
    defs.push(real("F_x".to_string()));
    defs.push(real("F_p".to_string()));
    for name in ["C_x_W", "C_p_W", "C_x_H", "C_p_H"] {
        defs.push(real(name.to_string()));
    }
    defs.push(complex("CC_W"));
    defs.push(complex("CC_H"));
    defs.push(complex("I_W"));
    defs.push(complex("I_H"));
    defs.push(real("I2_W".to_string()));
    defs.push(real("I2_H".to_string()));
    defs.push(real("KL_x".to_string()));
    defs.push(real("KL_p".to_string()));
    defs.push(real("J_x".to_string()));
    defs.push(real("J_p".to_string()));
    for a in alphas {
        defs.push(real(format!("RD{a}_x")));
        defs.push(real(format!("RD{a}_p")));
    }
    defs.push(real("D_CS".to_string()));
    defs
}

/// Compare assembled entry names against the registry; any missing, extra,
/// or out-of-order measure is a schema violation.
pub(crate) fn verify_against_registry(names: &[&str], alphas: &[u32]) -> Result<()> {
    let expected = registry(alphas);
    if names.len() != expected.len() {
        return Err(Error::RegistryMismatch(format!(
            "expected {} measures, assembled {}",
            expected.len(),
            names.len()
        )));
    }
    for (def, &name) in expected.iter().zip(names) {
        if def.name != name {
            return Err(Error::RegistryMismatch(format!(
                "expected '{}' at this position, assembled '{}'",
                def.name, name
            )));
        }
    }
    Ok(())
}

/// Compute every registered measure and bound verdict for one state.
///
/// `s` is the momentum-kernel smoothing width and `alphas` the Rényi orders
/// (even, and including 2 so the collision-order bounds have inputs).
pub fn compute_all(
    spec: &OscillatorSpec,
    grid: &GridSpec2D,
    s: f64,
    alphas: &[u32],
) -> Result<MeasureReport> {
    if !alphas.contains(&2) {
        return Err(Error::RegistryMismatch(
            "Rényi order list must include 2 (collision bounds need it)".to_string(),
        ));
    }

    let psi = perturbed_state_general(spec, Space::Position, &grid.x)?;
    let w = wigner(&psi, grid)?;
    let h = husimi_from_wigner(&w, s)?;
    let mw = marginals(&w)?;
    let mh = marginals(&h)?;

    let mut entries: Vec<MeasureEntry> = Vec::new();
    let mut push = |name: String, real: f64, imag: f64| {
        entries.push(MeasureEntry { name, real, imag });
    };

    let s_x_w = shannon_1d(&mw.rho_x)?;
    let s_p_w = shannon_1d(&mw.rho_p)?;
    let s_x_h = shannon_1d(&mh.rho_x)?;
    let s_p_h = shannon_1d(&mh.rho_p)?;
    push("S_x_W".into(), s_x_w, 0.0);
    push("S_p_W".into(), s_p_w, 0.0);
    push("S_x_H".into(), s_x_h, 0.0);
    push("S_p_H".into(), s_p_h, 0.0);

    let s_w = wigner_entropy(&w)?;
    push("S_W".into(), s_w.real_part, s_w.imag_part);
    push("S_H".into(), wehrl_entropy(&h)?, 0.0);

    for a in alphas {
        push(format!("R{a}_W"), renyi_phase_space(&w, *a)?, 0.0);
    }
    for a in alphas {
        push(format!("R{a}_H"), renyi_phase_space(&h, *a)?, 0.0);
    }

    let mut marginal_renyi = std::collections::HashMap::new();
    for (kind, m) in [("W", &mw), ("H", &mh)] {
        for a in alphas {
            let rx = renyi_1d(&m.rho_x, *a as f64)?;
            let rp = renyi_1d(&m.rho_p, *a as f64)?;
            marginal_renyi.insert((kind, *a, 'x'), rx);
            marginal_renyi.insert((kind, *a, 'p'), rp);
            push(format!("R{a}_x_{kind}"), rx, 0.0);
            push(format!("R{a}_p_{kind}"), rp, 0.0);
        }
    }

    let f_x = fisher_information(&mw.rho_x)?;
    let f_p = fisher_information(&mw.rho_p)?;
    push("F_x".into(), f_x, 0.0);
    push("F_p".into(), f_p, 0.0);

    let cre = |m: &crate::quadrature::SampledField1D| {
        crate::survival::cumulative_residual_entropy(&survival_1d(m))
    };
    push("C_x_W".into(), cre(&mw.rho_x), 0.0);
    push("C_p_W".into(), cre(&mw.rho_p), 0.0);
    push("C_x_H".into(), cre(&mh.rho_x), 0.0);
    push("C_p_H".into(), cre(&mh.rho_p), 0.0);

    let cc_w = cross_cumulative_residual_entropy(&w)?;
    let cc_h = cross_cumulative_residual_entropy(&h)?;
    push("CC_W".into(), cc_w.real_part, cc_w.imag_part);
    push("CC_H".into(), cc_h.real_part, cc_h.imag_part);

    let i_w = mutual_information(&w)?.value();
    let i_h = mutual_information(&h)?.value();
    push("I_W".into(), i_w.real_part, i_w.imag_part);
    push("I_H".into(), i_h.real_part, i_h.imag_part);
    push("I2_W".into(), renyi_mutual_information(&w)?, 0.0);
    push("I2_H".into(), renyi_mutual_information(&h)?, 0.0);

    // marginal comparisons orient Wigner (the wavefunction density) as P
    // and the smoothed Husimi marginal as Q
    let pair_x = DensityPair::new(mw.rho_x.clone(), mh.rho_x.clone())?;
    let pair_p = DensityPair::new(mw.rho_p.clone(), mh.rho_p.clone())?;
    push("KL_x".into(), kl_divergence(&pair_x)?, 0.0);
    push("KL_p".into(), kl_divergence(&pair_p)?, 0.0);
    push(
        "J_x".into(),
        jeffreys_divergence(&survival_1d(&mw.rho_x), &survival_1d(&mh.rho_x))?,
        0.0,
    );
    push(
        "J_p".into(),
        jeffreys_divergence(&survival_1d(&mw.rho_p), &survival_1d(&mh.rho_p))?,
        0.0,
    );
    for a in alphas {
        push(
            format!("RD{a}_x"),
            renyi_divergence(&pair_x, *a as f64)?,
            0.0,
        );
        push(
            format!("RD{a}_p"),
            renyi_divergence(&pair_p, *a as f64)?,
            0.0,
        );
    }
    push(
        "D_CS".into(),
        cauchy_schwarz_divergence(w.sampled(), h.sampled())?,
        0.0,
    );

    let names: Vec<&str> = entries.iter().map(|e| e.name.as_str()).collect();
    verify_against_registry(&names, alphas)?;

    let named = |name: &str, check: BoundCheck| NamedBound {
        name: name.to_string(),
        check,
    };
    let bounds = vec![
        named(
            "shannon_wigner_marginals",
            check_shannon_bound(s_x_w, s_p_w),
        ),
        named(
            "shannon_husimi_marginals",
            check_shannon_bound(s_x_h, s_p_h),
        ),
        named(
            "renyi2_wigner_marginals",
            check_renyi_bound(
                marginal_renyi[&("W", 2u32, 'x')],
                marginal_renyi[&("W", 2u32, 'p')],
                2.0,
                2.0,
            )?,
        ),
        named(
            "renyi2_husimi_marginals",
            check_renyi_bound(
                marginal_renyi[&("H", 2u32, 'x')],
                marginal_renyi[&("H", 2u32, 'p')],
                2.0,
                2.0,
            )?,
        ),
        named("fisher_product", BoundCheck::new(f_x * f_p, 4.0)),
    ];

    Ok(MeasureReport {
        state: *spec,
        grid: grid.clone(),
        entries,
        bounds,
    })
}

/// Run [`compute_all`] over the (n, λ) lattice on a worker pool of
/// `workers` threads (0 = library default). Rows are sorted by (n, λ) and
/// duplicate keys are rejected; a failing row records its error and the
/// sweep continues.
pub fn sweep(
    n_values: &[usize],
    lambda_values: &[f64],
    grid: &GridSpec2D,
    s: f64,
    alphas: &[u32],
    workers: usize,
) -> Result<SweepTable> {
    if n_values.is_empty() || lambda_values.is_empty() {
        return Err(Error::Usage(
            "sweep needs at least one n and one lambda value".to_string(),
        ));
    }
    for &l in lambda_values {
        if !l.is_finite() || l < 0.0 {
            return Err(Error::InvalidCoupling(l));
        }
    }

    let mut keys: Vec<(usize, f64)> = Vec::new();
    for &n in n_values {
        for &l in lambda_values {
            keys.push((n, l));
        }
    }
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    for pair in keys.windows(2) {
        if pair[0].0 == pair[1].0 && pair[0].1.to_bits() == pair[1].1.to_bits() {
            return Err(Error::DuplicateSweepKey {
                n: pair[0].0,
                lambda: pair[0].1,
            });
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Usage(format!("cannot build worker pool: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        keys.par_iter()
            .map(|&(n, lambda)| {
                let row = OscillatorSpec::new(n, lambda)
                    .and_then(|spec| compute_all(&spec, grid, s, alphas));
                match row {
                    Ok(report) => SweepRow {
                        n,
                        lambda,
                        report: Some(report),
                        error: None,
                    },
                    Err(e) => SweepRow {
                        n,
                        lambda,
                        report: None,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    });

    Ok(SweepTable {
        rows,
        metadata: SweepMetadata {
            grid: grid.clone(),
            smoothing: s,
            alphas: alphas.to_vec(),
            tolerances: Tolerances::default(),
            version: crate::VERSION.to_string(),
        },
    })
}
