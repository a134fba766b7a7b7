//! Scenario runners behind the `mdp` binary. Each command returns its
//! rendered output so it can be tested without touching the filesystem.

use std::collections::BTreeMap;

use mdp_core::hom::{bell_kernels, hom_scan, run_hom, singlet_invariance, KernelFile};
use mdp_core::measurement::visibility_report;
use mdp_core::metrics::{purity_closed_form, purity_from_kernels, reduced_density};
use mdp_core::pdc::{alpha_from_kb, four_photon, project_onto_factors, FourPhotonDecomposition};
use mdp_core::random::{random_fock_state, random_schmidt_coefficients, random_unitary};
use mdp_core::symmetrizer::{fock_to_sym, symmetry_split};
use mdp_core::{Dof, DofRegistry, ModeUnitary, SchmidtSpec, TwoPhotonKernel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

/// Largest closed-form vs numeric purity gap accepted by the surface command.
pub const SURFACE_TOL: f64 = 1e-8;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl From<mdp_core::Error> for CliError {
    fn from(e: mdp_core::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// 12 significant digits, plain decimal where reasonable, no trailing zeros.
pub fn fmt_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let s = if (-5..15).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.11e}");
        let (mant, e) = s.split_once('e').expect("exponent form");
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        format!("{mant}e{e}")
    };
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0".into()
    } else {
        s
    }
}

/// Rounds to the printed precision so JSON output matches CSV output.
fn round12(x: f64) -> Value {
    json!(fmt_float(x).parse::<f64>().unwrap_or(x))
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

fn json_rows(header: &[&str], rows: &[Vec<Value>]) -> String {
    let list: Vec<Value> = rows
        .iter()
        .map(|r| Value::Object(header.iter().map(|h| h.to_string()).zip(r.iter().cloned()).collect()))
        .collect();
    render_json(&Value::Array(list))
}

fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn render(format: Format, header: &[&str], rows: Vec<Vec<Value>>) -> String {
    match format {
        Format::Json => json_rows(header, &rows),
        Format::Csv => {
            let text: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|v| match v {
                            Value::Number(n) => fmt_float(n.as_f64().unwrap_or(f64::NAN)),
                            Value::String(s) => s.clone(),
                            other => other.to_string(),
                        })
                        .collect()
                })
                .collect();
            csv(header, &text)
        }
    }
}

fn check_r(r: f64) -> CliResult<()> {
    if (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(CliError::Input(format!("--r {r} is outside [0, 1]")))
    }
}

pub fn cmd_purity_surface(kmin: f64, kmax: f64, steps: usize, format: Format) -> CliResult<String> {
    if !(kmin > 0.0 && kmin <= kmax && kmax <= 1.0) {
        return Err(CliError::Input(format!(
            "need 0 < kmin <= kmax <= 1, got kmin={kmin}, kmax={kmax}"
        )));
    }
    if steps < 2 {
        return Err(CliError::Input(format!("--steps must be at least 2, got {steps}")));
    }
    let grid: Vec<f64> = (0..steps)
        .map(|i| kmin + (kmax - kmin) * i as f64 / (steps - 1) as f64)
        .collect();
    let kernels = grid
        .iter()
        .map(|&k| Ok(SchmidtSpec::with_k(k)?.pair_kernel()))
        .collect::<CliResult<Vec<_>>>()?;
    let cells: Vec<(f64, f64, f64, f64)> = (0..steps * steps)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / steps, idx % steps);
            let closed = purity_closed_form(grid[i], grid[j])?;
            let numeric = purity_from_kernels(&kernels[i], &kernels[j])?;
            Ok((grid[i], grid[j], closed, numeric))
        })
        .collect::<CliResult<_>>()?;
    let worst = cells.iter().map(|c| (c.2 - c.3).abs()).fold(0.0, f64::max);
    if worst > SURFACE_TOL {
        return Err(CliError::Invariant(format!(
            "closed and numeric purity differ by {worst:e}"
        )));
    }
    let rows = cells
        .into_iter()
        .map(|(a, b, c, n)| vec![round12(a), round12(b), round12(c), round12(n), round12((c - n).abs())])
        .collect();
    Ok(render(
        format,
        &["k_a", "k_b", "purity_closed", "purity_numeric", "abs_error"],
        rows,
    ))
}

pub fn parse_kernel(text: &str) -> CliResult<TwoPhotonKernel> {
    let file: KernelFile = serde_json::from_str(text).map_err(|e| CliError::Input(format!("kernel file: {e}")))?;
    Ok(file.into_kernel()?)
}

pub fn parse_spec(text: &str) -> CliResult<SchmidtSpec> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("spec file: {e}")))
}

/// Mixes the normalized symmetric and antisymmetric parts of the kernel,
/// `lambda = 1` being purely symmetric. A kernel without one of the parts is
/// used as is at every `lambda`.
pub fn cmd_hom_scan(kernel: &TwoPhotonKernel, r: f64, steps: usize, format: Format) -> CliResult<String> {
    check_r(r)?;
    if steps < 2 {
        return Err(CliError::Input(format!("--steps must be at least 2, got {steps}")));
    }
    let (sym, anti) = symmetry_split(kernel.matrix())?;
    let lambdas: Vec<f64> = (0..steps).map(|i| i as f64 / (steps - 1) as f64).collect();
    let (ns, na) = (sym.norm(), anti.norm());
    let results: Vec<(f64, mdp_core::OutcomeDistribution)> = if ns > 1e-12 && na > 1e-12 {
        let scale = |m: &nalgebra::DMatrix<num_complex::Complex64>, n: f64| m / num_complex::Complex64::new(n, 0.0);
        hom_scan(&scale(&sym, ns), &scale(&anti, na), kernel.labels(), &lambdas, r)?
    } else {
        let out = run_hom(kernel, r)?;
        lambdas.iter().map(|&l| (l, out)).collect()
    };
    let rows = results
        .into_iter()
        .map(|(l, o)| {
            vec![
                round12(l),
                round12(r),
                round12(o.p_uu),
                round12(o.p_dd),
                round12(o.p_ud),
            ]
        })
        .collect();
    Ok(render(format, &["lambda", "R", "p_uu", "p_dd", "p_ud"], rows))
}

pub fn cmd_bell_table(r: f64, format: Format) -> CliResult<String> {
    check_r(r)?;
    let rows = bell_kernels()
        .into_iter()
        .map(|(name, k)| {
            let o = run_hom(&k, r)?;
            Ok(vec![json!(name), round12(o.p_uu), round12(o.p_dd), round12(o.p_ud)])
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(render(format, &["state", "p_uu", "p_dd", "p_ud"], rows))
}

const FACTOR_NAMES: [&str; 5] = ["A1B1", "A1B2", "A2B1", "A2B2", "A3B3"];

pub fn cmd_pdc_report(spec_a: &SchmidtSpec, spec_b: &SchmidtSpec) -> CliResult<String> {
    let (k_a, k_b) = (spec_a.k(), spec_b.k());
    let state = four_photon(spec_a, spec_b)?;
    let projected = project_onto_factors(&state, spec_a, spec_b)?;
    let closed = FourPhotonDecomposition::closed_form(k_a, k_b);
    let coeffs = |v: [f64; 5]| -> Value {
        Value::Object(FACTOR_NAMES.iter().map(|n| n.to_string()).zip(v.map(round12)).collect())
    };
    let purity_numeric = reduced_density(&state, "A")?.purity();
    let purity_closed = purity_closed_form(k_a, k_b)?;
    if (purity_numeric - purity_closed).abs() > SURFACE_TOL {
        return Err(CliError::Invariant(format!(
            "purity {purity_numeric} differs from closed form {purity_closed}"
        )));
    }
    let report = json!({
        "K_A": round12(k_a),
        "K_B": round12(k_b),
        "alpha": round12(alpha_from_kb(k_b)?),
        "coefficients": coeffs(projected.map(|c| c.re)),
        "coefficients_closed_form": coeffs(closed.coefficients),
        "purity_closed": round12(purity_closed),
        "purity_numeric": round12(purity_numeric),
        "visibility": round12(visibility_report(k_b)?.visibility),
    });
    Ok(render_json(&report))
}

/// Seeded random checks of the core invariants. Fails with an invariant
/// error if any check exceeds its tolerance.
pub fn cmd_self_test(seed: u64, trials: usize) -> CliResult<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: BTreeMap<&str, f64> = BTreeMap::new();
    let mut record = |name: &'static str, err: f64| {
        let w = worst.entry(name).or_insert(0.0);
        *w = w.max(err);
    };
    let reg = DofRegistry::shared(vec![Dof::new("pol", ["H", "V"]), Dof::new("path", ["u", "d"])])?;
    for _ in 0..trials {
        let da = 1 + (rand::Rng::random_range(&mut rng, 0..3usize));
        let db = 1 + (rand::Rng::random_range(&mut rng, 0..3usize));
        let a = SchmidtSpec::from_coefficients(random_schmidt_coefficients(da, &mut rng))?;
        let b = SchmidtSpec::from_coefficients(random_schmidt_coefficients(db, &mut rng))?;
        let numeric = purity_from_kernels(&a.pair_kernel(), &b.pair_kernel())?;
        record("purity", (numeric - purity_closed_form(a.k(), b.k())?).abs());

        let u = random_unitary(reg.mode_count(), &mut rng);
        let g = ModeUnitary::from_mode_matrix(&reg, u.clone())?;
        let n = 1 + rand::Rng::random_range(&mut rng, 0..4usize);
        let psi = random_fock_state(&reg, n, 4, &mut rng);
        let lhs = fock_to_sym(&g.apply(&psi)?)?;
        let rhs = fock_to_sym(&psi)?.apply_per_slot(&u)?;
        let err = lhs
            .iter()
            .chain(rhs.iter())
            .map(|(t, _)| (lhs.amplitude(t) - rhs.amplitude(t)).norm())
            .fold(0.0, f64::max);
        record("gate_oracle", err);

        let f = singlet_invariance(&random_unitary(2, &mut rng))?;
        record("singlet_invariance", (f - 1.0).abs());
    }
    let tol: BTreeMap<&str, f64> = [("purity", 1e-10), ("gate_oracle", 1e-10), ("singlet_invariance", 1e-10)].into();
    let failed: Vec<&str> = worst.iter().filter(|(k, v)| **v > tol[*k]).map(|(k, _)| *k).collect();
    if !failed.is_empty() {
        return Err(CliError::Invariant(format!("self-test failed: {}", failed.join(", "))));
    }
    let report = json!({
        "seed": seed,
        "trials": trials,
        "max_error": worst.iter().map(|(k, v)| (k.to_string(), json!(fmt_float(*v)))).collect::<serde_json::Map<_, _>>(),
        "passed": true,
    });
    Ok(render_json(&report))
}
