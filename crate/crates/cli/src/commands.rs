//! One function per subcommand. Each returns the CSV payload plus derived
//! scalars for the JSON sidecar; nothing here touches the filesystem except
//! reading the CSV inputs named in the config.

use qnoise_core::gaussian::{evasion_angle, variance_db};
use qnoise_core::optimize::{find_f_sql, optimize_band_angle_injected, BandCost};
use qnoise_core::optomech::{
    quantum_budget_injected, quantum_noise_unsqueezed, sql_spectrum, total_noise, Component,
    QuantumBudget,
};
use qnoise_core::probes::{decoherence_upper_bound, DEFAULT_BOUND_TOLERANCE};
use qnoise_core::squeezer::{effective_db_with_efficiency, lossy_variances};
use qnoise_core::{
    BandObjective, CovarianceState, FrequencyGrid, InjectedVariances, NoiseSpectrum,
};
use serde_json::{json, Map, Value};

use crate::config::{deg_to_rad, rad_to_deg, RunConfig};
use crate::error::{CliError, Result};
use crate::table::{fmt_num, interpolate_loglog, read_two_column, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Budget,
    Sql,
    OptimizeAngle,
    LossChain,
    State,
    DecoherenceBound,
    Marshall,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Budget => "budget",
            CommandKind::Sql => "sql",
            CommandKind::OptimizeAngle => "optimize-angle",
            CommandKind::LossChain => "loss-chain",
            CommandKind::State => "state",
            CommandKind::DecoherenceBound => "decoherence-bound",
            CommandKind::Marshall => "marshall",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    pub band: Option<(f64, f64)>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub csv: String,
    pub derived: Map<String, Value>,
    /// Human-readable lines for stderr.
    pub notes: Vec<String>,
}

pub fn run(kind: CommandKind, cfg: &RunConfig, opts: &RunOptions) -> Result<CommandOutput> {
    match kind {
        CommandKind::Budget => cmd_budget(cfg),
        CommandKind::Sql => cmd_sql(cfg),
        CommandKind::OptimizeAngle => cmd_optimize_angle(cfg, opts),
        CommandKind::LossChain => cmd_loss_chain(cfg),
        CommandKind::State => cmd_state(cfg),
        CommandKind::DecoherenceBound => cmd_decoherence_bound(cfg, opts),
        CommandKind::Marshall => cmd_marshall(cfg),
    }
}

/// Sidecar document: config echo, tool version and derived scalars.
pub fn sidecar(kind: CommandKind, cfg: &RunConfig, out: &CommandOutput) -> Value {
    json!({
        "tool": "qnoise",
        "version": env!("CARGO_PKG_VERSION"),
        "command": kind.name(),
        "config": cfg,
        "derived": out.derived,
    })
}

fn numerical(e: qnoise_core::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

fn load_spectrum(
    cfg: &RunConfig,
    field: &str,
    path: &std::path::Path,
    grid: &FrequencyGrid,
    component: Component,
) -> Result<NoiseSpectrum> {
    let data = read_two_column(&cfg.resolve(path), field)?;
    let values = interpolate_loglog(&data, grid, field)?;
    NoiseSpectrum::new(grid.clone(), component, values).map_err(|e| CliError::core(field, e))
}

/// Injected variances, angle and a summary for the sidecar; vacuum when the
/// squeezer section is absent.
type Injection = (InjectedVariances, f64, Option<Map<String, Value>>);

fn injection(cfg: &RunConfig) -> Result<Injection> {
    let Some(sq) = cfg.squeezer()? else {
        return Ok((InjectedVariances::VACUUM, 0.0, None));
    };
    let eta = sq.chain.efficiency();
    let v = sq.detected_variances();
    let (sq_db, anti_db) = effective_db_with_efficiency(sq.generated_db, eta)
        .map_err(|e| CliError::core("squeezer", e))?;
    let mut info = Map::new();
    info.insert("generated_db".into(), json!(sq.generated_db));
    info.insert("squeeze_factor_r".into(), json!(sq.squeeze_factor()));
    info.insert("angle_deg".into(), json!(rad_to_deg(sq.angle)));
    info.insert("chain_efficiency".into(), json!(eta));
    info.insert("detected_squeezed_db".into(), json!(sq_db));
    info.insert("detected_antisqueezed_db".into(), json!(anti_db));
    Ok((v, sq.angle, Some(info)))
}

fn quantum_budget(cfg: &RunConfig, grid: &FrequencyGrid) -> Result<(QuantumBudget, Option<Map<String, Value>>)> {
    let ifo = cfg.interferometer()?;
    let (v, theta, info) = injection(cfg)?;
    let budget = if info.is_some() {
        quantum_budget_injected(&ifo, &v, theta, grid)
    } else {
        quantum_noise_unsqueezed(&ifo, grid)
    }
    .map_err(|e| CliError::core("interferometer", e))?;
    Ok((budget, info))
}

fn classical(cfg: &RunConfig, grid: &FrequencyGrid) -> Result<Option<NoiseSpectrum>> {
    cfg.classical_noise_csv
        .as_ref()
        .map(|p| load_spectrum(cfg, "classical_noise_csv", p, grid, Component::Classical))
        .transpose()
}

pub fn cmd_budget(cfg: &RunConfig) -> Result<CommandOutput> {
    let ifo = cfg.interferometer()?;
    let grid = cfg.grid()?;
    let (budget, sq_info) = quantum_budget(cfg, &grid)?;
    let sql = sql_spectrum(ifo.mirror_mass, &grid).map_err(|e| CliError::core("interferometer", e))?;
    let classical = classical(cfg, &grid)?;
    let total = classical
        .as_ref()
        .map(|c| total_noise(&budget.total, c))
        .transpose()
        .map_err(|e| CliError::core("classical_noise_csv", e))?;

    let mut table = Table::new(["f_hz", "qmn", "qbn", "total_quantum", "sql", "classical", "total"]);
    for (i, f) in grid.iter().enumerate() {
        let opt = |s: &Option<NoiseSpectrum>| s.as_ref().map(|s| fmt_num(s.values()[i])).unwrap_or_default();
        table.push(vec![
            fmt_num(f),
            fmt_num(budget.qmn.values()[i]),
            fmt_num(budget.qbn.values()[i]),
            fmt_num(budget.total.values()[i]),
            fmt_num(sql.values()[i]),
            opt(&classical),
            opt(&total),
        ]);
    }

    let ratios: Vec<f64> = budget
        .total
        .values()
        .iter()
        .zip(sql.values())
        .map(|(q, s)| q / s)
        .collect();
    let (imin, rmin) = ratios
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("grid is non-empty");
    let sub_sql: Vec<f64> = grid.iter().zip(&ratios).filter(|(_, r)| **r < 1.0).map(|(f, _)| f).collect();
    let f_sql = find_f_sql(&ifo).map_err(numerical)?;

    let mut derived = Map::new();
    derived.insert("f_sql_hz".into(), json!(f_sql));
    derived.insert("arm_power_w".into(), json!(ifo.arm_power));
    derived.insert("min_quantum_to_sql_ratio".into(), json!(rmin));
    derived.insert("min_ratio_frequency_hz".into(), json!(grid.points()[imin]));
    derived.insert("sub_sql_bins".into(), json!(sub_sql.len()));
    if let (Some(lo), Some(hi)) = (sub_sql.first(), sub_sql.last()) {
        derived.insert("sub_sql_range_hz".into(), json!([lo, hi]));
    }
    if let Some(info) = sq_info {
        derived.insert("squeezer".into(), Value::Object(info));
    }
    let mut notes = vec![format!("f_SQL = {f_sql:.6} Hz")];
    notes.push(if sub_sql.is_empty() {
        "total quantum noise is at or above the SQL at every bin".to_string()
    } else {
        format!(
            "total quantum noise below the SQL in {} bins between {:.3} and {:.3} Hz (minimum {:.4} x SQL at {:.3} Hz)",
            sub_sql.len(),
            sub_sql[0],
            sub_sql[sub_sql.len() - 1],
            rmin,
            grid.points()[imin]
        )
    });
    Ok(CommandOutput {
        csv: table.to_csv(),
        derived,
        notes,
    })
}

pub fn cmd_sql(cfg: &RunConfig) -> Result<CommandOutput> {
    let ifo = cfg.interferometer()?;
    let grid = cfg.grid()?;
    let sql = sql_spectrum(ifo.mirror_mass, &grid).map_err(|e| CliError::core("interferometer", e))?;
    let mut table = Table::new(["f_hz", "sql_asd", "sql_psd", "kimble_factor", "readout_rotation_deg"]);
    for (f, s) in grid.iter().zip(sql.values()) {
        let k = ifo.kimble_factor(f).map_err(|e| CliError::core("grid", e))?;
        table.push(vec![
            fmt_num(f),
            fmt_num(s.sqrt()),
            fmt_num(*s),
            fmt_num(k),
            fmt_num(rad_to_deg(k.atan())),
        ]);
    }
    let f_sql = find_f_sql(&ifo).map_err(numerical)?;
    let mut derived = Map::new();
    derived.insert("f_sql_hz".into(), json!(f_sql));
    derived.insert("arm_power_w".into(), json!(ifo.arm_power));
    derived.insert("coupling_strength_per_s3".into(), json!(ifo.coupling_strength()));
    Ok(CommandOutput {
        csv: table.to_csv(),
        derived,
        notes: vec![format!("f_SQL = {f_sql:.6} Hz")],
    })
}

pub fn cmd_optimize_angle(cfg: &RunConfig, opts: &RunOptions) -> Result<CommandOutput> {
    let ifo = cfg.interferometer()?;
    let grid = cfg.grid()?;
    let (lo, hi) = cfg.band(opts.band)?;
    let obj = BandObjective::new(lo, hi, cfg.weighting.unwrap_or_default())
        .map_err(|e| CliError::core("band", e))?;
    let (v, _, sq_info) = injection(cfg)?;
    let cost = BandCost::new(&ifo, v, &obj, &grid).map_err(|e| CliError::core("band", e))?;
    let opt = optimize_band_angle_injected(&ifo, v, &obj, &grid).map_err(|e| match e {
        qnoise_core::Error::NoConvergence(_) => numerical(e),
        other => CliError::core("band", other),
    })?;

    let mut table = Table::new(["angle_deg", "cost"]);
    for deg in 0..=90 {
        let d = deg as f64;
        table.push(vec![fmt_num(d), fmt_num(cost.eval(deg_to_rad(d)))]);
    }
    let mut derived = Map::new();
    derived.insert("theta_opt_deg".into(), json!(rad_to_deg(opt.angle)));
    derived.insert("cost".into(), json!(opt.cost));
    derived.insert("flat".into(), json!(opt.flat));
    derived.insert("band_hz".into(), json!([lo, hi]));
    derived.insert("band_bins".into(), json!(cost.bins()));
    derived.insert("weighting".into(), json!(obj.weighting));
    if let Some(info) = sq_info {
        derived.insert("squeezer".into(), Value::Object(info));
    }
    let mut notes = vec![format!(
        "optimal injection angle {:.4} deg over [{lo}, {hi}] Hz, cost {:.6e}",
        rad_to_deg(opt.angle),
        opt.cost
    )];
    if opt.flat {
        notes.push("cost does not depend on the angle (no squeezing)".into());
    }
    Ok(CommandOutput {
        csv: table.to_csv(),
        derived,
        notes,
    })
}

pub fn cmd_loss_chain(cfg: &RunConfig) -> Result<CommandOutput> {
    let sq = cfg
        .squeezer()?
        .ok_or_else(|| CliError::config("squeezer", "section required by this command"))?;
    let mut table = Table::new([
        "stage",
        "label",
        "efficiency",
        "cumulative_efficiency",
        "squeezed_db",
        "antisqueezed_db",
        "uncertainty_product",
    ]);
    let mut push = |i: usize, label: &str, eff: f64, cum: f64| -> Result<()> {
        let (s, a) = effective_db_with_efficiency(sq.generated_db, cum)
            .map_err(|e| CliError::core("squeezer", e))?;
        let v = lossy_variances(sq.generated_db, cum);
        table.push(vec![
            i.to_string(),
            label.to_string(),
            fmt_num(eff),
            fmt_num(cum),
            fmt_num(s),
            fmt_num(a),
            fmt_num((v.squeezed * v.antisqueezed).sqrt()),
        ]);
        Ok(())
    };
    push(0, "generated", 1.0, 1.0)?;
    for (i, (stage, cum)) in sq.chain.cumulative().enumerate() {
        push(i + 1, &stage.label, stage.efficiency, cum)?;
    }
    let eta = sq.chain.efficiency();
    let (s, a) = effective_db_with_efficiency(sq.generated_db, eta).map_err(|e| CliError::core("squeezer", e))?;
    let v = lossy_variances(sq.generated_db, eta);
    let product = (v.squeezed * v.antisqueezed).sqrt();
    let mut derived = Map::new();
    derived.insert("chain_efficiency".into(), json!(eta));
    derived.insert("squeezed_db".into(), json!(s));
    derived.insert("antisqueezed_db".into(), json!(a));
    derived.insert("uncertainty_product".into(), json!(product));
    derived.insert("purity".into(), json!(1.0 / product));
    Ok(CommandOutput {
        csv: table.to_csv(),
        derived,
        notes: vec![format!(
            "total efficiency {eta:.4}: squeezing {s:+.3} dB, anti-squeezing {a:+.3} dB, uncertainty product {product:.4}"
        )],
    })
}

pub fn cmd_state(cfg: &RunConfig) -> Result<CommandOutput> {
    let mut state = match cfg.squeezer()? {
        None => CovarianceState::vacuum(),
        Some(sq) => CovarianceState::injected(sq.squeeze_factor(), sq.angle)
            .and_then(|s| s.loss_channel(sq.chain.efficiency()))
            .map_err(|e| CliError::core("squeezer", e))?,
    };
    let mut derived = Map::new();
    if let Some(f) = cfg.state.as_ref().and_then(|s| s.ponderomotive_at_hz) {
        let ifo = cfg.interferometer()?;
        let k = ifo
            .kimble_factor(f)
            .map_err(|e| CliError::core("state.ponderomotive_at_hz", e))?;
        state = state
            .ponderomotive(k)
            .map_err(|e| CliError::core("state.ponderomotive_at_hz", e))?;
        derived.insert("kimble_factor".into(), json!(k));
        let zeta = evasion_angle(k).map_err(|e| CliError::core("state.ponderomotive_at_hz", e))?;
        derived.insert("evasion_angle_deg".into(), json!(rad_to_deg(zeta)));
    }
    let mut table = Table::new(["homodyne_angle_deg", "variance", "variance_db"]);
    for deg in 0..180 {
        let d = deg as f64;
        let v = state.homodyne_variance(deg_to_rad(d));
        table.push(vec![fmt_num(d), fmt_num(v), fmt_num(variance_db(v))]);
    }
    let axes = state.principal_axes();
    derived.insert("cxx".into(), json!(state.cxx()));
    derived.insert("cyy".into(), json!(state.cyy()));
    derived.insert("cxy".into(), json!(state.cxy()));
    derived.insert("purity".into(), json!(state.purity()));
    derived.insert("uncertainty_product".into(), json!(state.uncertainty_product()));
    derived.insert("min_variance_angle_deg".into(), json!(rad_to_deg(axes.min_angle)));
    derived.insert("min_variance".into(), json!(axes.min_variance));
    derived.insert("max_variance".into(), json!(axes.max_variance));
    Ok(CommandOutput {
        csv: table.to_csv(),
        derived,
        notes: vec![format!(
            "purity {:.4}, principal variances {:.4e} / {:.4e} ({:+.2} / {:+.2} dB), minimum at {:.2} deg",
            state.purity(),
            axes.min_variance,
            axes.max_variance,
            variance_db(axes.min_variance),
            variance_db(axes.max_variance),
            rad_to_deg(axes.min_angle)
        )],
    })
}

pub fn cmd_decoherence_bound(cfg: &RunConfig, opts: &RunOptions) -> Result<CommandOutput> {
    let ifo = cfg.interferometer()?;
    let grid = cfg.grid()?;
    let band = cfg.band(opts.band)?;
    let tol = opts.tol.unwrap_or(DEFAULT_BOUND_TOLERANCE);
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(CliError::config("--tol", format!("must be >= 0, got {tol}")));
    }
    let path = cfg
        .observed_noise_csv
        .as_ref()
        .ok_or_else(|| CliError::config("observed_noise_csv", "required by this command"))?;
    let observed = load_spectrum(cfg, "observed_noise_csv", path, &grid, Component::Total)?;
    let (budget, _) = quantum_budget(cfg, &grid)?;
    let model = match classical(cfg, &grid)? {
        Some(c) => total_noise(&budget.total, &c).map_err(|e| CliError::core("classical_noise_csv", e))?,
        None => budget.total,
    };
    let sql = sql_spectrum(ifo.mirror_mass, &grid).map_err(|e| CliError::core("interferometer", e))?;
    let bound = decoherence_upper_bound(&model, &observed, &sql, band, tol)
        .map_err(|e| CliError::core("band", e))?;

    let mut table = Table::new(["f_hz", "model", "observed", "sql", "headroom", "sub_sql_margin"]);
    for m in &bound.margins {
        table.push(vec![
            fmt_num(m.f),
            fmt_num(m.model),
            fmt_num(m.observed),
            fmt_num(m.sql),
            fmt_num(m.headroom),
            fmt_num(m.sub_sql_margin),
        ]);
    }
    let sub_sql = bound.margins.iter().filter(|m| m.sub_sql_margin > 0.0).count();
    let mut derived = Map::new();
    derived.insert("bound_m2_per_hz".into(), json!(bound.bound));
    derived.insert("limiting_frequency_hz".into(), json!(bound.limiting_frequency));
    derived.insert("tol".into(), json!(tol));
    derived.insert("band_hz".into(), json!([band.0, band.1]));
    derived.insert("sub_sql_bins".into(), json!(sub_sql));
    Ok(CommandOutput {
        csv: table.to_csv(),
        derived,
        notes: vec![format!(
            "additional displacement noise bounded by {:.4e} m^2/Hz (limited at {:.3} Hz, tol {tol})",
            bound.bound, bound.limiting_frequency
        )],
    })
}

/// Relative deviation above which a quoted width is flagged.
const WIDTH_DISCREPANCY_RTOL: f64 = 0.05;

pub fn cmd_marshall(cfg: &RunConfig) -> Result<CommandOutput> {
    let osc = cfg.oscillator()?;
    let width = osc.zero_point_width();
    let quoted = osc.quoted_width();
    let ratio = quoted.map(|q| q / width);
    let flagged = ratio.is_some_and(|r| (r - 1.0).abs() > WIDTH_DISCREPANCY_RTOL);

    let mut table = Table::new([
        "mass_kg",
        "resonance_hz",
        "formula_width_m",
        "quoted_width_m",
        "quoted_over_formula",
        "discrepancy",
    ]);
    table.push(vec![
        fmt_num(osc.mass),
        fmt_num(osc.resonance),
        fmt_num(width),
        quoted.map(fmt_num).unwrap_or_default(),
        ratio.map(fmt_num).unwrap_or_default(),
        flagged.to_string(),
    ]);
    let mut derived = Map::new();
    derived.insert("zero_point_width_m".into(), json!(width));
    derived.insert("quoted_width_m".into(), json!(quoted));
    derived.insert("discrepancy".into(), json!(flagged));
    let mut notes = vec![format!("ground-state half-width sqrt(hbar/(4 pi m f_m)) = {width:.4e} m")];
    if let (true, Some(q), Some(r)) = (flagged, quoted, ratio) {
        notes.push(format!(
            "warning: the quoted half-width {q:.1e} m for this oscillator is {r:.2}x the formula value; the formula value is reported"
        ));
    }
    Ok(CommandOutput {
        csv: table.to_csv(),
        derived,
        notes,
    })
}
