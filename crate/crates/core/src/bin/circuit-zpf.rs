use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use circuit_zpf::circuit::{reference_network, BuiltinCircuit, CircuitError, CircuitId, CircuitNetwork, ReferenceCircuit};
use circuit_zpf::figures::{self, lin_grid, log_grid, FigureError, FigureId, FigureOptions};
use circuit_zpf::forces::{force, sweep_force, CapacitorGeometry, ForceError, ForceMethod, PotentialModel, SweepParam};
use circuit_zpf::metrology::{
    modulation_depth, snr_report, BandwidthConvention, MeasurementConfig, MechanicalMode, MetrologyError,
};
use circuit_zpf::netlist;
use circuit_zpf::qubit::{level_shift, shift_tail_fraction, TransmonParams, VoltageSpectrum};
use circuit_zpf::report::{sweep_table, Cell, Format, Table};
use circuit_zpf::zeropoint::{check_validity, closed_form, energy_raw, energy_renormalized, EnergyError};
use circuit_zpf::{QuadratureConfig, ValidityParams, ZeroPointConfig};

const SCHEMA: &str = "\
Output columns (CSV header row; JSON is an array of objects with the same keys):
  energy    C_F, energy_J, closed_form_J, renormalized, reference_energy_defined,
            abs_error_J, decay_exponent, tail_fraction, valid, time_scale_s
  force     xi, C_F, dC_dxi, force_N, valid, renormalized, tail_fraction
  sweep     param, force_N, valid, renormalized, tag, error            (--quantity force)
            param, delta_over_omega10, gamma_over_omega10, valid,
            renormalized, tag, error                                  (--quantity shift)
  figure    2b/2c: circuit|a, r, U_over_U0, U_over_U0_quadrature, valid, renormalized
            3a/3b: sweep columns, tag = II or casimir
            4a-4c: R, C0|L, force_N, valid, renormalized, error
            4d:    R, C, delta_over_omega10, gamma_over_omega10, valid, renormalized, error
  snr       tag, force_N, eta, x_dc_m, x_zp_m, static_feasible, x_s_m, x_n_m, snr, valid, renormalized
  validate  check, value, ok
Numbers are printed with 12 significant digits. Values accept SI suffixes (p n u m k M G).
Exit status: 0 success, 1 input error, 2 numerical failure.";

#[derive(Parser)]
#[command(
    name = "circuit-zpf",
    version,
    about = "Zero-point fluctuation potentials, forces and qubit shifts in lumped circuits",
    after_help = SCHEMA
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Zero-point energy of the probed capacitor.
    Energy {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Probed capacitance (F); overrides the plate geometry.
        #[arg(long = "C", value_parser = si)]
        c: Option<f64>,
        /// Subtract the reference-circuit integrand.
        #[arg(long)]
        renormalize: bool,
        #[command(flatten)]
        numerics: NumericArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Force on the plate separation at a single point.
    Force {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Analytic)]
        method: MethodArg,
        #[command(flatten)]
        numerics: NumericArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Force or qubit shift along a grid of one parameter.
    Sweep {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[command(flatten)]
        geometry: GeometryArgs,
        /// `y` for the plate separation, or a circuit parameter / element name.
        #[arg(long)]
        vary: String,
        #[arg(long, value_parser = si)]
        from: f64,
        #[arg(long, value_parser = si)]
        to: f64,
        #[arg(long, default_value_t = 21)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Spacing::Log)]
        spacing: Spacing,
        #[arg(long, value_enum, default_value_t = Quantity::Force)]
        quantity: Quantity,
        #[command(flatten)]
        transmon: TransmonArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Analytic)]
        method: MethodArg,
        #[command(flatten)]
        numerics: NumericArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Dataset behind one of the standard plots (2b, 2c, 3a, 3b, 4a, 4b, 4c, 4d).
    Figure {
        id: String,
        /// Grid points per axis.
        #[arg(long)]
        points: Option<usize>,
        #[arg(long, value_parser = si)]
        diameter: Option<f64>,
        #[arg(long, value_parser = si)]
        y: Option<f64>,
        #[command(flatten)]
        numerics: NumericArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Signal-to-noise of the dynamic force measurement.
    Snr {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Use this force (N) instead of computing one.
        #[arg(long, value_parser = si)]
        force: Option<f64>,
        /// Mechanical mass (kg).
        #[arg(long, default_value = "48e-15", value_parser = si)]
        mass: f64,
        /// Mechanical resonance (Hz).
        #[arg(long, default_value = "10.56M", value_parser = si)]
        frequency: f64,
        #[arg(long = "quality", default_value = "330k", value_parser = si)]
        quality: f64,
        /// Displacement noise floor S_N (m²/Hz).
        #[arg(long = "s-n", default_value = "1e-32", value_parser = si)]
        s_n: f64,
        /// B/Γ.
        #[arg(long, default_value_t = 0.01)]
        bandwidth_fraction: f64,
        /// Convert B from rad/s to Hz (divides by 2π).
        #[arg(long)]
        hertz: bool,
        /// Fixed modulation depth η.
        #[arg(long, default_value_t = 0.05)]
        eta: f64,
        /// Derive η from modulating this circuit parameter instead.
        #[arg(long)]
        modulate: Option<String>,
        /// Relative modulation amplitude u for --modulate.
        #[arg(long, default_value_t = 0.05)]
        amplitude: f64,
        #[command(flatten)]
        numerics: NumericArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Lint a netlist and check the lumped-element validity cutoff.
    Validate {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long = "C", value_parser = si)]
        c: Option<f64>,
        #[command(flatten)]
        numerics: NumericArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Clone, Default)]
struct CircuitArgs {
    /// Built-in circuit: I, II, III, IV or parallel-rc.
    #[arg(long, conflicts_with = "netlist")]
    circuit: Option<CircuitId>,
    /// Netlist file.
    #[arg(long)]
    netlist: Option<PathBuf>,
    #[arg(long = "R", value_parser = si, conflicts_with = "netlist")]
    r: Option<f64>,
    #[arg(long = "L", value_parser = si, conflicts_with = "netlist")]
    l: Option<f64>,
    #[arg(long = "C0", value_parser = si, conflicts_with = "netlist")]
    c0: Option<f64>,
    /// NAME=VALUE override (built-in parameter or netlist element), repeatable.
    #[arg(long = "param", value_parser = param_pair)]
    params: Vec<(String, f64)>,
}

#[derive(Args, Clone, Default)]
struct GeometryArgs {
    /// Plate diameter (m).
    #[arg(long, value_parser = si, conflicts_with = "area")]
    diameter: Option<f64>,
    /// Plate area (m²).
    #[arg(long, value_parser = si)]
    area: Option<f64>,
    /// Plate separation (m).
    #[arg(long, value_parser = si)]
    y: Option<f64>,
}

#[derive(Args, Clone)]
struct NumericArgs {
    #[arg(long, default_value_t = 1e-9)]
    rel_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    abs_tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_panels: usize,
    /// Element size l (m) setting the validity cutoff c/l.
    #[arg(long, default_value = "10u", value_parser = si)]
    element_size: f64,
    /// Largest admissible share of the integrand beyond c/l.
    #[arg(long, default_value_t = 1e-2)]
    max_tail_fraction: f64,
}

#[derive(Args, Clone)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct TransmonArgs {
    /// √(E_C/8E_J).
    #[arg(long, default_value_t = 0.1)]
    ratio: f64,
    /// C_g/C_J.
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    /// ω0/2π (Hz).
    #[arg(long, default_value = "5G", value_parser = si)]
    f0: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Analytic,
    Fd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Spacing {
    Log,
    Lin,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Quantity {
    Force,
    Shift,
}

fn si(s: &str) -> Result<f64, String> {
    netlist::parse_value(s)
}

fn param_pair(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    if k.is_empty() {
        return Err("empty parameter name".into());
    }
    Ok((k.to_string(), si(v)?))
}

enum CliError {
    Input(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }
}

fn circuit_err(e: &CircuitError) -> CliError {
    match e {
        CircuitError::Singular { .. } => CliError::Numeric(e.to_string()),
        _ => CliError::Input(e.to_string()),
    }
}

impl From<EnergyError> for CliError {
    fn from(e: EnergyError) -> Self {
        match &e {
            EnergyError::InvalidCapacitance(_) | EnergyError::InvalidParameter(_) => CliError::Input(e.to_string()),
            EnergyError::Circuit(c) => circuit_err(c),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<ForceError> for CliError {
    fn from(e: ForceError) -> Self {
        match e {
            ForceError::Energy(e) => e.into(),
            ForceError::Circuit(c) => circuit_err(&c),
            ForceError::Geometry(_) | ForceError::InvalidGrid(_) => CliError::Input(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<FigureError> for CliError {
    fn from(e: FigureError) -> Self {
        match e {
            FigureError::Unknown(_) | FigureError::InvalidOption(_) => CliError::Input(e.to_string()),
            FigureError::Force(f) => f.into(),
            FigureError::Energy(f) => f.into(),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<MetrologyError> for CliError {
    fn from(e: MetrologyError) -> Self {
        match e {
            MetrologyError::InvalidParameter(_) => CliError::Input(e.to_string()),
            MetrologyError::Force(f) => f.into(),
            MetrologyError::ZeroForce => CliError::Numeric(e.to_string()),
        }
    }
}

fn warn(msg: impl AsRef<str>) {
    eprintln!("warning: {}", msg.as_ref());
}

fn numerics(n: &NumericArgs) -> Result<ZeroPointConfig, CliError> {
    for (name, v) in [
        ("rel-tol", n.rel_tol),
        ("abs-tol", n.abs_tol),
        ("element-size", n.element_size),
        ("max-tail-fraction", n.max_tail_fraction),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::Input(format!("--{name} must be positive, got {v}")));
        }
    }
    if n.max_panels == 0 {
        return Err(CliError::Input("--max-panels must be positive".into()));
    }
    Ok(ZeroPointConfig {
        quad: QuadratureConfig {
            rel_tol: n.rel_tol,
            abs_tol: n.abs_tol,
            max_panels: n.max_panels,
        },
        validity: ValidityParams {
            element_size: n.element_size,
            max_tail_fraction: n.max_tail_fraction,
        },
    })
}

fn builtin_defaults(id: CircuitId) -> Vec<(&'static str, f64)> {
    let all = [("R", 10.0), ("L", 0.1e-9), ("C0", 31.3e-15), ("C", 1e-12)];
    all.into_iter().filter(|(n, _)| id.params().contains(n)).collect()
}

fn load_model(a: &CircuitArgs) -> Result<PotentialModel, CliError> {
    if let Some(path) = &a.netlist {
        let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let mut net = netlist::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        for (k, v) in &a.params {
            net = net.with_value(k, *v).map_err(|e| circuit_err(&e))?;
        }
        return Ok(PotentialModel::Network(net));
    }
    let id = a
        .circuit
        .ok_or_else(|| CliError::Input("one of --circuit or --netlist is required".into()))?;
    let mut params = builtin_defaults(id);
    let named = [("R", a.r), ("L", a.l), ("C0", a.c0)];
    for (name, v) in named {
        if let Some(v) = v {
            if !id.params().contains(&name) {
                return Err(CliError::Input(format!("circuit {id} has no parameter {name}")));
            }
            params.push((name, v));
        }
    }
    let mut circuit = BuiltinCircuit::from_params(id, &params).map_err(|e| circuit_err(&e))?;
    for (k, v) in &a.params {
        circuit = circuit.with_param(k, *v).map_err(|e| circuit_err(&e))?;
    }
    Ok(PotentialModel::Builtin(circuit))
}

fn load_geometry(g: &GeometryArgs) -> Result<(CapacitorGeometry, f64), CliError> {
    let geom = match (g.area, g.diameter) {
        (Some(a), _) => CapacitorGeometry::parallel_plate_area(a),
        (None, d) => CapacitorGeometry::parallel_plate_diameter(d.unwrap_or(figures::DEFAULT_DIAMETER)),
    }
    .map_err(CliError::from)?;
    Ok((geom, g.y.unwrap_or(figures::DEFAULT_SEPARATION)))
}

fn probe_capacitance(c: Option<f64>, g: &GeometryArgs) -> Result<f64, CliError> {
    match c {
        Some(c) => Ok(c),
        None => {
            let (geom, y) = load_geometry(g)?;
            Ok(geom.eval(y).map_err(CliError::from)?.0)
        }
    }
}

fn emit(table: &Table, out: &OutputArgs) -> Result<(), CliError> {
    let format = match out.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let text = table.render(format).map_err(|e| CliError::Numeric(e.to_string()))?;
    match &out.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Numeric(format!("stdout: {e}"))),
    }
}

fn method(m: MethodArg) -> ForceMethod {
    match m {
        MethodArg::Analytic => ForceMethod::Analytic,
        MethodArg::Fd => ForceMethod::FiniteDifference,
    }
}

fn cmd_energy(
    circuit: &CircuitArgs,
    geometry: &GeometryArgs,
    c: Option<f64>,
    renormalize: bool,
    cfg: &ZeroPointConfig,
) -> Result<Table, CliError> {
    let model = load_model(circuit)?;
    let c = probe_capacitance(c, geometry)?;
    let net = model.network();
    let res = if renormalize {
        energy_renormalized(&net, c, cfg)?
    } else {
        energy_raw(&net, c, cfg)?
    };
    if !res.validity_ok {
        warn(format!(
            "{:.3e} of the integrand lies beyond the lumped-element cutoff",
            res.tail_fraction_beyond_cutoff
        ));
    }
    if res.renormalized && !res.reference_energy_defined {
        warn("the reference circuit's own energy diverges; only the difference is finite");
    }
    let closed: Cell = match &model {
        PotentialModel::Builtin(b) if renormalize || !matches!(reference_network(&net), ReferenceCircuit::Network(_)) => {
            closed_form(b, c, &cfg.quad).transpose()?.into()
        }
        _ => Cell::Empty,
    };
    let mut t = Table::new([
        "C_F",
        "energy_J",
        "closed_form_J",
        "renormalized",
        "reference_energy_defined",
        "abs_error_J",
        "decay_exponent",
        "tail_fraction",
        "valid",
        "time_scale_s",
    ]);
    t.rows.push(vec![
        c.into(),
        res.energy.into(),
        closed,
        res.renormalized.into(),
        res.reference_energy_defined.into(),
        res.abs_error_estimate.into(),
        res.decay_exponent.into(),
        res.tail_fraction_beyond_cutoff.into(),
        res.validity_ok.into(),
        res.time_scale.into(),
    ]);
    Ok(t)
}

fn cmd_force(circuit: &CircuitArgs, geometry: &GeometryArgs, m: MethodArg, cfg: &ZeroPointConfig) -> Result<Table, CliError> {
    let model = load_model(circuit)?;
    let (geom, y) = load_geometry(geometry)?;
    let p = force(&model, &geom, y, method(m), cfg)?;
    if !p.validity_ok {
        warn(format!("validity cutoff violated (tail fraction {:.3e})", p.tail_fraction));
    }
    let mut t = Table::new(["xi", "C_F", "dC_dxi", "force_N", "valid", "renormalized", "tail_fraction"]);
    t.rows.push(vec![
        y.into(),
        p.capacitance.into(),
        p.dc_dxi.into(),
        p.force.into(),
        p.validity_ok.into(),
        p.renormalized.into(),
        p.tail_fraction.into(),
    ]);
    Ok(t)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    circuit: &CircuitArgs,
    geometry: &GeometryArgs,
    vary: &str,
    (from, to, points, spacing): (f64, f64, usize, Spacing),
    quantity: Quantity,
    transmon: &TransmonArgs,
    m: MethodArg,
    cfg: &ZeroPointConfig,
) -> Result<Table, CliError> {
    if points == 0 {
        return Err(CliError::Input("--points must be at least 1".into()));
    }
    let grid = match spacing {
        Spacing::Log => log_grid(from, to, points),
        Spacing::Lin => lin_grid(from, to, points),
    };
    let model = load_model(circuit)?;
    let tag = match &model {
        PotentialModel::Builtin(b) => b.id().as_str().to_string(),
        PotentialModel::Network(_) => "netlist".to_string(),
    };
    let param = SweepParam::parse(vary);
    let table = match quantity {
        Quantity::Force => {
            let (geom, y) = load_geometry(geometry)?;
            let sweep = sweep_force(&model, &geom, y, &param, &grid, method(m), cfg)?;
            if sweep.reference_varies {
                warn(format!("the reference circuit changes along {}; forces are relative to a moving reference", sweep.param));
            }
            sweep_table(&sweep, &tag)
        }
        Quantity::Shift => {
            let SweepParam::Circuit(name) = &param else {
                return Err(CliError::Input("a shift sweep varies a circuit parameter, not y".into()));
            };
            let tp = TransmonParams::from_ratio(2.0 * PI * transmon.f0, transmon.ratio, transmon.beta)
                .map_err(|e| CliError::Input(e.to_string()))?;
            for w in tp.warnings() {
                warn(w);
            }
            model.with_param(name, grid[0])?;
            let w10 = tp.omega10();
            let mut t = Table::new([
                "param",
                "delta_over_omega10",
                "gamma_over_omega10",
                "valid",
                "renormalized",
                "tag",
                "error",
            ]);
            let rows: Vec<Vec<Cell>> = {
                use rayon::prelude::*;
                grid.par_iter()
                    .map(|&g| {
                        let run = || -> Result<_, String> {
                            let net = model.with_param(name, g).map_err(|e| e.to_string())?.network();
                            let s = VoltageSpectrum::node_spectrum(&net);
                            let ls = level_shift(&tp, &s, &cfg.quad).map_err(|e| e.to_string())?;
                            let tail = shift_tail_fraction(&tp, &s, cfg.validity.cutoff(), &cfg.quad).map_err(|e| e.to_string())?;
                            Ok((ls, tail < cfg.validity.max_tail_fraction))
                        };
                        match run() {
                            Ok((ls, valid)) => vec![
                                g.into(),
                                (ls.delta / w10).into(),
                                (ls.gamma / w10).into(),
                                (valid && !ls.marginal_tail).into(),
                                false.into(),
                                tag.as_str().into(),
                                Cell::Empty,
                            ],
                            Err(e) => vec![
                                g.into(),
                                Cell::Empty,
                                Cell::Empty,
                                false.into(),
                                false.into(),
                                tag.as_str().into(),
                                e.into(),
                            ],
                        }
                    })
                    .collect()
            };
            t.rows = rows;
            t
        }
    };
    let errors: Vec<String> = table
        .column("error")
        .expect("sweep tables carry an error column")
        .into_iter()
        .filter_map(|c| match c {
            Cell::Text(s) => Some(s.clone()),
            _ => None,
        })
        .collect();
    if !errors.is_empty() && errors.len() == table.rows.len() {
        return Err(CliError::Numeric(format!("every sweep point failed; first: {}", errors[0])));
    }
    for e in &errors {
        warn(format!("sweep point failed: {e}"));
    }
    Ok(table)
}

struct SnrInputs {
    mode: MechanicalMode,
    mcfg: MeasurementConfig,
    modulate: Option<String>,
    amplitude: f64,
}

fn snr_row(
    tag: &str,
    f: f64,
    eta: f64,
    flags: (bool, bool),
    inp: &SnrInputs,
) -> Result<Vec<Cell>, CliError> {
    let r = snr_report(f, eta, &inp.mode, &inp.mcfg)?;
    for w in &r.warnings {
        warn(format!("{tag}: {w}"));
    }
    Ok(vec![
        tag.into(),
        f.into(),
        eta.into(),
        r.x_dc.into(),
        r.x_zp.into(),
        r.static_feasible.into(),
        r.x_s.into(),
        r.x_n.into(),
        r.snr.into(),
        flags.0.into(),
        flags.1.into(),
    ])
}

fn model_snr_row(
    tag: &str,
    model: &PotentialModel,
    geometry: &GeometryArgs,
    inp: &SnrInputs,
    cfg: &ZeroPointConfig,
) -> Result<Vec<Cell>, CliError> {
    let (geom, y) = load_geometry(geometry)?;
    let p = force(model, &geom, y, ForceMethod::Analytic, cfg)?;
    let eta = match &inp.modulate {
        Some(name) => modulation_depth(model, &geom, y, name, inp.amplitude, cfg)?.1,
        None => inp.mcfg.eta,
    };
    snr_row(tag, p.force, eta, (p.validity_ok, p.renormalized), inp)
}

fn cmd_snr(
    circuit: &CircuitArgs,
    geometry: &GeometryArgs,
    given: Option<f64>,
    inp: &SnrInputs,
    cfg: &ZeroPointConfig,
) -> Result<Table, CliError> {
    let mut t = Table::new([
        "tag",
        "force_N",
        "eta",
        "x_dc_m",
        "x_zp_m",
        "static_feasible",
        "x_s_m",
        "x_n_m",
        "snr",
        "valid",
        "renormalized",
    ]);
    if let Some(f) = given {
        t.rows.push(snr_row("given", f, inp.mcfg.eta, (true, false), inp)?);
    } else if circuit.circuit.is_some() || circuit.netlist.is_some() {
        let model = load_model(circuit)?;
        let tag = match &model {
            PotentialModel::Builtin(b) => b.id().as_str(),
            PotentialModel::Network(_) => "netlist",
        };
        t.rows.push(model_snr_row(tag, &model, geometry, inp, cfg)?);
    } else {
        t.rows.push(snr_row("1fN", 1e-15, inp.mcfg.eta, (true, false), inp)?);
        for b in [
            BuiltinCircuit::SeriesRc { r: 10.0, c0: 20e-15 },
            BuiltinCircuit::SeriesRl { r: 1.0, l: 50e-12 },
            BuiltinCircuit::ParallelRl { r: 1e3, l: 30e-12 },
        ] {
            t.rows.push(model_snr_row(b.id().as_str(), &PotentialModel::Builtin(b), geometry, inp, cfg)?);
        }
    }
    Ok(t)
}

fn cmd_validate(circuit: &CircuitArgs, geometry: &GeometryArgs, c: Option<f64>, cfg: &ZeroPointConfig) -> Result<Table, CliError> {
    let model = load_model(circuit)?;
    let net: CircuitNetwork = model.network();
    let c = probe_capacitance(c, geometry)?;
    let mut t = Table::new(["check", "value", "ok"]);
    t.rows.push(vec!["elements".into(), net.elements().len().to_string().into(), true.into()]);
    t.rows.push(vec!["nodes".into(), net.nodes().len().to_string().into(), true.into()]);
    t.rows.push(vec!["dissipative".into(), Cell::Empty, net.has_resistor().into()]);
    let reference = match reference_network(&net) {
        ReferenceCircuit::Network(r) => netlist::unparse(&r).replace('\n', "; ").trim_end_matches("; ").to_string(),
        ReferenceCircuit::Open => "open".into(),
        ReferenceCircuit::ShortedPort => "shorted-port".into(),
    };
    t.rows.push(vec!["reference".into(), reference.into(), true.into()]);
    t.rows.push(vec!["renormalized".into(), Cell::Empty, model.renormalized().into()]);
    t.rows.push(vec!["capacitance_F".into(), c.into(), true.into()]);
    t.rows.push(vec!["cutoff_rad_s".into(), cfg.validity.cutoff().into(), true.into()]);
    let v = check_validity(&net, c, &cfg.validity, &cfg.quad)?;
    if !v.validity_ok {
        warn(format!(
            "{:.3e} of the integrand lies beyond c/l (limit {:.1e})",
            v.tail_fraction, cfg.validity.max_tail_fraction
        ));
    }
    t.rows.push(vec!["tail_fraction".into(), v.tail_fraction.into(), v.validity_ok.into()]);
    Ok(t)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Energy { circuit, geometry, c, renormalize, numerics: n, output } => {
            let t = cmd_energy(&circuit, &geometry, c, renormalize, &numerics(&n)?)?;
            emit(&t, &output)
        }
        Command::Force { circuit, geometry, method, numerics: n, output } => {
            let t = cmd_force(&circuit, &geometry, method, &numerics(&n)?)?;
            emit(&t, &output)
        }
        Command::Sweep {
            circuit,
            geometry,
            vary,
            from,
            to,
            points,
            spacing,
            quantity,
            transmon,
            method,
            numerics: n,
            output,
        } => {
            let t = cmd_sweep(
                &circuit,
                &geometry,
                &vary,
                (from, to, points, spacing),
                quantity,
                &transmon,
                method,
                &numerics(&n)?,
            )?;
            emit(&t, &output)
        }
        Command::Figure { id, points, diameter, y, numerics: n, output } => {
            let id: FigureId = id.parse()?;
            let opts = FigureOptions { points, diameter, y };
            let t = figures::figure(id, &opts, &numerics(&n)?)?;
            emit(&t, &output)
        }
        Command::Snr {
            circuit,
            geometry,
            force,
            mass,
            frequency,
            quality,
            s_n,
            bandwidth_fraction,
            hertz,
            eta,
            modulate,
            amplitude,
            numerics: n,
            output,
        } => {
            let inp = SnrInputs {
                mode: MechanicalMode::new(mass, 2.0 * PI * frequency, quality)?,
                mcfg: MeasurementConfig {
                    s_n,
                    bandwidth_fraction,
                    convention: if hertz { BandwidthConvention::Hertz } else { BandwidthConvention::Angular },
                    eta,
                },
                modulate,
                amplitude,
            };
            let t = cmd_snr(&circuit, &geometry, force, &inp, &numerics(&n)?)?;
            emit(&t, &output)
        }
        Command::Validate { circuit, geometry, c, numerics: n, output } => {
            let t = cmd_validate(&circuit, &geometry, c, &numerics(&n)?)?;
            emit(&t, &output)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::Input(msg) | CliError::Numeric(msg)) = &e;
            eprintln!("error: {msg}");
            ExitCode::from(e.code())
        }
    }
}
