use crate::args::{
    Cli, Command, DosArgs, DynamicsArgs, FigureArg, FormatArg, ModeArg, ModelArg, OrderArg, OutputArgs,
    PhysicsArgs, PropagateArgs, SpectrumArgs, ValidateArgs,
};
use crate::config::FileConfig;
use crate::error::CliError;
use crate::plot;
use bandedge::dynamics::{cross_validate, solve_volterra, Mode, ProductOrder, SolverConfig};
use bandedge::export::{read_pulse, write_dos, write_pulse, write_spectrum, write_trajectory};
use bandedge::model::{default_anisotropic_constant, ReservoirKind, ReservoirModel, SystemParams};
use bandedge::propagation::{group_delay, propagate, window_retention, MediumSlab, PulseField, WindowExperiment};
use bandedge::spectra::{density_of_modes, dre_chi_ddelta, spectrum, DetuningGrid, ScalingParams};
use bandedge::validation::{run_suite, SuiteOptions};
use num_complex::Complex64;
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Spectrum(a) => run_spectrum(&a, &file),
        Command::Dynamics(a) => run_dynamics(&a, &file),
        Command::Validate(a) => run_validate(&a, &file),
        Command::Propagate(a) => run_propagate(&a, &file),
        Command::Dos(a) => run_dos(&a, &file),
    }
}

/// Values a `--figure` preset supplies below flags and config keys.
#[derive(Debug, Clone, Copy, Default)]
struct Preset {
    model: Option<ModelArg>,
    gamma: Option<f64>,
    beta: Option<f64>,
    delta_g: Option<f64>,
}

impl Preset {
    fn spectrum(figure: Option<FigureArg>) -> Result<Self, CliError> {
        let delta_g = match figure {
            None => return Ok(Self::default()),
            Some(FigureArg::Fig2a) => 0.0,
            Some(FigureArg::Fig2b) => 1.0,
            Some(FigureArg::Fig2c) => -1.0,
            Some(FigureArg::Fig1b) => {
                return Err(CliError::Usage(
                    "--figure 1b is a density-of-modes preset; use it with `dos`".into(),
                ))
            }
        };
        Ok(Self {
            model: Some(ModelArg::Iso),
            gamma: Some(1.0),
            beta: Some(1.0),
            delta_g: Some(delta_g),
        })
    }
}

fn kind_of(model: ModelArg) -> ReservoirKind {
    match model {
        ModelArg::Iso => ReservoirKind::Iso,
        ModelArg::Aniso => ReservoirKind::Aniso,
        ModelArg::Markov => ReservoirKind::Markov,
    }
}

struct Physics {
    model: ReservoirModel,
    params: SystemParams,
    scaling: ScalingParams,
}

fn anisotropic_override(
    re: Option<f64>,
    im: Option<f64>,
    beta_a: f64,
) -> Result<Option<Complex64>, CliError> {
    if re.is_none() && im.is_none() {
        return Ok(None);
    }
    let base = default_anisotropic_constant(beta_a);
    let c = Complex64::new(re.unwrap_or(base.re), im.unwrap_or(base.im));
    if !c.re.is_finite() || !c.im.is_finite() {
        return Err(CliError::Usage(format!("c_a must be finite, got {c}")));
    }
    Ok(Some(c))
}

fn resolve_physics(a: &PhysicsArgs, file: &FileConfig, preset: Preset, delta: f64) -> Result<Physics, CliError> {
    let d = SystemParams::default();
    let model = a
        .model
        .or(file.model.map(Into::into))
        .or(preset.model)
        .unwrap_or(ModelArg::Iso);
    let params = SystemParams {
        omega_rabi: a.omega_rabi.or(file.omega_rabi).unwrap_or(d.omega_rabi),
        gamma: a.gamma.or(file.gamma).or(preset.gamma).unwrap_or(d.gamma),
        beta: a.beta.or(file.beta).or(preset.beta).unwrap_or(d.beta),
        beta_a: a.beta_a.or(file.beta_a).unwrap_or(d.beta_a),
        delta_g: a.delta_g.or(file.delta_g).or(preset.delta_g).unwrap_or(d.delta_g),
        delta,
        gamma1: a.gamma1.or(file.gamma1).unwrap_or(d.gamma1),
    };
    let s = ScalingParams::default();
    let scaling = ScalingParams {
        chi_prefactor: a.chi_prefactor.or(file.chi_prefactor).unwrap_or(s.chi_prefactor),
        omega_over_c: a.omega_over_c.or(file.omega_over_c).unwrap_or(s.omega_over_c),
    };
    scaling.validate()?;
    let mut reservoir = ReservoirModel::from_params(kind_of(model), &params)?;
    if let Some(c) = anisotropic_override(a.c_a_re.or(file.c_a_re), a.c_a_im.or(file.c_a_im), params.beta_a)? {
        if model == ModelArg::Aniso {
            reservoir = reservoir.with_transform_constant(c);
        } else {
            log::warn!("c_a override ignored for the {} reservoir", reservoir.name());
        }
    }
    Ok(Physics {
        model: reservoir,
        params,
        scaling,
    })
}

fn format_of(o: &OutputArgs, file: &FileConfig) -> FormatArg {
    o.format.or(file.format.map(Into::into)).unwrap_or(FormatArg::Csv)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))
}

fn flush(mut w: impl Write, path: Option<&Path>) -> Result<(), CliError> {
    w.flush().map_err(|e| {
        CliError::Io(match path {
            Some(p) => format!("cannot write {}: {e}", p.display()),
            None => format!("cannot write to stdout: {e}"),
        })
    })
}

/// Writes the CSV through `body`, plus a plot script when requested.
fn emit(
    output: &OutputArgs,
    file: &FileConfig,
    body: impl FnOnce(&mut dyn Write) -> bandedge::error::Result<()>,
    script: impl FnOnce(&Path) -> String,
) -> Result<(), CliError> {
    let format = format_of(output, file);
    match (&output.out, format) {
        (None, FormatArg::Csv) => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
            flush(lock, None)
        }
        (None, FormatArg::Plot) => Err(CliError::Usage("--format plot needs --out <file.csv>".into())),
        (Some(path), format) => {
            let mut w = create(path)?;
            body(&mut w)?;
            flush(w, Some(path))?;
            if format == FormatArg::Plot {
                let script_path = path.with_extension("py");
                let mut s = create(&script_path)?;
                s.write_all(script(path).as_bytes())
                    .map_err(|e| CliError::Io(format!("cannot write {}: {e}", script_path.display())))?;
                flush(s, Some(&script_path))?;
            }
            Ok(())
        }
    }
}

fn run_spectrum(a: &SpectrumArgs, file: &FileConfig) -> Result<(), CliError> {
    let preset = Preset::spectrum(a.figure)?;
    let physics = resolve_physics(&a.physics, file, preset, 0.0)?;
    let g = DetuningGrid::figure_default();
    let grid = DetuningGrid::new(
        a.delta_min.or(file.delta_min).unwrap_or(g.min),
        a.delta_max.or(file.delta_max).unwrap_or(g.max),
        a.delta_step.or(file.delta_step).unwrap_or(g.step),
    )?;
    let table = spectrum(&physics.model, &physics.params, &physics.scaling, &grid)?;
    let title = match physics.model.delta_g() {
        Some(dg) => format!("{} reservoir, gamma = {}, delta_g = {dg}", physics.model.name(), physics.params.gamma),
        None => format!("{} reservoir, gamma = {}", physics.model.name(), physics.params.gamma),
    };
    emit(
        &a.output,
        file,
        |w| write_spectrum(w, &table),
        |p| plot::spectrum_script(p, &title),
    )
}

fn run_dynamics(a: &DynamicsArgs, file: &FileConfig) -> Result<(), CliError> {
    let delta = a.delta.or(file.delta).unwrap_or(0.0);
    let physics = resolve_physics(&a.physics, file, Preset::default(), delta)?;
    let d = SolverConfig::default();
    let order = match a.order.or(file.order()?).unwrap_or(OrderArg::Second) {
        OrderArg::First => ProductOrder::First,
        OrderArg::Second => ProductOrder::Second,
    };
    let config = SolverConfig {
        step: a.step.or(file.step).unwrap_or(d.step),
        horizon: a.horizon.or(file.horizon).unwrap_or(d.horizon),
        order,
        ..d
    };
    let mode = match a.mode.or(file.mode.map(Into::into)).unwrap_or(ModeArg::Perturbative) {
        ModeArg::Perturbative => Mode::Perturbative,
        ModeArg::Coupled => Mode::Coupled,
    };
    let traj = solve_volterra(&physics.model, &physics.params, &config, mode)?;
    if a.cross_validate {
        let cv = cross_validate(&physics.model, &physics.params, &config)?;
        eprintln!("{}", serde_json::to_string_pretty(&cv).expect("report serializes"));
    }
    let title = format!("{} reservoir, delta = {delta}, {mode:?}", physics.model.name());
    emit(
        &a.output,
        file,
        |w| write_trajectory(w, &traj),
        |p| plot::trajectory_script(p, &title),
    )
}

fn write_json<T: Serialize>(value: &T, out: Option<&PathBuf>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("report serializes") + "\n";
    match out {
        Some(path) => {
            let mut w = create(path)?;
            w.write_all(text.as_bytes())
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            flush(w, Some(path))
        }
        None => {
            let mut lock = std::io::stdout().lock();
            lock.write_all(text.as_bytes())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))?;
            flush(lock, None)
        }
    }
}

fn run_validate(a: &ValidateArgs, file: &FileConfig) -> Result<(), CliError> {
    let beta_a = file.beta_a.unwrap_or(SystemParams::default().beta_a);
    let options = SuiteOptions {
        anisotropic_constant: anisotropic_override(a.c_a_re.or(file.c_a_re), a.c_a_im.or(file.c_a_im), beta_a)?,
    };
    if let Some(parent) = a.out.as_ref().and_then(|p| p.parent()) {
        if !parent.as_os_str().is_empty() && !parent.is_dir() {
            return Err(CliError::Io(format!("output directory {} does not exist", parent.display())));
        }
    }
    let report = run_suite(&options);
    for c in &report.checks {
        let status = match (c.passed, c.gating) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "INFO",
        };
        eprintln!("{status} {:<36} {:.3e}  {}", c.name, c.value, c.detail);
    }
    write_json(&report, a.out.as_ref())?;
    if report.all_passed {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name).collect();
        Err(CliError::ValidationFailed(format!("failing checks: {}", names.join(", "))))
    }
}

#[derive(Debug, Serialize)]
struct WindowReport {
    bandwidth: f64,
    phase_length: f64,
    carrier: f64,
    isotropic_retention: f64,
    isotropic_target: f64,
    isotropic_meets_target: bool,
    markovian_retention: f64,
    markovian_target: f64,
    markovian_meets_target: bool,
}

#[derive(Debug, Serialize)]
struct PropagationSummary {
    carrier: f64,
    length: f64,
    energy_in: f64,
    energy_out: f64,
    retention: f64,
    measured_delay: Option<f64>,
    predicted_delay: Option<f64>,
}

fn run_propagate(a: &PropagateArgs, file: &FileConfig) -> Result<(), CliError> {
    let physics = resolve_physics(&a.physics, file, Preset::default(), 0.0)?;
    if a.figure_window {
        let exp = WindowExperiment::default();
        let iso = ReservoirModel::isotropic(physics.params.beta, physics.params.delta_g)?;
        let markov = ReservoirModel::markovian(physics.params.gamma1)?;
        let r_iso = window_retention(&exp, iso, physics.params, physics.scaling)?;
        let r_markov = window_retention(&exp, markov, physics.params, physics.scaling)?;
        let report = WindowReport {
            bandwidth: exp.bandwidth * physics.params.beta,
            phase_length: exp.phase_length,
            carrier: physics.params.delta_g,
            isotropic_retention: r_iso,
            isotropic_target: 0.99,
            isotropic_meets_target: r_iso > 0.99,
            markovian_retention: r_markov,
            markovian_target: 0.01,
            markovian_meets_target: r_markov < 0.01,
        };
        return write_json(&report, a.output.out.as_ref());
    }

    let carrier = a.carrier.or(file.carrier).unwrap_or(physics.params.delta_g);
    let pulse = match &a.input {
        Some(path) => {
            let f = File::open(path).map_err(|e| CliError::Io(format!("cannot open {}: {e}", path.display())))?;
            read_pulse(std::io::BufReader::new(f), carrier)?
        }
        None => PulseField::gaussian(
            a.samples.or(file.samples).unwrap_or(16384),
            a.dt.or(file.dt).unwrap_or(0.5),
            carrier,
            a.bandwidth.or(file.bandwidth).unwrap_or(0.01 * physics.params.beta),
            0.0,
        )?,
    };
    let length = a.length.or(file.length).unwrap_or(20.0);
    let mut slab = MediumSlab::new(length, physics.model, physics.params, physics.scaling);
    slab.detuning_window = match (a.window_min.or(file.window_min), a.window_max.or(file.window_max)) {
        (Some(lo), Some(hi)) => Some((lo, hi)),
        (None, None) => None,
        _ => return Err(CliError::Usage("--window-min and --window-max must be given together".into())),
    };
    let out = propagate(&pulse, &slab)?;
    let predicted = dre_chi_ddelta(&slab.model, &slab.params.with_delta(carrier), &slab.scaling)
        .ok()
        .map(|d| 0.5 * slab.scaling.omega_over_c * length * d);
    let summary = PropagationSummary {
        carrier,
        length,
        energy_in: pulse.energy(),
        energy_out: out.energy(),
        retention: out.energy() / pulse.energy(),
        measured_delay: group_delay(&pulse, &out).ok(),
        predicted_delay: predicted,
    };
    eprintln!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    let title = format!("{} slab, L = {length}, carrier {carrier}", physics.model.name());
    emit(&a.output, file, |w| write_pulse(w, &out), |p| plot::pulse_script(p, &title))
}

fn run_dos(a: &DosArgs, file: &FileConfig) -> Result<(), CliError> {
    let preset_model = match a.figure {
        None => None,
        Some(FigureArg::Fig1b) => Some(ModelArg::Iso),
        Some(_) => {
            return Err(CliError::Usage(
                "--figure 2a/2b/2c are spectrum presets; `dos` accepts only 1b".into(),
            ))
        }
    };
    let model = a.model.or(file.model.map(Into::into)).or(preset_model).unwrap_or(ModelArg::Iso);
    let (lo, hi, step) = (
        a.x_min.or(file.x_min).unwrap_or(-2.0),
        a.x_max.or(file.x_max).unwrap_or(4.0),
        a.x_step.or(file.x_step).unwrap_or(0.01),
    );
    if !lo.is_finite() || !hi.is_finite() || !(hi > lo) {
        return Err(CliError::Usage(format!("empty grid: need x_max > x_min, got [{lo}, {hi}]")));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(CliError::Usage(format!("x_step must be finite and > 0, got {step}")));
    }
    let n = ((hi - lo) / step * (1.0 + 1e-12)).floor() as usize + 1;
    let kind = kind_of(model);
    let rows: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let x = lo + k as f64 * step;
            (x, density_of_modes(kind, x))
        })
        .collect();
    let title = format!("density of modes, {}", kind.name());
    emit(&a.output, file, |w| write_dos(w, &rows), |p| plot::dos_script(p, &title))
}
