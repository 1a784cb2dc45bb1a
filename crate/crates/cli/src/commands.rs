use std::path::Path;
use std::time::SystemTime;

use serde::{Deserialize, Serialize};
use strictqst::estimators::{estimate, EstimatorKind, EstimatorSpec};
use strictqst::experiments::{
    run_completeness_sweep, run_noisy_protocol, run_robustness_scan, NoisyProtocolConfig,
    RobustnessConfig, SweepConfig,
};
use strictqst::linalg::ComplexMatrix;
use strictqst::measurement::{sample_record_with, BasisSet, BasisType, MeasurementRecord, PovmMap};
use strictqst::quantum::{random_rank_r_state, QuantumState};
use strictqst::{par, Execution, RngStream};

use crate::args::{
    BasisKind, Command, EstimateArgs, ExperimentArgs, GenBasesArgs, Method, PlotArgs, PlotKind,
    SimulateArgs,
};
use crate::error::{CliError, CliResult};
use crate::io::{in_dir, read_json, read_text, write_json, write_output, OutputDigest};
use crate::manifest::{timestamp, RunManifest};
use crate::{plot, report};

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::GenBases(a) => gen_bases(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Estimate(a) => estimate_cmd(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Noisy(a) => noisy(&a),
        Command::Robustness(a) => robustness(&a),
        Command::Plot(a) => plot_cmd(&a),
    }
}

fn announce(path: &Path) {
    println!("wrote {}", path.display());
}

pub fn gen_bases(a: &GenBasesArgs) -> CliResult<()> {
    if a.dim < 2 || a.n_bases == 0 {
        return Err(CliError::Usage("--dim must be at least 2 and --n-bases positive".into()));
    }
    let basis_type = match a.basis_type {
        BasisKind::Global => BasisType::Global,
        BasisKind::Local => BasisType::Local,
    };
    let bases = BasisSet::random(basis_type, a.dim, a.n_bases, &mut RngStream::new(a.seed))?;
    write_json(&a.out, &bases)?;
    announce(&a.out);
    Ok(())
}

pub fn simulate(a: &SimulateArgs) -> CliResult<()> {
    let bases: BasisSet = read_json(&a.bases)?;
    let root = RngStream::new(a.seed);
    let state: QuantumState = match (&a.state, a.random_rank) {
        (Some(path), _) => read_json(path)?,
        (None, Some(rank)) => random_rank_r_state(bases.dim(), rank, &mut root.split(0))?,
        (None, None) => return Err(CliError::Usage("give --state or --random-rank".into())),
    };
    if state.dim() != bases.dim() {
        return Err(CliError::Dimension(format!(
            "state has dimension {} but the bases act on dimension {}",
            state.dim(),
            bases.dim()
        )));
    }
    let povm = PovmMap::from_bases(&bases);
    let record = match a.shots {
        Some(shots) if !a.noiseless => {
            sample_record_with(&povm, &state, shots, a.noise_scale, &mut root.split(1))?
        }
        _ => MeasurementRecord::noiseless(&povm, &state)?,
    };
    write_json(&a.out, &record)?;
    announce(&a.out);
    if let Some(path) = &a.state_out {
        write_json(path, &state)?;
        announce(path);
    }
    Ok(())
}

/// Serialized estimate with its diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateOutput {
    pub method: EstimatorKind,
    pub dim: usize,
    pub n_bases: usize,
    pub noise_bound: Option<f64>,
    pub x_hat: ComplexMatrix,
    pub rho_hat: ComplexMatrix,
    pub trace_x_hat: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub objective_trace: Vec<f64>,
}

pub fn estimator_kind(method: Method) -> EstimatorKind {
    match method {
        Method::Ls => EstimatorKind::LeastSquares,
        Method::Tracemin => EstimatorKind::TraceMin,
        Method::Mle => EstimatorKind::MaxLikelihood,
        Method::Feasibility => EstimatorKind::Feasibility,
    }
}

pub fn estimate_cmd(a: &EstimateArgs) -> CliResult<()> {
    let record: MeasurementRecord = read_json(&a.record)?;
    let bases: BasisSet = read_json(&a.bases)?;
    let povm = PovmMap::from_bases(&bases);
    let kind = estimator_kind(a.method);
    let needs_ball = matches!(kind, EstimatorKind::TraceMin | EstimatorKind::Feasibility);
    let noise_bound = if needs_ball {
        Some(a.epsilon.or(record.noise_bound).ok_or_else(|| {
            CliError::Usage(format!("--method {kind} needs --epsilon (the record carries no noise bound)"))
        })?)
    } else {
        None
    };
    let spec = EstimatorSpec::for_kind(kind, noise_bound);
    let result = estimate(&povm, &record, &spec)?;
    let output = EstimateOutput {
        method: kind,
        dim: povm.dim(),
        n_bases: povm.n_bases(),
        noise_bound,
        trace_x_hat: result.x_hat.trace().re,
        x_hat: result.x_hat,
        rho_hat: result.rho_hat.rho().clone(),
        residual: result.residual,
        iterations: result.iterations,
        converged: result.converged,
        objective_trace: result.objective_trace,
    };
    write_json(&a.out, &output)?;
    announce(&a.out);
    Ok(())
}

fn execution(a: &ExperimentArgs) -> Execution {
    if a.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

/// Runs an experiment and writes `<name>.json`, `<name>.csv`, `<name>.svg`
/// and `manifest.json` into the output directory.
fn run_experiment<C, R, F, Rows>(
    name: &str,
    a: &ExperimentArgs,
    seed: impl Fn(&C) -> u64,
    runner: F,
    rows: Rows,
    render: fn(&str) -> CliResult<String>,
) -> CliResult<()>
where
    C: for<'de> Deserialize<'de> + Serialize + Sync,
    R: Serialize + Send,
    F: Fn(&C, Execution) -> strictqst::Result<R> + Sync,
    Rows: Fn(&R) -> CliResult<String>,
{
    let config: C = read_json(&a.config)?;
    let exec = execution(a);
    let started = SystemTime::now();
    let result = par::with_jobs(a.jobs, || runner(&config, exec)).map_err(CliError::Usage)??;
    let finished = SystemTime::now();

    let csv = rows(&result)?;
    let mut outputs: Vec<OutputDigest> = Vec::new();
    let json_path = in_dir(&a.out_dir, &format!("{name}.json"));
    outputs.push(write_json(&json_path, &result)?);
    let csv_path = in_dir(&a.out_dir, &format!("{name}.csv"));
    outputs.push(write_output(&csv_path, &csv)?);
    let svg_path = in_dir(&a.out_dir, &format!("{name}.svg"));
    outputs.push(write_output(&svg_path, &render(&csv)?)?);

    let manifest = RunManifest {
        command: name.to_string(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: seed(&config),
        config: serde_json::to_value(&config).map_err(|e| CliError::Usage(e.to_string()))?,
        execution: exec,
        jobs: a.jobs,
        started_at: timestamp(started),
        finished_at: timestamp(finished),
        outputs,
    };
    let manifest_path = in_dir(&a.out_dir, "manifest.json");
    write_json(&manifest_path, &manifest)?;
    for p in [&json_path, &csv_path, &svg_path, &manifest_path] {
        announce(p);
    }
    Ok(())
}

pub fn sweep(a: &ExperimentArgs) -> CliResult<()> {
    run_experiment(
        "sweep",
        a,
        |c: &SweepConfig| c.seed,
        run_completeness_sweep,
        |r| report::to_csv(&report::sweep_rows(r)),
        plot::sweep_svg,
    )
}

pub fn noisy(a: &ExperimentArgs) -> CliResult<()> {
    run_experiment(
        "noisy",
        a,
        |c: &NoisyProtocolConfig| c.seed,
        run_noisy_protocol,
        |r| report::to_csv(&report::curve_rows(r)),
        plot::noisy_svg,
    )
}

pub fn robustness(a: &ExperimentArgs) -> CliResult<()> {
    run_experiment(
        "robustness",
        a,
        |c: &RobustnessConfig| c.seed,
        run_robustness_scan,
        |r| report::to_csv(&report::robustness_rows(r)),
        plot::robustness_svg,
    )
}

pub fn plot_cmd(a: &PlotArgs) -> CliResult<()> {
    let csv = read_text(&a.csv)?;
    let svg = match a.kind {
        PlotKind::Sweep => plot::sweep_svg(&csv)?,
        PlotKind::Noisy => plot::noisy_svg(&csv)?,
        PlotKind::Robustness => plot::robustness_svg(&csv)?,
    };
    write_output(&a.out, &svg)?;
    announce(&a.out);
    Ok(())
}
