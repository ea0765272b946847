use std::sync::Arc;

use densbound::bounds::{
    gaussian_sweep, k_esssup, k_phi, k_q, mu_lower_esssup, mu_lower_kq, mu_lower_orlicz, mu_lower_orlicz_quasidisc,
    mu_lower_quasidisc, sweep_slope, BoundFlag, BoundMethod, BoundReport,
};
use densbound::conformal::pullback_density;
use densbound::fem_oracle::{b_m2_disk_estimate, fem_reference};
use densbound::orlicz::luxemburg_norm;
use densbound::{SampledFunction, YoungFunction};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::{parse_config, ConfigError, NormSpec, Scenario};

/// Size of the trial family behind the default `B_{M_ε,2}(𝔻)` estimate.
const TRIAL_FAMILY: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Bound,
    Verify,
    Sweep,
    Norms,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Bound => "bound",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
            Command::Norms => "norms",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub jobs: usize,
    /// Overrides every scenario's `fem.level`.
    pub fem_level: Option<u32>,
    /// Relative slack in `bound ≤ μ_FEM (1 + tol)`.
    pub tol: f64,
    /// Multiplies every bound before verification; a self-test of the detector.
    pub corrupt_factor: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { jobs: 1, fem_level: None, tol: 2e-2, corrupt_factor: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub csv: String,
    /// Set by `verify` when some bound exceeds the FEM value.
    pub soundness_violation: bool,
}

/// Fixed-width scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn config_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Runs `f` over `items` on up to `jobs` threads; results keep input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    pool.install(|| items.par_iter().map(f).collect())
}

/// One computed bound, or the error that prevented it.
#[derive(Debug, Clone)]
enum Entry {
    Report(BoundReport),
    Slope { slope: Option<f64>, predicted: f64 },
    Failed { method: BoundMethod, message: String },
}

fn orlicz_constant(s: &Scenario) -> densbound::Result<(f64, bool)> {
    match s.b_m_eps {
        Some(b) => Ok((b, false)),
        None => Ok((b_m2_disk_estimate(TRIAL_FAMILY, &YoungFunction::exp_pow(s.params.eps)?)?.value, true)),
    }
}

fn compute_method(s: &Scenario, m: BoundMethod) -> Vec<Entry> {
    let fail = |e: densbound::Error| vec![Entry::Failed { method: m, message: e.to_string() }];
    let quad = match if m == BoundMethod::GaussianSweep { s.sweep_quad.build() } else { s.quad.build() } {
        Ok(q) => q,
        Err(e) => return fail(e),
    };
    let (map, rho, p) = (&s.map, &s.density, &s.params);
    let single = |r: densbound::Result<BoundReport>| match r {
        Ok(r) => vec![Entry::Report(r)],
        Err(e) => fail(e),
    };
    let with_b = |f: &dyn Fn(f64) -> densbound::Result<BoundReport>| match orlicz_constant(s) {
        Ok((b, trial)) => single(f(b).map(|mut r| {
            if trial {
                r.flag(BoundFlag::TrialEstimateB);
            }
            r
        })),
        Err(e) => fail(e),
    };
    match m {
        BoundMethod::Esssup => single(mu_lower_esssup(map, rho, &quad)),
        BoundMethod::LpKq => single(mu_lower_kq(map, rho, p.p, p.q, &quad)),
        BoundMethod::Quasidisc => single(mu_lower_quasidisc(map, rho, p, &quad)),
        BoundMethod::Orlicz => with_b(&|b| mu_lower_orlicz(map, rho, p.eps, b, &quad)),
        BoundMethod::OrliczQuasidisc => with_b(&|b| mu_lower_orlicz_quasidisc(map, rho, p, b, &quad)),
        BoundMethod::GaussianSweep => match gaussian_sweep(map, &s.sweep_n, p, &quad) {
            Ok(reports) => {
                let s_exp = p.rho_exponent().unwrap_or(f64::NAN);
                let predicted = (p.q - 2.0) / (p.q * s_exp);
                let slope = sweep_slope(&reports);
                let mut v: Vec<Entry> = reports.into_iter().map(Entry::Report).collect();
                v.push(Entry::Slope { slope, predicted });
                v
            }
            Err(e) => fail(e),
        },
    }
}

fn compute_bounds(s: &Scenario, methods: &[BoundMethod]) -> Vec<Entry> {
    methods.iter().flat_map(|&m| compute_method(s, m)).collect()
}

fn intermediates_field(r: &BoundReport) -> String {
    r.intermediates.iter().map(|(k, v)| format!("{k}={}", fmt_f64(*v))).collect::<Vec<_>>().join(";")
}

fn one_line(msg: &str) -> String {
    msg.replace(['\n', '\r'], " ")
}

struct Csv {
    w: csv::Writer<Vec<u8>>,
}

impl Csv {
    fn new(cmd: Command, config_text: &str, header: &[&str], comments: &[String]) -> Self {
        let mut prelude = format!(
            "# densbound {}\n# command {}\n# config-sha256 {}\n",
            env!("CARGO_PKG_VERSION"),
            cmd.name(),
            config_hash(config_text)
        );
        for c in comments {
            prelude.push_str(&format!("# {c}\n"));
        }
        let mut w = csv::WriterBuilder::new().from_writer(prelude.into_bytes());
        w.write_record(header).expect("in-memory write");
        Self { w }
    }

    fn row(&mut self, fields: &[String]) {
        self.w.write_record(fields).expect("in-memory write");
    }

    fn finish(self) -> String {
        String::from_utf8(self.w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
    }
}

fn require_nonempty(scenarios: &[Scenario], what: &str, pick: impl Fn(&Scenario) -> bool) -> Result<(), ConfigError> {
    match scenarios.iter().find(|s| !pick(s)) {
        Some(s) => Err(ConfigError { line: s.line, message: format!("scenario `{}` has an empty {what} list", s.id) }),
        None => Ok(()),
    }
}

/// Parses `config_text` and runs `cmd`. Configuration problems are returned
/// as errors; numerical failures become rows with an `Error` flag.
pub fn run(cmd: Command, config_text: &str, opts: &RunOptions) -> Result<RunOutput, ConfigError> {
    let mut scenarios = parse_config(config_text)?;
    if let Some(l) = opts.fem_level {
        if !(2..=densbound::fem_oracle::MAX_LEVEL).contains(&l) {
            return Err(ConfigError {
                line: 0,
                message: format!("--fem-level must be in 2..={}", densbound::fem_oracle::MAX_LEVEL),
            });
        }
        scenarios.iter_mut().for_each(|s| s.fem_level = l);
    }
    if !(opts.tol >= 0.0 && opts.tol.is_finite()) {
        return Err(ConfigError { line: 0, message: format!("--tol must be finite and >= 0, got {}", opts.tol) });
    }
    let jobs = opts.jobs.max(1);
    match cmd {
        Command::Bound => {
            require_nonempty(&scenarios, "methods", |s| !s.methods.is_empty())?;
            Ok(cmd_bound(config_text, &scenarios, jobs))
        }
        Command::Verify => {
            require_nonempty(&scenarios, "methods", |s| !s.methods.is_empty())?;
            Ok(cmd_verify(config_text, &scenarios, jobs, opts))
        }
        Command::Sweep => Ok(cmd_sweep(config_text, &scenarios, jobs)),
        Command::Norms => {
            if scenarios.iter().all(|s| s.norms.is_empty()) {
                return Err(ConfigError { line: 1, message: "no scenario requests any norms".into() });
            }
            Ok(cmd_norms(config_text, &scenarios, jobs))
        }
    }
}

fn cmd_bound(text: &str, scenarios: &[Scenario], jobs: usize) -> RunOutput {
    let results = par_map(scenarios, jobs, |s| compute_bounds(s, &s.methods));
    let mut csv = Csv::new(
        Command::Bound,
        text,
        &["scenario", "method", "n", "bound", "bound_log", "flags", "intermediates", "error"],
        &[],
    );
    for (s, entries) in scenarios.iter().zip(results) {
        for e in entries {
            let row = match e {
                Entry::Report(r) => vec![
                    s.id.clone(),
                    r.method.tag().into(),
                    r.parameters.get("n").map_or(String::new(), |n| fmt_f64(*n)),
                    fmt_f64(r.bound),
                    fmt_f64(r.bound_log),
                    r.flag_list(),
                    intermediates_field(&r),
                    String::new(),
                ],
                Entry::Slope { slope, predicted } => vec![
                    s.id.clone(),
                    "gaussian_sweep_slope".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    format!("predicted={};slope={}", fmt_f64(predicted), slope.map_or("nan".into(), fmt_f64)),
                    String::new(),
                ],
                Entry::Failed { method, message } => vec![
                    s.id.clone(),
                    method.tag().into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    "Error".into(),
                    String::new(),
                    one_line(&message),
                ],
            };
            csv.row(&row);
        }
    }
    RunOutput { csv: csv.finish(), soundness_violation: false }
}

fn cmd_verify(text: &str, scenarios: &[Scenario], jobs: usize, opts: &RunOptions) -> RunOutput {
    let results = par_map(scenarios, jobs, |s| {
        let methods: Vec<BoundMethod> =
            s.methods.iter().copied().filter(|m| *m != BoundMethod::GaussianSweep).collect();
        let fem = fem_reference(&s.map, &s.density, &[s.fem_level - 1, s.fem_level]);
        (compute_bounds(s, &methods), fem)
    });
    let comments = vec![
        format!("tolerance {}", fmt_f64(opts.tol)),
        "gaussian_sweep is not verified: its densities are not resolved by the FEM meshes".to_string(),
    ];
    let mut csv = Csv::new(
        Command::Verify,
        text,
        &["scenario", "method", "bound", "mu_fem", "ratio", "sound", "flags", "error"],
        &comments,
    );
    let factor = opts.corrupt_factor.unwrap_or(1.0);
    let mut violation = false;
    for (s, (entries, fem)) in scenarios.iter().zip(results) {
        for e in entries {
            let row = match (e, &fem) {
                (Entry::Report(r), Ok(f)) => {
                    let bound = r.bound * factor;
                    let ratio = bound / f.extrapolated;
                    let sound = ratio <= 1.0 + opts.tol;
                    violation |= !sound;
                    vec![
                        s.id.clone(),
                        r.method.tag().into(),
                        fmt_f64(bound),
                        fmt_f64(f.extrapolated),
                        fmt_f64(ratio),
                        sound.to_string(),
                        r.flag_list(),
                        String::new(),
                    ]
                }
                (Entry::Report(r), Err(fe)) => vec![
                    s.id.clone(),
                    r.method.tag().into(),
                    fmt_f64(r.bound * factor),
                    String::new(),
                    String::new(),
                    String::new(),
                    if r.flags.is_empty() { "Error".into() } else { format!("{};Error", r.flag_list()) },
                    one_line(&format!("FEM: {fe}")),
                ],
                (Entry::Failed { method, message }, _) => vec![
                    s.id.clone(),
                    method.tag().into(),
                    String::new(),
                    fem.as_ref().map_or(String::new(), |f| fmt_f64(f.extrapolated)),
                    String::new(),
                    String::new(),
                    "Error".into(),
                    one_line(&message),
                ],
                (Entry::Slope { .. }, _) => continue,
            };
            csv.row(&row);
        }
    }
    RunOutput { csv: csv.finish(), soundness_violation: violation }
}

fn cmd_sweep(text: &str, scenarios: &[Scenario], jobs: usize) -> RunOutput {
    let results = par_map(scenarios, jobs, |s| compute_method(s, BoundMethod::GaussianSweep));
    let mut csv = Csv::new(
        Command::Sweep,
        text,
        &[
            "scenario",
            "n",
            "bound",
            "bound_log",
            "log_rho_norm",
            "log_rho_norm_analytic",
            "slope",
            "predicted_slope",
            "flags",
            "error",
        ],
        &[],
    );
    for (s, entries) in scenarios.iter().zip(results) {
        for e in entries {
            let g = |r: &BoundReport, k: &str| r.intermediate(k).map_or(String::new(), fmt_f64);
            let row = match e {
                Entry::Report(r) => vec![
                    s.id.clone(),
                    r.parameters.get("n").map_or(String::new(), |n| fmt_f64(*n)),
                    fmt_f64(r.bound),
                    fmt_f64(r.bound_log),
                    g(&r, "log_rho_norm"),
                    g(&r, "log_rho_norm_analytic"),
                    String::new(),
                    String::new(),
                    r.flag_list(),
                    String::new(),
                ],
                Entry::Slope { slope, predicted } => vec![
                    s.id.clone(),
                    "all".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    slope.map_or("nan".into(), fmt_f64),
                    fmt_f64(predicted),
                    String::new(),
                    String::new(),
                ],
                Entry::Failed { message, .. } => {
                    let mut v = vec![s.id.clone()];
                    v.extend(std::iter::repeat_n(String::new(), 7));
                    v.push("Error".into());
                    v.push(one_line(&message));
                    v
                }
            };
            csv.row(&row);
        }
    }
    RunOutput { csv: csv.finish(), soundness_violation: false }
}

fn norm_value(s: &Scenario, spec: &NormSpec) -> densbound::Result<f64> {
    let quad = s.quad.build()?;
    match spec {
        NormSpec::KEsssup => Ok(k_esssup(&s.map, &s.density, &quad)?.value),
        NormSpec::Kq => k_q(&s.map, &s.density, s.params.q, &quad),
        NormSpec::KPhi { young, .. } => k_phi(&s.map, &s.density, young, &quad),
        NormSpec::Luxemburg { young, .. } => {
            // ‖ρ‖ on Ω, pulled back: samples ρ(φ(y)) against J_φ dy
            let rho = pullback_density(&s.density, &s.map, &quad)?;
            let jac: Vec<f64> = quad.nodes().iter().map(|&z| s.map.jacobian_unchecked(z)).collect();
            let id = format!("{}*J[{}]", quad.measure().id(), s.map.label());
            let m = Arc::new(quad.measure().reweighted(id, &jac)?);
            luxemburg_norm(&SampledFunction::new(rho.values().to_vec(), m)?, young)
        }
    }
}

fn cmd_norms(text: &str, scenarios: &[Scenario], jobs: usize) -> RunOutput {
    let results =
        par_map(scenarios, jobs, |s| s.norms.iter().map(|n| (n.label(), norm_value(s, n))).collect::<Vec<_>>());
    let mut csv = Csv::new(Command::Norms, text, &["scenario", "quantity", "value", "flags", "error"], &[]);
    for (s, values) in scenarios.iter().zip(results) {
        for (label, v) in values {
            let row = match v {
                Ok(x) => vec![s.id.clone(), label, fmt_f64(x), String::new(), String::new()],
                Err(e) => vec![s.id.clone(), label, String::new(), "Error".into(), one_line(&e.to_string())],
            };
            csv.row(&row);
        }
    }
    RunOutput { csv: csv.finish(), soundness_violation: false }
}
