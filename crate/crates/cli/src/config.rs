//! Line-oriented scenario files.
//!
//! ```text
//! # comment
//! [scenario]
//! id = pp-gauss
//! map = perturbed_power
//! map.c = 0.5
//! map.k = 2
//! density = gaussian
//! density.n = 4
//! methods = esssup, lp_kq, orlicz
//! ```

use std::collections::BTreeMap;
use std::fmt;

use densbound::bounds::{BoundMethod, ScenarioParams};
use densbound::conformal::DensityTable;
use densbound::youngfn::YoungFunction;
use densbound::{ConformalMap, DensityField, DiskQuadrature};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError { line, message: message.into() })
}

/// Disk rule for the bound integrals: plain Gauss panel, or graded toward
/// the centre when `graded_levels` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadSpec {
    pub n_r: usize,
    pub n_theta: usize,
    pub graded_levels: Option<usize>,
}

impl QuadSpec {
    pub fn build(&self) -> densbound::Result<DiskQuadrature> {
        match self.graded_levels {
            Some(l) => DiskQuadrature::graded(l, 4.0, self.n_r, self.n_theta),
            None => DiskQuadrature::new(self.n_r, self.n_theta),
        }
    }
}

/// A standalone quantity for the `norms` command.
#[derive(Debug, Clone, PartialEq)]
pub enum NormSpec {
    /// `‖ρ‖` in `L^Y(Ω)`, labelled by the spec string.
    Luxemburg {
        label: String,
        young: YoungFunction,
    },
    KEsssup,
    Kq,
    KPhi {
        label: String,
        young: YoungFunction,
    },
}

impl NormSpec {
    pub fn label(&self) -> String {
        match self {
            NormSpec::Luxemburg { label, .. } => format!("luxemburg:{label}"),
            NormSpec::KEsssup => "k_esssup".into(),
            NormSpec::Kq => "k_q".into(),
            NormSpec::KPhi { label, .. } => format!("k_phi:{label}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    /// Line of the `[scenario]` header.
    pub line: usize,
    pub map: ConformalMap,
    pub density: DensityField,
    pub params: ScenarioParams,
    pub methods: Vec<BoundMethod>,
    pub quad: QuadSpec,
    pub sweep_quad: QuadSpec,
    /// Finest FEM level; the oracle extrapolates from this and the one below.
    pub fem_level: u32,
    pub b_m_eps: Option<f64>,
    pub sweep_n: Vec<f64>,
    pub norms: Vec<NormSpec>,
}

const KEYS: &[&str] = &[
    "id",
    "map",
    "map.c",
    "map.k",
    "map.a",
    "map.coeffs",
    "density",
    "density.c",
    "density.n",
    "density.gamma",
    "density.eps",
    "density.x_range",
    "density.y_range",
    "density.nx",
    "density.ny",
    "density.values",
    "p",
    "q",
    "alpha",
    "K",
    "eps",
    "methods",
    "quad.n_r",
    "quad.n_theta",
    "quad.graded",
    "sweep.n",
    "sweep.n_r",
    "sweep.n_theta",
    "sweep.graded",
    "fem.level",
    "b_m_eps",
    "norms",
];

struct Section {
    line: usize,
    entries: BTreeMap<String, (usize, String)>,
}

impl Section {
    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.entries.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn num(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some((l, v)) => parse_f64(l, key, v),
        }
    }

    fn required(&self, key: &str) -> Result<(usize, &str), ConfigError> {
        self.get(key).map_or_else(|| err(self.line, format!("missing key `{key}`")), Ok)
    }

    fn usize(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some((l, v)) => v.parse().or_else(|_| err(l, format!("`{key}` must be a non-negative integer, got `{v}`"))),
        }
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    match v.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => err(line, format!("`{key}` must be a finite number, got `{v}`")),
    }
}

fn parse_list(line: usize, key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').map(|s| parse_f64(line, key, s)).collect()
}

/// `re` or `re,im`.
fn parse_complex(line: usize, key: &str, v: &str) -> Result<Complex64, ConfigError> {
    let parts = parse_list(line, key, v)?;
    match parts[..] {
        [re] => Ok(Complex64::new(re, 0.0)),
        [re, im] => Ok(Complex64::new(re, im)),
        _ => err(line, format!("`{key}` must be `re` or `re,im`, got `{v}`")),
    }
}

/// Young function from `name[:arg[:arg]]`.
pub fn parse_young(spec: &str) -> Result<YoungFunction, String> {
    let mut it = spec.split(':');
    let name = it.next().unwrap_or_default();
    let args: Vec<f64> =
        it.map(|a| a.parse::<f64>().map_err(|_| format!("bad number `{a}` in `{spec}`"))).collect::<Result<_, _>>()?;
    let y = match (name, &args[..]) {
        ("log_linear", []) => Ok(YoungFunction::log_linear()),
        ("log_linear_tilde", []) => Ok(YoungFunction::log_linear_tilde()),
        ("exp_minus_linear", []) => Ok(YoungFunction::exp_minus_linear()),
        ("exp_square", []) => Ok(YoungFunction::exp_square()),
        ("log_pow", [e]) => YoungFunction::log_pow(*e),
        ("exp_pow", [e]) => YoungFunction::exp_pow(*e),
        ("power", [p]) => YoungFunction::power(*p),
        ("psi", [a]) => YoungFunction::psi(*a),
        ("psi_eps", [e, a]) => YoungFunction::psi_eps(*e, *a),
        _ => return Err(format!("unknown Young function `{spec}`")),
    };
    y.map_err(|e| e.to_string())
}

fn parse_map(s: &Section) -> Result<ConformalMap, ConfigError> {
    let (line, kind) = s.get("map").unwrap_or((s.line, "identity"));
    let map = match kind {
        "identity" => Ok(ConformalMap::identity()),
        "perturbed_power" => {
            let (lc, c) = s.required("map.c")?;
            let (lk, k) = s.required("map.k")?;
            let k: u32 = k.parse().or_else(|_| err(lk, format!("`map.k` must be an integer, got `{k}`")))?;
            ConformalMap::perturbed_power(parse_complex(lc, "map.c", c)?, k)
        }
        "moebius" => {
            let (la, a) = s.required("map.a")?;
            ConformalMap::moebius_disk(parse_complex(la, "map.a", a)?)
        }
        "polynomial" => {
            // a_0 re,im ; a_1 re,im ; ...
            let (l, v) = s.required("map.coeffs")?;
            let coeffs = v.split(';').map(|c| parse_complex(l, "map.coeffs", c)).collect::<Result<Vec<_>, _>>()?;
            ConformalMap::polynomial(coeffs)
        }
        other => return err(line, format!("unknown map `{other}`")),
    };
    map.or_else(|e| err(line, e.to_string()))
}

fn parse_density(s: &Section) -> Result<DensityField, ConfigError> {
    let (line, kind) = s.get("density").unwrap_or((s.line, "constant"));
    Ok(match kind {
        "constant" => DensityField::Constant(s.num("density.c", 1.0)?),
        "gaussian" => DensityField::Gaussian { n: s.num("density.n", 1.0)? },
        "jacobian_power" => DensityField::PullbackJacobianPower { gamma: s.num("density.gamma", 1.0)? },
        "orlicz_canceling" => DensityField::PullbackOrliczCanceling { eps: s.num("density.eps", 1.5)? },
        "table" => {
            let range = |key: &str| -> Result<(f64, f64), ConfigError> {
                let (l, v) = s.required(key)?;
                match parse_list(l, key, v)?[..] {
                    [a, b] => Ok((a, b)),
                    _ => err(l, format!("`{key}` must be `lo,hi`")),
                }
            };
            let (lv, v) = s.required("density.values")?;
            let t = DensityTable::new(
                range("density.x_range")?,
                range("density.y_range")?,
                s.usize("density.nx", 0)?,
                s.usize("density.ny", 0)?,
                parse_list(lv, "density.values", v)?,
            );
            DensityField::Tabulated(t.or_else(|e| err(lv, e.to_string()))?)
        }
        other => return err(line, format!("unknown density `{other}`")),
    })
}

fn parse_norms(s: &Section) -> Result<Vec<NormSpec>, ConfigError> {
    let Some((line, v)) = s.get("norms") else {
        return Ok(Vec::new());
    };
    v.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.split_once(':') {
            None if t == "k_esssup" => Ok(NormSpec::KEsssup),
            None if t == "k_q" => Ok(NormSpec::Kq),
            Some(("luxemburg", y)) => parse_young(y)
                .map(|young| NormSpec::Luxemburg { label: y.to_string(), young })
                .or_else(|e| err(line, e)),
            Some(("k_phi", y)) => {
                parse_young(y).map(|young| NormSpec::KPhi { label: y.to_string(), young }).or_else(|e| err(line, e))
            }
            _ => err(line, format!("unknown norm `{t}`")),
        })
        .collect()
}

/// Checks every method's parameter range before anything is computed.
fn check_methods(s: &Scenario, line: usize) -> Result<(), ConfigError> {
    let p = &s.params;
    for m in &s.methods {
        let r = match m {
            BoundMethod::Esssup | BoundMethod::Orlicz => Ok(()),
            BoundMethod::LpKq => p
                .check_compact()
                .map_err(|e| densbound::Error::Parameter(format!("{e} (required by the L^q route: 2 < q < 2p/(2-p))"))),
            BoundMethod::Quasidisc | BoundMethod::GaussianSweep => {
                p.check_compact().and_then(|_| p.check_quasidisc()).and_then(|_| p.rho_exponent().map(|_| ()))
            }
            BoundMethod::OrliczQuasidisc => p.check_quasidisc(),
        };
        if let Err(e) = r {
            return err(line, format!("scenario `{}`, method {m}: {e}", s.id));
        }
    }
    Ok(())
}

fn build(section: &Section, index: usize) -> Result<Scenario, ConfigError> {
    for (k, (l, _)) in &section.entries {
        if !KEYS.contains(&k.as_str()) {
            return err(*l, format!("unknown key `{k}`"));
        }
    }
    let id = section.get("id").map_or_else(|| format!("scenario-{}", index + 1), |(_, v)| v.to_string());
    let d = ScenarioParams::default();
    let params = ScenarioParams {
        p: section.num("p", d.p)?,
        q: section.num("q", d.q)?,
        alpha: section.num("alpha", d.alpha)?,
        k: section.num("K", d.k)?,
        eps: section.num("eps", d.eps)?,
    };
    if let Err(e) = params.validate() {
        return err(section.line, format!("scenario `{id}`: {e}"));
    }
    let (ml, mv) = section.get("methods").unwrap_or((section.line, ""));
    let methods = mv
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<BoundMethod>().or_else(|e| err(ml, e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let quad_spec =
        |prefix: &str, n_r: usize, n_theta: usize, graded: Option<usize>| -> Result<QuadSpec, ConfigError> {
            let g = section.usize(&format!("{prefix}.graded"), graded.unwrap_or(0))?;
            let q = QuadSpec {
                n_r: section.usize(&format!("{prefix}.n_r"), n_r)?,
                n_theta: section.usize(&format!("{prefix}.n_theta"), n_theta)?,
                graded_levels: (g > 0).then_some(g),
            };
            match q.build() {
                Ok(_) => Ok(q),
                Err(e) => err(section.line, format!("scenario `{id}`: {e}")),
            }
        };
    let quad = quad_spec("quad", 16, 48, None)?;
    let sweep_quad = quad_spec("sweep", 12, 16, Some(12))?;
    let fem_level = section.usize("fem.level", 5)?;
    if !(2..=densbound::fem_oracle::MAX_LEVEL as usize).contains(&fem_level) {
        let l = section.get("fem.level").map_or(section.line, |x| x.0);
        return err(l, format!("`fem.level` must be in 2..={}, got {fem_level}", densbound::fem_oracle::MAX_LEVEL));
    }
    let b_m_eps = match section.get("b_m_eps") {
        None => None,
        Some((l, v)) => {
            let b = parse_f64(l, "b_m_eps", v)?;
            if !(b > 0.0) {
                return err(l, format!("`b_m_eps` must be positive, got {b}"));
            }
            Some(b)
        }
    };
    let sweep_n = match section.get("sweep.n") {
        None => vec![10.0, 100.0, 1000.0, 10000.0],
        Some((l, v)) => {
            let n = parse_list(l, "sweep.n", v)?;
            if n.iter().any(|&x| x < 1.0) {
                return err(l, "`sweep.n` entries must be >= 1");
            }
            n
        }
    };
    let s = Scenario {
        id,
        line: section.line,
        map: parse_map(section)?,
        density: parse_density(section)?,
        params,
        methods,
        quad,
        sweep_quad,
        fem_level: fem_level as u32,
        b_m_eps,
        sweep_n,
        norms: parse_norms(section)?,
    };
    check_methods(&s, ml)?;
    Ok(s)
}

/// Parses a whole file. Errors carry 1-based line numbers.
pub fn parse_config(text: &str) -> Result<Vec<Scenario>, ConfigError> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if t.starts_with('[') {
            if t != "[scenario]" {
                return err(line, format!("unknown section header `{t}`"));
            }
            sections.push(Section { line, entries: BTreeMap::new() });
            continue;
        }
        let Some((k, v)) = t.split_once('=') else {
            return err(line, format!("expected `key = value`, got `{t}`"));
        };
        let Some(sec) = sections.last_mut() else {
            return err(line, "key outside of a [scenario] section");
        };
        let (k, v) = (k.trim(), v.trim());
        if sec.entries.insert(k.to_string(), (line, v.to_string())).is_some() {
            return err(line, format!("duplicate key `{k}`"));
        }
    }
    if sections.is_empty() {
        return err(1, "no [scenario] sections");
    }
    let scenarios = sections.iter().enumerate().map(|(i, s)| build(s, i)).collect::<Result<Vec<_>, _>>()?;
    for (i, s) in scenarios.iter().enumerate() {
        if let Some(prev) = scenarios[..i].iter().find(|p| p.id == s.id) {
            return err(s.line, format!("scenario id `{}` already used at line {}", s.id, prev.line));
        }
    }
    Ok(scenarios)
}
