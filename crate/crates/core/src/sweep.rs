//! Parameter sweeps producing `Q_N / N` (Markov) and `I_c / N` (bosonic
//! bath) curves, written as CSV with the header
//! `model,x_name,x,N,y,y_name`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{binary_entropy, N_MAX};
use crate::error::{Error, Result};
use crate::markov::{capacity, q_n, MarkovParams};
use crate::quadrature::QuadConfig;
use crate::spinboson::{coherent_info_unpolarized, IntegralMethod, SpinBosonParams};

pub const CSV_HEADER: &str = "model,x_name,x,N,y,y_name";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Markov,
    Spinboson,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Markov => f.write_str("markov"),
            Model::Spinboson => f.write_str("spinboson"),
        }
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markov" => Ok(Model::Markov),
            "spinboson" => Ok(Model::Spinboson),
            other => Err(Error::Config(format!(
                "unknown model '{other}' (expected markov or spinboson)"
            ))),
        }
    }
}

/// Swept parameter: `name:lo:hi:count`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRange {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl SweepRange {
    pub fn values(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.hi
                } else {
                    self.lo + step * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for SweepRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(Error::Config(format!(
                "sweep '{s}' must look like name:lo:hi:count"
            )));
        }
        let number = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number '{p}' in sweep '{s}'")))
        };
        let count = parts[3]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("bad point count '{}' in sweep '{s}'", parts[3])))?;
        Ok(Self {
            name: parts[0].trim().to_string(),
            lo: number(parts[1])?,
            hi: number(parts[2])?,
            count,
        })
    }
}

/// An entry of the N list; `inf` selects the asymptotic capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "NValueRepr", into = "NValueRepr")]
pub enum NValue {
    Finite(usize),
    Infinite,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NValueRepr {
    Int(usize),
    Text(String),
}

impl TryFrom<NValueRepr> for NValue {
    type Error = Error;

    fn try_from(r: NValueRepr) -> Result<Self> {
        match r {
            NValueRepr::Int(n) if n > 0 => Ok(NValue::Finite(n)),
            NValueRepr::Int(_) => Err(Error::Config("N must be positive".into())),
            NValueRepr::Text(s) => s.parse(),
        }
    }
}

impl From<NValue> for NValueRepr {
    fn from(n: NValue) -> Self {
        match n {
            NValue::Finite(n) => NValueRepr::Int(n),
            NValue::Infinite => NValueRepr::Text("inf".into()),
        }
    }
}

impl FromStr for NValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") {
            return Ok(NValue::Infinite);
        }
        match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(NValue::Finite(n)),
            _ => Err(Error::Config(format!("bad N '{s}' (positive integer or inf)"))),
        }
    }
}

pub fn parse_n_list(s: &str) -> Result<Vec<NValue>> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
}

/// A full sweep description, usually read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: Model,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub sweep: SweepRange,
    pub n_list: Vec<NValue>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    /// Evaluate the bath integral by quadrature with this absolute tolerance
    /// instead of the closed form.
    #[serde(default)]
    pub quadrature_tol: Option<f64>,
    #[serde(default)]
    pub gnuplot_stub: bool,
}

impl SweepConfig {
    /// `p0 = 0.85`, `mu` over `[0, 1]` in 101 points, N in {2, 4, 6, 8, 10, 100, inf}.
    pub fn markov_default() -> Self {
        Self {
            model: Model::Markov,
            params: BTreeMap::from([("p0".to_string(), 0.85)]),
            sweep: SweepRange {
                name: "mu".into(),
                lo: 0.0,
                hi: 1.0,
                count: 101,
            },
            n_list: [2, 4, 6, 8, 10, 100]
                .into_iter()
                .map(NValue::Finite)
                .chain([NValue::Infinite])
                .collect(),
            out: None,
            seed: 0,
            quadrature_tol: None,
            gnuplot_stub: false,
        }
    }

    /// `lambda = tau_c = tau_p = 1`, `xi` over `[0.05, 1]` in 20 points, N in {2, 4, 6, 8, 10}.
    pub fn spinboson_default() -> Self {
        Self {
            model: Model::Spinboson,
            params: BTreeMap::from([
                ("lambda".to_string(), 1.0),
                ("tau_c".to_string(), 1.0),
                ("tau_p".to_string(), 1.0),
            ]),
            sweep: SweepRange {
                name: "xi".into(),
                lo: 0.05,
                hi: 1.0,
                count: 20,
            },
            n_list: [2, 4, 6, 8, 10].into_iter().map(NValue::Finite).collect(),
            out: None,
            seed: 0,
            quadrature_tol: None,
            gnuplot_stub: false,
        }
    }

    pub fn default_for(model: Model) -> Self {
        match model {
            Model::Markov => Self::markov_default(),
            Model::Spinboson => Self::spinboson_default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    fn param(&self, name: &str, default: Option<f64>) -> Result<f64> {
        self.params
            .get(name)
            .copied()
            .or(default)
            .ok_or_else(|| Error::Config(format!("missing parameter '{name}'")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweep.count < 2 {
            return Err(Error::Config("sweep needs at least 2 points".into()));
        }
        if !(self.sweep.lo.is_finite() && self.sweep.hi.is_finite()) {
            return Err(Error::Config("sweep bounds must be finite".into()));
        }
        if self.n_list.is_empty() {
            return Err(Error::Config("N list is empty".into()));
        }
        let (lo, hi) = (self.sweep.lo.min(self.sweep.hi), self.sweep.lo.max(self.sweep.hi));
        let allowed: &[&str] = match self.model {
            Model::Markov => &["p0", "pz", "mu"],
            Model::Spinboson => &["lambda", "tau_c", "tau_p", "tau", "xi"],
        };
        if let Some(unknown) = self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::Config(format!(
                "parameter '{unknown}' does not apply to the {} model",
                self.model
            )));
        }
        match self.model {
            Model::Markov => {
                if !["mu", "p0"].contains(&self.sweep.name.as_str()) {
                    return Err(Error::Config(format!(
                        "markov sweeps take mu or p0, not '{}'",
                        self.sweep.name
                    )));
                }
                if lo < 0.0 || hi > 1.0 {
                    return Err(Error::Config(format!(
                        "{} range [{lo}, {hi}] leaves [0, 1]",
                        self.sweep.name
                    )));
                }
                if self.n_list.contains(&NValue::Finite(0)) {
                    return Err(Error::Config("N must be positive".into()));
                }
            }
            Model::Spinboson => {
                match self.sweep.name.as_str() {
                    "xi" => {
                        if lo == 0.0 {
                            return Err(Error::Config(
                                "xi = 0 means infinite spacing; use the analytic memoryless \
                                 value 1 - H((1+g)/2) instead"
                                    .into(),
                            ));
                        }
                        if lo < 0.0 || hi > 1.0 {
                            return Err(Error::Config(format!("xi range [{lo}, {hi}] leaves (0, 1]")));
                        }
                    }
                    "tau" => {
                        if lo < 0.0 {
                            return Err(Error::Config("tau must be >= 0".into()));
                        }
                    }
                    other => {
                        return Err(Error::Config(format!(
                            "spinboson sweeps take xi or tau, not '{other}'"
                        )))
                    }
                }
                for n in &self.n_list {
                    match n {
                        NValue::Infinite => {
                            return Err(Error::Config(
                                "N = inf is only available for the markov model".into(),
                            ))
                        }
                        NValue::Finite(n) if *n > N_MAX => {
                            return Err(Error::Config(format!("N = {n} exceeds maximum {N_MAX}")))
                        }
                        _ => {}
                    }
                }
            }
        }
        if let Some(tol) = self.quadrature_tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Error::Config("quadrature tolerance must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Which curve a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    /// Finite number of uses.
    Uses(usize),
    /// Asymptotic capacity (`N = inf`).
    Limit,
    /// The memoryless capacity reference line.
    Memoryless,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub series: Series,
    /// Bits per use.
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub model: Model,
    pub x_name: String,
    pub points: Vec<CurvePoint>,
}

impl CurveTable {
    /// Points of one series, in sweep order.
    pub fn series(&self, series: Series) -> Vec<CurvePoint> {
        self.points.iter().copied().filter(|p| p.series == series).collect()
    }

    fn y_name(&self, series: Series) -> &'static str {
        match (self.model, series) {
            (_, Series::Memoryless) => "memoryless_Q",
            (Model::Markov, Series::Limit) => "Q",
            (Model::Markov, Series::Uses(_)) => "Q_N/N",
            (Model::Spinboson, _) => "I_c/N",
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for p in &self.points {
            let n = match p.series {
                Series::Uses(n) => n.to_string(),
                Series::Limit => "inf".to_string(),
                Series::Memoryless => "ref".to_string(),
            };
            writeln!(
                w,
                "{},{},{},{},{},{}",
                self.model,
                self.x_name,
                format_sig(p.x),
                n,
                format_sig(p.y),
                self.y_name(p.series)
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }

    /// A gnuplot script plotting every series of `csv_path`.
    pub fn gnuplot_script(&self, csv_path: &Path) -> String {
        let file = csv_path.display();
        let y_label = match self.model {
            Model::Markov => "Q_N/N",
            Model::Spinboson => "I_c/N",
        };
        let mut labels: Vec<String> = Vec::new();
        for p in &self.points {
            let label = match p.series {
                Series::Uses(n) => n.to_string(),
                Series::Limit => "inf".into(),
                Series::Memoryless => "ref".into(),
            };
            if !labels.contains(&label) {
                labels.push(label);
            }
        }
        let plots: Vec<String> = labels
            .iter()
            .map(|label| {
                let style = if label == "ref" { "dashtype 2" } else { "" };
                format!(
                    "'{file}' using 3:(strcol(4) eq '{label}' ? $5 : 1/0) with lines {style} title 'N={label}'"
                )
            })
            .collect();
        format!(
            "set datafile separator ','\nset key autotitle columnhead\nset xlabel '{}'\n\
             set ylabel '{y_label}'\nset yrange [0:1]\nplot {}\n",
            self.x_name,
            plots.join(", \\\n     ")
        )
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros dropped.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `Q_N / N` for every N and swept value, plus the memoryless line `1 - H(p0)`.
pub fn run_markov_sweep(cfg: &SweepConfig) -> Result<CurveTable> {
    if cfg.model != Model::Markov {
        return Err(Error::Config("run_markov_sweep needs model = markov".into()));
    }
    cfg.validate()?;
    let xs = cfg.sweep.values();
    let sweep_p0 = cfg.sweep.name == "p0";
    let fixed_p0 = match (cfg.params.get("p0"), cfg.params.get("pz")) {
        (Some(p0), _) => *p0,
        (None, Some(pz)) => 1.0 - pz,
        (None, None) => 0.85,
    };
    let fixed_mu = cfg.param("mu", Some(0.0))?;
    let at = |x: f64, n: usize| {
        if sweep_p0 {
            MarkovParams::from_p0(x, fixed_mu, n)
        } else {
            MarkovParams::from_p0(fixed_p0, x, n)
        }
    };

    let mut points = Vec::new();
    for n in &cfg.n_list {
        for &x in &xs {
            let (series, y) = match *n {
                NValue::Finite(n) => {
                    let p = at(x, n)?;
                    (Series::Uses(n), q_n(&p) / n as f64)
                }
                NValue::Infinite => (Series::Limit, capacity(&at(x, 1)?)),
            };
            points.push(CurvePoint { x, series, y });
        }
    }
    for &x in &xs {
        let p0 = at(x, 1)?.p0();
        points.push(CurvePoint {
            x,
            series: Series::Memoryless,
            y: 1.0 - binary_entropy(p0)?,
        });
    }
    Ok(CurveTable {
        model: Model::Markov,
        x_name: cfg.sweep.name.clone(),
        points,
    })
}

/// `I_c / N` of the maximally mixed input for every N and swept value, plus
/// the memoryless line `1 - H((1 + g) / 2)`.
pub fn run_spinboson_sweep(cfg: &SweepConfig) -> Result<CurveTable> {
    if cfg.model != Model::Spinboson {
        return Err(Error::Config("run_spinboson_sweep needs model = spinboson".into()));
    }
    cfg.validate()?;
    let lambda = cfg.param("lambda", Some(1.0))?;
    let tau_c = cfg.param("tau_c", Some(1.0))?;
    let tau_p = cfg.param("tau_p", Some(tau_c))?;
    let method = match cfg.quadrature_tol {
        Some(abs_tol) => IntegralMethod::Quadrature(QuadConfig {
            abs_tol,
            ..crate::spinboson::default_quadrature()
        }),
        None => IntegralMethod::ClosedForm,
    };
    let xs = cfg.sweep.values();
    let build = |x: f64, n: usize| -> Result<SpinBosonParams> {
        let p = if cfg.sweep.name == "xi" {
            SpinBosonParams::from_xi(lambda, tau_c, tau_p, x, n)?
        } else {
            SpinBosonParams::new(lambda, tau_c, tau_p, x, n)?
        };
        Ok(p.with_integral_method(method))
    };

    let jobs: Vec<(usize, f64)> = cfg
        .n_list
        .iter()
        .filter_map(|n| match n {
            NValue::Finite(n) => Some(*n),
            NValue::Infinite => None,
        })
        .flat_map(|n| xs.iter().map(move |&x| (n, x)))
        .collect();
    let mut points: Vec<CurvePoint> = jobs
        .par_iter()
        .map(|&(n, x)| {
            let params = build(x, n)?;
            Ok(CurvePoint {
                x,
                series: Series::Uses(n),
                y: coherent_info_unpolarized(&params)? / n as f64,
            })
        })
        .collect::<Result<_>>()?;
    let reference = build(xs[0], 1)?.memoryless_capacity()?;
    points.extend(xs.iter().map(|&x| CurvePoint {
        x,
        series: Series::Memoryless,
        y: reference,
    }));
    Ok(CurveTable {
        model: Model::Spinboson,
        x_name: cfg.sweep.name.clone(),
        points,
    })
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<CurveTable> {
    match cfg.model {
        Model::Markov => run_markov_sweep(cfg),
        Model::Spinboson => run_spinboson_sweep(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn format_sig_matches_printf_g() {
        assert_eq!(format_sig(0.390159916163), "0.390159916163");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(2.0 / 3.0), "0.666666666667");
        assert_eq!(format_sig(123456.789), "123456.789");
        assert_eq!(format_sig(1e-7), "1e-7");
        assert_eq!(format_sig(-0.05), "-0.05");
        assert_eq!(format_sig(1.5e13), "1.5e13");
        assert_eq!(format_sig(0.99999999999999), "1");
    }

    #[test]
    fn parses_sweep_and_n_list() {
        let r: SweepRange = "mu:0:1:11".parse().unwrap();
        assert_eq!(r.values().len(), 11);
        assert_eq!(r.values()[10], 1.0);
        assert_abs_diff_eq!(r.values()[3], 0.3, epsilon = 1e-15);
        assert!("mu:0:1".parse::<SweepRange>().is_err());
        assert!("mu:a:1:3".parse::<SweepRange>().is_err());
        assert_eq!(
            parse_n_list("2, 10,inf").unwrap(),
            vec![NValue::Finite(2), NValue::Finite(10), NValue::Infinite]
        );
        assert!(parse_n_list("0").is_err());
        assert!(parse_n_list("two").is_err());
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut cfg = SweepConfig::markov_default();
        cfg.sweep.count = 1;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let mut cfg = SweepConfig::markov_default();
        cfg.sweep.hi = 1.5;
        assert!(cfg.validate().is_err());
        let mut cfg = SweepConfig::markov_default();
        cfg.sweep.name = "xi".into();
        assert!(cfg.validate().is_err());
        let mut cfg = SweepConfig::spinboson_default();
        cfg.sweep.lo = 0.0;
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("memoryless"), "{err}");
        let mut cfg = SweepConfig::spinboson_default();
        cfg.n_list.push(NValue::Infinite);
        assert!(cfg.validate().is_err());
        let mut cfg = SweepConfig::spinboson_default();
        cfg.params.insert("mu".into(), 0.5);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn markov_sweep_endpoints() {
        let mut cfg = SweepConfig::markov_default();
        cfg.sweep.count = 2;
        let table = run_markov_sweep(&cfg).unwrap();
        let limit = table.series(Series::Limit);
        assert_abs_diff_eq!(limit[0].y, 0.39015, epsilon = 1e-4);
        assert_eq!(limit[1].y, 1.0);
        let ten = table.series(Series::Uses(10));
        assert_abs_diff_eq!(ten[0].y, 0.39015, epsilon = 1e-4);
        assert_abs_diff_eq!(ten[1].y, 0.93902, epsilon = 1e-4);
        assert_eq!(table.series(Series::Memoryless).len(), 2);
        assert!(run_spinboson_sweep(&cfg).is_err());
    }

    #[test]
    fn csv_shape() {
        let mut cfg = SweepConfig::markov_default();
        cfg.sweep.count = 3;
        cfg.n_list = vec![NValue::Finite(2), NValue::Infinite];
        let csv = run_markov_sweep(&cfg).unwrap().to_csv_string();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 1 + 3 * 3);
        assert!(lines[1].starts_with("markov,mu,0,2,"));
        assert!(lines[4].starts_with("markov,mu,0,inf,"));
        assert!(lines[6].ends_with(",1,Q"));
        assert!(lines[7].contains(",ref,") && lines[7].ends_with("memoryless_Q"));
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = SweepConfig::markov_default();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(SweepConfig::from_toml(&text).unwrap(), cfg);
        let parsed = SweepConfig::from_toml(
            "model = \"spinboson\"\nn_list = [2, 4]\n[sweep]\nname = \"xi\"\nlo = 0.1\nhi = 1.0\ncount = 5\n",
        )
        .unwrap();
        assert_eq!(parsed.model, Model::Spinboson);
        assert!(SweepConfig::from_toml("model = \"other\"").is_err());
    }
}
