//! Result tables: fixed-schema CSV and mirroring JSON, with embedded
//! provenance. Two runs of the same spec and seed produce byte-identical
//! files (timings are recorded only on request, since measured wall time is
//! inherently unreproducible).

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use cogcap_core::mc::IntensitySearchResult;
use cogcap_core::scenario::{BindingConstraint, ScenarioConfig};
use cogcap_core::{Error, Result};

/// Fixed CSV column order: every scenario field, then the results.
pub const COLUMNS: &[&str] = &[
    "alpha",
    "p_p",
    "p_s",
    "d_p",
    "d_s",
    "beta_p",
    "beta_s",
    "lambda_p",
    "lambda_s",
    "n_tx",
    "m_rx",
    "k_null",
    "m_cancel",
    "eps_p_nc",
    "delta_p",
    "eps_s",
    "canceled_mode",
    "lambda_star_analytic",
    "lambda_star_mc",
    "ci_low",
    "ci_high",
    "binding_constraint",
    "capacity",
    "trials",
    "master_seed",
    "wall_time_s",
];

/// One result row of a capacity / sweep / scaling run.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub config: ScenarioConfig,
    pub lambda_star_analytic: Option<f64>,
    pub lambda_star_mc: Option<f64>,
    /// Wilson CI of the binding constraint's outage at `lambda_star_mc`.
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub binding_constraint: Option<BindingConstraint>,
    pub capacity: Option<f64>,
    pub trials: Option<u64>,
    pub master_seed: u64,
    pub wall_time_s: Option<f64>,
}

impl ResultRow {
    pub fn analytic(config: ScenarioConfig, master_seed: u64) -> ResultRow {
        ResultRow {
            config,
            lambda_star_analytic: None,
            lambda_star_mc: None,
            ci_low: None,
            ci_high: None,
            binding_constraint: None,
            capacity: None,
            trials: None,
            master_seed,
            wall_time_s: None,
        }
    }

    /// Attach the outcome of an intensity search: the MC intensity and the
    /// CI of whichever constraint binds there.
    pub fn with_search(mut self, search: &IntensitySearchResult, trials: u64) -> ResultRow {
        self.lambda_star_mc = Some(search.lambda_star_mc);
        let binding_est = match search.binding_constraint {
            BindingConstraint::PrimaryOutage => search.primary_outage,
            BindingConstraint::SecondaryOutage => search.secondary_outage,
        };
        self.ci_low = Some(binding_est.ci_low);
        self.ci_high = Some(binding_est.ci_high);
        self.binding_constraint = Some(search.binding_constraint);
        self.trials = Some(trials);
        self
    }
}

/// Format with 12 significant digits, plain decimal in a sane range and
/// scientific notation outside it; trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..12).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        trim_zeros(s)
    } else {
        let s = format!("{x:.11e}");
        // normalize exponent form: 1.23000000000e-7 -> 1.23e-7
        match s.split_once('e') {
            Some((mantissa, exp)) => format!("{}e{exp}", trim_zeros(mantissa.to_string())),
            None => s,
        }
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(fmt_sig).unwrap_or_default()
}

fn row_fields(row: &ResultRow) -> Vec<String> {
    let c = &row.config;
    vec![
        fmt_sig(c.alpha),
        fmt_sig(c.p_p),
        fmt_sig(c.p_s),
        fmt_sig(c.d_p),
        fmt_sig(c.d_s),
        fmt_sig(c.beta_p),
        fmt_sig(c.beta_s),
        fmt_sig(c.lambda_p),
        fmt_sig(c.lambda_s),
        c.n_tx.to_string(),
        c.m_rx.to_string(),
        c.k_null.to_string(),
        c.m_cancel.to_string(),
        fmt_sig(c.eps_p_nc),
        fmt_sig(c.delta_p),
        fmt_sig(c.eps_s),
        c.canceled_mode.to_string(),
        opt_f64(row.lambda_star_analytic),
        opt_f64(row.lambda_star_mc),
        opt_f64(row.ci_low),
        opt_f64(row.ci_high),
        row.binding_constraint.map(|b| b.to_string()).unwrap_or_default(),
        opt_f64(row.capacity),
        row.trials.map(|t| t.to_string()).unwrap_or_default(),
        row.master_seed.to_string(),
        // Zero unless timings were requested; measured time is not
        // byte-reproducible and the artifacts promise to be.
        fmt_sig(row.wall_time_s.unwrap_or(0.0)),
    ]
}

/// Run-level provenance embedded into every artifact.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub command: String,
    pub spec_echo: Value,
}

impl Provenance {
    pub fn new(command: &str, spec: &crate::spec::ExperimentSpec) -> Provenance {
        Provenance {
            command: command.to_string(),
            spec_echo: serde_json::to_value(spec).unwrap_or(Value::Null),
        }
    }

    fn version() -> &'static str {
        env!("CARGO_PKG_VERSION")
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidParameter(format!("cannot write {}: {e}", path.display()))
}

/// Write rows as CSV with provenance comment lines on top.
pub fn emit_csv(rows: &[ResultRow], prov: &Provenance, path: &Path) -> Result<()> {
    let mut out = Vec::new();
    writeln!(out, "# cogcap v{}", Provenance::version()).unwrap();
    writeln!(out, "# command={}", prov.command).unwrap();
    writeln!(out, "# spec={}", compact_json(&prov.spec_echo)).unwrap();
    writeln!(out, "{}", COLUMNS.join(",")).unwrap();
    for row in rows {
        writeln!(out, "{}", row_fields(row).join(",")).unwrap();
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}

fn compact_json(v: &Value) -> String {
    serde_json::to_string(v).unwrap_or_else(|_| "{}".to_string())
}

fn json_number(x: f64) -> Value {
    // Round through the 12-significant-digit CSV form so both artifacts
    // carry the same values.
    let rounded: f64 = fmt_sig(x).parse().unwrap_or(x);
    serde_json::Number::from_f64(rounded).map(Value::Number).unwrap_or(Value::Null)
}

/// Write rows as JSON mirroring the CSV columns, wrapped in a provenance
/// envelope.
pub fn emit_json(rows: &[ResultRow], prov: &Provenance, path: &Path) -> Result<()> {
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|row| {
            let mut m = Map::new();
            let fields = row_fields(row);
            for (name, text) in COLUMNS.iter().zip(fields.iter()) {
                let v = match *name {
                    "canceled_mode" | "binding_constraint" => {
                        if text.is_empty() {
                            Value::Null
                        } else {
                            Value::String(text.clone())
                        }
                    }
                    "n_tx" | "m_rx" | "k_null" | "m_cancel" | "trials" | "master_seed" => {
                        if text.is_empty() {
                            Value::Null
                        } else {
                            json!(text.parse::<u64>().unwrap_or(0))
                        }
                    }
                    _ => {
                        if text.is_empty() {
                            Value::Null
                        } else {
                            json_number(text.parse().unwrap_or(f64::NAN))
                        }
                    }
                };
                m.insert((*name).to_string(), v);
            }
            Value::Object(m)
        })
        .collect();
    let envelope = json!({
        "tool": "cogcap",
        "version": Provenance::version(),
        "command": prov.command,
        "spec": prov.spec_echo,
        "rows": json_rows,
    });
    let text = serde_json::to_string_pretty(&envelope)
        .map_err(|e| Error::InvalidParameter(format!("serialization failed: {e}")))?;
    std::fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use cogcap_core::scenario::CanceledMode;

    fn config() -> ScenarioConfig {
        ScenarioConfig {
            alpha: 3.0,
            p_p: 2.0,
            p_s: 1.0,
            d_p: 1.0,
            d_s: 1.0,
            beta_p: 1.0,
            beta_s: 1.0,
            lambda_p: 0.005,
            lambda_s: 0.0059,
            n_tx: 1,
            m_rx: 1,
            k_null: 0,
            m_cancel: 0,
            eps_p_nc: 0.0372756268745793,
            delta_p: 0.05,
            eps_s: 0.1,
            canceled_mode: CanceledMode::ExactSet,
        }
    }

    #[test]
    fn fmt_sig_examples() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.005930554078013699), "0.00593055407801");
        assert_eq!(fmt_sig(-2.5), "-2.5");
        assert_eq!(fmt_sig(1.5e-9), "1.5e-9");
        assert_eq!(fmt_sig(3.0e14), "3e14");
    }

    #[test]
    fn csv_has_header_only_for_zero_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        let prov = Provenance { command: "capacity".into(), spec_echo: serde_json::json!({}) };
        emit_csv(&[], &prov, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# cogcap v"));
        assert_eq!(lines.last().unwrap(), &COLUMNS.join(","));
    }

    #[test]
    fn json_mirrors_csv_values() {
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("r.csv");
        let json_path = dir.path().join("r.json");
        let mut row = ResultRow::analytic(config(), 77);
        row.lambda_star_analytic = Some(0.005930554078013699);
        row.capacity = Some(0.005337498670212329);
        let prov = Provenance { command: "capacity".into(), spec_echo: serde_json::json!({}) };
        emit_csv(std::slice::from_ref(&row), &prov, &csv_path).unwrap();
        emit_json(std::slice::from_ref(&row), &prov, &json_path).unwrap();
        let parsed: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
        let jrow = &parsed["rows"][0];
        assert_eq!(jrow["master_seed"], 77);
        let lambda = jrow["lambda_star_analytic"].as_f64().unwrap();
        assert!((lambda - 0.00593055407801).abs() < 1e-15);
        let csv_text = std::fs::read_to_string(&csv_path).unwrap();
        assert!(csv_text.contains("0.00593055407801"));
        assert!(csv_text.contains("secondary_outage") == false);
    }

    #[test]
    fn same_rows_same_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        let mut row = ResultRow::analytic(config(), 5);
        row.lambda_star_analytic = Some(0.123456789012345);
        let prov = Provenance { command: "sweep".into(), spec_echo: serde_json::json!({"x": 1}) };
        emit_csv(std::slice::from_ref(&row), &prov, &a).unwrap();
        emit_csv(std::slice::from_ref(&row), &prov, &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
}
