//! Config assembly: file values, then command-line overrides.

use std::path::PathBuf;

use ch_spectral::config::{ExperimentConfig, FULL_SAMPLES};
use ch_spectral::{Error, Result};
use clap::Args;
use toml::{Table, Value};

/// Flags that mirror config keys. Anything given here wins over the file.
#[derive(Args, Debug, Default, Clone)]
pub struct Overrides {
    /// TOML config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Use the full-size grid (M_s = 256) when the grid is not set explicitly.
    #[arg(long = "paper-scale")]
    pub paper_scale: bool,

    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long = "S")]
    pub stabilizer: Option<f64>,
    #[arg(long = "N")]
    pub modes: Option<i64>,
    #[arg(long)]
    pub samples: Option<i64>,
    #[arg(long, value_name = "BOOL")]
    pub dealias: Option<bool>,
    #[arg(long = "ic.kind", value_name = "KIND")]
    pub ic_kind: Option<String>,
    #[arg(long = "ic.seed")]
    pub ic_seed: Option<i64>,
    #[arg(long = "ic.amplitude")]
    pub ic_amplitude: Option<f64>,
    #[arg(long = "ic.sharpness")]
    pub ic_sharpness: Option<f64>,
    #[arg(long = "ic.path")]
    pub ic_path: Option<String>,
    #[arg(long)]
    pub integrator: Option<String>,
    #[arg(long)]
    pub steps: Option<i64>,
    #[arg(long = "T")]
    pub final_time: Option<f64>,
    #[arg(long = "trace_stride")]
    pub trace_stride: Option<i64>,
    #[arg(long = "snapshot_times", value_delimiter = ',', num_args = 1..)]
    pub snapshot_times: Option<Vec<f64>>,
    #[arg(long = "out_dir")]
    pub out_dir: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long = "s_values", value_delimiter = ',', num_args = 1..)]
    pub s_values: Option<Vec<f64>>,
    #[arg(long)]
    pub tau0: Option<f64>,
    #[arg(long)]
    pub halvings: Option<i64>,
}

fn floats(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| Value::Float(*x)).collect())
}

impl Overrides {
    fn apply(&self, root: &mut Table) {
        let mut put = |key: &str, v: Option<Value>| {
            if let Some(v) = v {
                root.insert(key.to_string(), v);
            }
        };
        put("nu", self.nu.map(Value::Float));
        put("tau", self.tau.map(Value::Float));
        put("S", self.stabilizer.map(Value::Float));
        put("N", self.modes.map(Value::Integer));
        put("samples", self.samples.map(Value::Integer));
        put("dealias", self.dealias.map(Value::Boolean));
        put("integrator", self.integrator.clone().map(Value::String));
        put("steps", self.steps.map(Value::Integer));
        put("T", self.final_time.map(Value::Float));
        put("trace_stride", self.trace_stride.map(Value::Integer));
        put("snapshot_times", self.snapshot_times.as_deref().map(floats));
        put("out_dir", self.out_dir.clone().map(Value::String));
        put("beta", self.beta.map(Value::Float));
        put("s_values", self.s_values.as_deref().map(floats));
        put("tau0", self.tau0.map(Value::Float));
        put("halvings", self.halvings.map(Value::Integer));

        let ic_fields = [
            ("kind", self.ic_kind.clone().map(Value::String)),
            ("seed", self.ic_seed.map(Value::Integer)),
            ("amplitude", self.ic_amplitude.map(Value::Float)),
            ("sharpness", self.ic_sharpness.map(Value::Float)),
            ("path", self.ic_path.clone().map(Value::String)),
        ];
        if ic_fields.iter().any(|(_, v)| v.is_some()) {
            let ic = root
                .entry("ic")
                .or_insert_with(|| Value::Table(Table::new()));
            if let Value::Table(ic) = ic {
                for (k, v) in ic_fields {
                    if let Some(v) = v {
                        ic.insert(k.to_string(), v);
                    }
                }
            }
        }
    }

    /// The merged table before any defaults are filled in.
    pub fn table(&self) -> Result<Table> {
        let mut root = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                text.parse::<Table>()
                    .map_err(|e| Error::Config(format!("{}: {}", path.display(), e.message())))?
            }
            None => Table::new(),
        };
        self.apply(&mut root);
        if self.paper_scale && !root.contains_key("N") && !root.contains_key("samples") {
            root.insert("samples".into(), Value::Integer(FULL_SAMPLES as i64));
        }
        Ok(root)
    }

    pub fn resolve(&self) -> Result<ExperimentConfig> {
        finish(self.table()?)
    }
}

/// Deserializes a merged table, naming the offending key on failure.
pub fn finish(table: Table) -> Result<ExperimentConfig> {
    ExperimentConfig::parse(&table.to_string())
}
