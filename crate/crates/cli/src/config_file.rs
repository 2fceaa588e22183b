//! Flat `key = value` scenario files.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Keys not present keep their default. Every key may appear once.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use hullcharge_core::{validate_config, ScenarioConfig};

/// One problem found in a config file. `line` is 1-based; `None` means the
/// offending value came from a default.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub line: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub origin: String,
    pub issues: Vec<Issue>,
}

impl ConfigError {
    fn single(origin: &str, line: Option<usize>, message: String) -> Self {
        Self {
            origin: origin.to_string(),
            issues: vec![Issue { line, message }],
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            match issue.line {
                Some(n) => write!(f, "{}:{}: {}", self.origin, n, issue.message)?,
                None => write!(f, "{}: {}", self.origin, issue.message)?,
            }
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

/// Every key the file format accepts, in echo order.
pub const KEYS: [&str; 25] = [
    "frequency",
    "tx_power",
    "tx_gain",
    "rx_gain",
    "rf_dc_efficiency",
    "harvest_threshold",
    "angle_exponent",
    "e_measurement",
    "e_tx_packet",
    "e_rx_packet",
    "n_sensors",
    "layout",
    "placement",
    "n_stops",
    "dwell_time",
    "phase_split",
    "uav_flight_power",
    "uav_battery",
    "cruise_speed",
    "path_perimeter",
    "standoff",
    "aspect_ratio",
    "cluster_spacing",
    "phase",
    "wpt_draw_mode",
];

fn parse_value<T: FromStr>(raw: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    raw.parse::<T>().map_err(|e| e.to_string())
}

/// Sets `key` on `config` from its textual value.
pub fn set_key(config: &mut ScenarioConfig, key: &str, raw: &str) -> Result<(), String> {
    let c = config;
    match key {
        "frequency" => c.link.frequency = parse_value(raw)?,
        "tx_power" => c.link.tx_power = parse_value(raw)?,
        "tx_gain" => c.link.tx_gain = parse_value(raw)?,
        "rx_gain" => c.link.rx_gain = parse_value(raw)?,
        "rf_dc_efficiency" => c.link.rf_dc_efficiency = parse_value(raw)?,
        "harvest_threshold" => c.link.harvest_threshold = parse_value(raw)?,
        "angle_exponent" => c.link.angle_exponent = parse_value(raw)?,
        "e_measurement" => c.costs.e_measurement = parse_value(raw)?,
        "e_tx_packet" => c.costs.e_tx_packet = parse_value(raw)?,
        "e_rx_packet" => c.costs.e_rx_packet = parse_value(raw)?,
        "n_sensors" => c.n_sensors = parse_value(raw)?,
        "layout" => c.layout = parse_value(raw)?,
        "placement" => c.placement = parse_value(raw)?,
        "n_stops" => c.n_stops = parse_value(raw)?,
        "dwell_time" => c.dwell_time = parse_value(raw)?,
        "phase_split" => c.phase_split = parse_value(raw)?,
        "uav_flight_power" => c.uav_flight_power = parse_value(raw)?,
        "uav_battery" => c.uav_battery = parse_value(raw)?,
        "cruise_speed" => c.cruise_speed = parse_value(raw)?,
        "path_perimeter" => c.path_perimeter = parse_value(raw)?,
        "standoff" => c.standoff = parse_value(raw)?,
        "aspect_ratio" => c.aspect_ratio = parse_value(raw)?,
        "cluster_spacing" => c.cluster_spacing = parse_value(raw)?,
        "phase" => c.phase = parse_value(raw)?,
        "wpt_draw_mode" => c.wpt_draw_mode = parse_value(raw)?,
        _ => return Err(format!("unknown key '{key}'")),
    }
    Ok(())
}

/// Resolved value of every key, in [`KEYS`] order. Floats use the shortest
/// text that parses back to the same value.
pub fn config_entries(c: &ScenarioConfig) -> Vec<(&'static str, String)> {
    let values = [
        c.link.frequency.to_string(),
        c.link.tx_power.to_string(),
        c.link.tx_gain.to_string(),
        c.link.rx_gain.to_string(),
        c.link.rf_dc_efficiency.to_string(),
        c.link.harvest_threshold.to_string(),
        c.link.angle_exponent.to_string(),
        c.costs.e_measurement.to_string(),
        c.costs.e_tx_packet.to_string(),
        c.costs.e_rx_packet.to_string(),
        c.n_sensors.to_string(),
        c.layout.to_string(),
        c.placement.to_string(),
        c.n_stops.to_string(),
        c.dwell_time.to_string(),
        c.phase_split.to_string(),
        c.uav_flight_power.to_string(),
        c.uav_battery.to_string(),
        c.cruise_speed.to_string(),
        c.path_perimeter.to_string(),
        c.standoff.to_string(),
        c.aspect_ratio.to_string(),
        c.cluster_spacing.to_string(),
        c.phase.to_string(),
        c.wpt_draw_mode.to_string(),
    ];
    KEYS.into_iter().zip(values).collect()
}

/// The resolved config in file syntax; parsing it gives the same config.
pub fn render_config(c: &ScenarioConfig) -> String {
    config_entries(c)
        .into_iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect()
}

/// Parses config text; `origin` names the source in error messages.
pub fn parse_config_str(text: &str, origin: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut config = ScenarioConfig::default();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut issues = Vec::new();

    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            issues.push(Issue {
                line: Some(line_no),
                message: format!("expected 'key = value', got '{line}'"),
            });
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            issues.push(Issue {
                line: Some(line_no),
                message: format!("expected 'key = value', got '{line}'"),
            });
            continue;
        }
        if let Some(first) = seen.get(key) {
            issues.push(Issue {
                line: Some(line_no),
                message: format!("duplicate key '{key}' (first set on line {first})"),
            });
            continue;
        }
        match set_key(&mut config, key, value) {
            Ok(()) => {
                seen.insert(key.to_string(), line_no);
            }
            Err(e) if KEYS.contains(&key) => issues.push(Issue {
                line: Some(line_no),
                message: format!("bad value for '{key}': {e}"),
            }),
            Err(e) => issues.push(Issue {
                line: Some(line_no),
                message: e,
            }),
        }
    }

    if issues.is_empty() {
        if let Err(violations) = validate_config(&config) {
            issues = violations
                .into_iter()
                .map(|v| match seen.get(v.field) {
                    Some(&n) => Issue {
                        line: Some(n),
                        message: v.to_string(),
                    },
                    None => Issue {
                        line: None,
                        message: format!("{v} (default value)"),
                    },
                })
                .collect();
        }
    }
    if issues.is_empty() {
        Ok(config)
    } else {
        Err(ConfigError {
            origin: origin.to_string(),
            issues,
        })
    }
}

pub fn parse_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::single(&origin, None, format!("cannot read config: {e}")))?;
    parse_config_str(&text, &origin)
}

/// Raw bytes of an optional config file, for the manifest digest.
pub fn read_config(path: Option<&Path>) -> Result<(ScenarioConfig, Vec<u8>), ConfigError> {
    match path {
        None => Ok((ScenarioConfig::default(), Vec::new())),
        Some(p) => {
            let origin = p.display().to_string();
            let bytes = std::fs::read(p).map_err(|e| {
                ConfigError::single(&origin, None, format!("cannot read config: {e}"))
            })?;
            let text = String::from_utf8(bytes.clone()).map_err(|_| {
                ConfigError::single(&origin, None, "config is not valid UTF-8".into())
            })?;
            Ok((parse_config_str(&text, &origin)?, bytes))
        }
    }
}
