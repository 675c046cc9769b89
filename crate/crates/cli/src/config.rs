//! Run configuration and the `key = value` file format.

use serde::Serialize;

use mdexp_core::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Settings shared by all commands; command flags override file values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub mantissa_bits: usize,
    pub q_max: Option<String>,
    pub t_max: Option<u64>,
    pub eps_ladder: Option<Vec<f64>>,
    pub samples: Option<u64>,
    pub format: Format,
    pub output: Option<String>,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            mantissa_bits: mdexp_core::numerics::DEFAULT_MANTISSA_BITS,
            q_max: None,
            t_max: None,
            eps_ladder: None,
            samples: None,
            format: Format::Json,
            output: None,
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mantissa_bits < mdexp_core::numerics::MIN_MANTISSA_BITS {
            return Err(Error::invalid(
                "mantissa_bits",
                format!("must be at least {}", mdexp_core::numerics::MIN_MANTISSA_BITS),
            ));
        }
        if self.t_max == Some(0) {
            return Err(Error::invalid("t_max", "must be positive"));
        }
        if self.samples == Some(0) {
            return Err(Error::invalid("samples", "must be positive"));
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("threads", "must be positive"));
        }
        Ok(())
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::invalid(key, format!("`{v}` is not a valid value")))
}

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut c = RunConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::invalid("config", format!("line {} has no `=`", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        match k {
            "seed" => c.seed = num(k, v)?,
            "mantissa_bits" => c.mantissa_bits = num(k, v)?,
            "q_max" => {
                num::<u128>(k, &v.replace('_', ""))?;
                c.q_max = Some(v.to_string());
            }
            "t_max" => c.t_max = Some(num(k, v)?),
            "eps_ladder" => c.eps_ladder = Some(crate::parse_eps_list(v)?),
            "samples" => c.samples = Some(num(k, v)?),
            "format" => {
                c.format = match v {
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    _ => return Err(Error::invalid("format", format!("`{v}` is neither json nor csv"))),
                }
            }
            "output" => c.output = Some(v.to_string()),
            "threads" => c.threads = Some(num(k, v)?),
            _ => return Err(Error::invalid("config", format!("unknown key `{k}` on line {}", i + 1))),
        }
    }
    c.validate()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let c = parse_config("seed = 7 # trailing\n\nq_max=10_000\nformat = csv\neps_ladder = 2^-2,1/8\nthreads=2\n").unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.q_max.as_deref(), Some("10_000"));
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.eps_ladder, Some(vec![0.25, 0.125]));
        assert_eq!(c.threads, Some(2));
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(parse_config("seed 7").is_err());
        assert!(parse_config("seed = -1").is_err());
        assert!(parse_config("mantissa_bits = 8").is_err());
        assert!(parse_config("samples = 0").is_err());
        assert!(parse_config("format = xml").is_err());
        assert!(parse_config("q_max = 1e5").is_err());
        assert!(parse_config("speed = 3").is_err());
    }
}
