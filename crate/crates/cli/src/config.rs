//! Plain-text configuration files: `key = value` lines mirroring the flag
//! names. Unknown keys are hard errors so typos fail fast; `#` starts a
//! comment. Flags override file values, defaults fill the rest.

use otasync::experiments::{Overrides, ToaKind};
use otasync::{Correction, RtgeGranularity};

/// Values read from a config file; every field optional.
#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    pub overrides: Overrides,
    pub out: Option<String>,
    pub format: Option<String>,
    pub jobs: Option<usize>,
}

pub fn parse_toa_kind(s: &str) -> Result<ToaKind, String> {
    match s {
        "table" => Ok(ToaKind::Table),
        "gaussian" => Ok(ToaKind::Gaussian),
        other => Err(format!("toa-model must be 'table' or 'gaussian', got '{other}'")),
    }
}

pub fn parse_correction(s: &str) -> Result<Correction<f64>, String> {
    match s {
        "none" => Ok(Correction::None),
        "auto" => Ok(Correction::HalfGranularity),
        other => other
            .parse::<f64>()
            .map(Correction::Custom)
            .map_err(|_| format!("correction must be 'none', 'auto' or a number in ns, got '{other}'")),
    }
}

pub fn parse_granularity_range(s: &str) -> Result<RtgeGranularity<f64>, String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("granularity-range must be 'lo:hi', got '{s}'"))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|_| format!("granularity-range lower bound '{lo}' is not a number"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|_| format!("granularity-range upper bound '{hi}' is not a number"))?;
    if lo < 0.0 || hi < lo {
        return Err(format!("granularity-range needs 0 <= lo <= hi, got {lo}:{hi}"));
    }
    Ok(RtgeGranularity::Range { lo, hi })
}

fn parse_scs_list(s: &str) -> Result<Vec<u32>, String> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<u32>()
                .map_err(|_| format!("scs value '{part}' is not an integer"))
        })
        .collect()
}

pub fn parse_config_file(text: &str) -> Result<FileConfig, String> {
    let mut cfg = FileConfig::default();
    let mut saw_fixed_granularity = false;
    let mut saw_range_granularity = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected 'key = value', got '{line}'", lineno + 1))?;
        let key = key.trim();
        let value = value.trim();
        let bad_num = |name: &str| format!("line {}: {name} value '{value}' is not a number", lineno + 1);
        match key {
            "scs" => cfg.overrides.scs = Some(parse_scs_list(value)?),
            "kappa" => cfg.overrides.kappa = Some(value.parse().map_err(|_| bad_num("kappa"))?),
            "period-ms" => {
                cfg.overrides.period_ms = Some(value.parse().map_err(|_| bad_num("period-ms"))?)
            }
            "duration-ms" => {
                cfg.overrides.duration_ms = Some(value.parse().map_err(|_| bad_num("duration-ms"))?)
            }
            "tick-ms" => cfg.overrides.tick_ms = Some(value.parse().map_err(|_| bad_num("tick-ms"))?),
            "theta-ppm" => {
                cfg.overrides.theta_ppm = Some(value.parse().map_err(|_| bad_num("theta-ppm"))?)
            }
            "granularity-ns" => {
                let g: f64 = value.parse().map_err(|_| bad_num("granularity-ns"))?;
                cfg.overrides.granularity = Some(RtgeGranularity::Fixed(g));
                saw_fixed_granularity = true;
            }
            "granularity-range" => {
                cfg.overrides.granularity = Some(parse_granularity_range(value)?);
                saw_range_granularity = true;
            }
            "toa-model" => cfg.overrides.toa = Some(parse_toa_kind(value)?),
            "correction" => cfg.overrides.correction = Some(parse_correction(value)?),
            "samples" => cfg.overrides.samples = Some(value.parse().map_err(|_| bad_num("samples"))?),
            "seed" => cfg.overrides.seed = Some(value.parse().map_err(|_| bad_num("seed"))?),
            "out" => cfg.out = Some(value.to_string()),
            "format" => cfg.format = Some(value.to_string()),
            "jobs" => cfg.jobs = Some(value.parse().map_err(|_| bad_num("jobs"))?),
            unknown => {
                return Err(format!("line {}: unknown key '{unknown}'", lineno + 1));
            }
        }
    }
    if saw_fixed_granularity && saw_range_granularity {
        return Err("granularity-ns and granularity-range are mutually exclusive".into());
    }
    Ok(cfg)
}

/// Overlay `top` onto `base`: set fields of `top` win.
pub fn merge_overrides(base: Overrides, top: Overrides) -> Overrides {
    Overrides {
        scs: top.scs.or(base.scs),
        kappa: top.kappa.or(base.kappa),
        period_ms: top.period_ms.or(base.period_ms),
        duration_ms: top.duration_ms.or(base.duration_ms),
        tick_ms: top.tick_ms.or(base.tick_ms),
        theta_ppm: top.theta_ppm.or(base.theta_ppm),
        granularity: top.granularity.or(base.granularity),
        toa: top.toa.or(base.toa),
        correction: top.correction.or(base.correction),
        samples: top.samples.or(base.samples),
        seed: top.seed.or(base.seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys_and_comments() {
        let cfg = parse_config_file(
            "# comment\nscs = 15,30\nperiod-ms = 60  # trailing\nseed = 9\nformat = json\n",
        )
        .unwrap();
        assert_eq!(cfg.overrides.scs, Some(vec![15, 30]));
        assert_eq!(cfg.overrides.period_ms, Some(60.0));
        assert_eq!(cfg.overrides.seed, Some(9));
        assert_eq!(cfg.format.as_deref(), Some("json"));
    }

    #[test]
    fn unknown_key_is_fatal() {
        let err = parse_config_file("perod-ms = 60\n").unwrap_err();
        assert!(err.contains("unknown key"), "{err}");
    }

    #[test]
    fn granularity_forms() {
        let cfg = parse_config_file("granularity-ns = 100\n").unwrap();
        assert_eq!(cfg.overrides.granularity, Some(RtgeGranularity::Fixed(100.0)));
        let cfg = parse_config_file("granularity-range = 10:300\n").unwrap();
        assert_eq!(
            cfg.overrides.granularity,
            Some(RtgeGranularity::Range { lo: 10.0, hi: 300.0 })
        );
        assert!(parse_config_file("granularity-ns = 1\ngranularity-range = 1:2\n").is_err());
        assert!(parse_granularity_range("300:10").is_err());
    }

    #[test]
    fn correction_forms() {
        assert_eq!(parse_correction("none").unwrap(), Correction::None);
        assert_eq!(parse_correction("auto").unwrap(), Correction::HalfGranularity);
        assert_eq!(parse_correction("-12.5").unwrap(), Correction::Custom(-12.5));
        assert!(parse_correction("half").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = parse_config_file("seed = 1\nkappa = 1\n").unwrap();
        let flags = Overrides {
            seed: Some(2),
            ..Overrides::default()
        };
        let merged = merge_overrides(file.overrides, flags);
        assert_eq!(merged.seed, Some(2));
        assert_eq!(merged.kappa, Some(1.0));
    }
}
