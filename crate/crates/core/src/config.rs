//! JSON run configuration with defaults, validation and a canonical form.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{build_grid, SphereGrid};
use crate::potential::PotentialConfig;
use crate::profile::ProfileFunction;
use crate::smatrix::{BornOrder, EnergyShell};

/// The coil profile as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileSpec {
    Bump {
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default = "default_center")]
        center: f64,
        #[serde(default = "default_half_width")]
        half_width: f64,
    },
    Zero {},
    /// (φ, a) samples strictly inside `support`.
    CustomSampled {
        support: [f64; 2],
        samples: Vec<[f64; 2]>,
    },
}

fn default_amplitude() -> f64 {
    0.5
}

fn default_center() -> f64 {
    FRAC_PI_2
}

fn default_half_width() -> f64 {
    FRAC_PI_4
}

impl Default for ProfileSpec {
    fn default() -> Self {
        Self::Bump {
            amplitude: default_amplitude(),
            center: default_center(),
            half_width: default_half_width(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_polar: usize,
    pub n_azimuth: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_polar: 16,
            n_azimuth: 32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Allowed change of kernel values under shell-quadrature refinement.
    pub kernel: f64,
    /// Distance to the arc counted as "on the arc".
    pub arc: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            kernel: 1e-6,
            arc: 0.05,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputPaths {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
}

/// Everything a run needs; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub profile: ProfileSpec,
    #[serde(rename = "R")]
    pub radius: f64,
    pub lambda: f64,
    pub grid: GridSpec,
    pub born_order: u8,
    pub tolerances: Tolerances,
    pub output: OutputPaths,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            profile: ProfileSpec::default(),
            radius: 1.0,
            lambda: 1.0,
            grid: GridSpec::default(),
            born_order: 1,
            tolerances: Tolerances::default(),
            output: OutputPaths::default(),
            seed: 0,
        }
    }
}

fn config_error(path: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

fn require(ok: bool, path: &str, value: f64, range: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(config_error(path, format!("{value} is outside {range}")))
    }
}

impl RunConfig {
    /// Range checks; the error names the offending field.
    pub fn validate(&self) -> Result<()> {
        require(
            self.lambda > 0.0 && self.lambda.is_finite(),
            "lambda",
            self.lambda,
            "(0, inf)",
        )?;
        require(
            self.radius > 0.0 && self.radius.is_finite(),
            "R",
            self.radius,
            "(0, inf)",
        )?;
        if self.born_order > 1 {
            return Err(config_error("born_order", format!("{} is not 0 or 1", self.born_order)));
        }
        let tol = &self.tolerances;
        require(
            tol.kernel > 0.0 && tol.kernel.is_finite(),
            "tolerances.kernel",
            tol.kernel,
            "(0, inf)",
        )?;
        require(
            tol.arc >= 0.0 && tol.arc.is_finite(),
            "tolerances.arc",
            tol.arc,
            "[0, inf)",
        )?;
        build_grid(self.grid.n_polar, self.grid.n_azimuth).map_err(|e| config_error("grid", e.to_string()))?;
        if let ProfileSpec::Bump {
            amplitude,
            center,
            half_width,
        } = self.profile
        {
            require(
                amplitude >= 0.0 && amplitude.is_finite(),
                "profile.amplitude",
                amplitude,
                "[0, inf)",
            )?;
            require(center > 0.0 && center < PI, "profile.center", center, "(0, pi)")?;
            require(
                half_width > 0.0 && center - half_width > 0.0 && center + half_width < PI,
                "profile.half_width",
                half_width,
                "(0, min(center, pi - center))",
            )?;
        }
        self.profile_function()?;
        Ok(())
    }

    pub fn profile_function(&self) -> Result<ProfileFunction> {
        let built = match &self.profile {
            ProfileSpec::Bump {
                amplitude,
                center,
                half_width,
            } => ProfileFunction::bump(*amplitude, *center, *half_width),
            ProfileSpec::Zero {} => Ok(ProfileFunction::Zero),
            ProfileSpec::CustomSampled { support, samples } => {
                let pairs: Vec<(f64, f64)> = samples.iter().map(|s| (s[0], s[1])).collect();
                ProfileFunction::sampled((support[0], support[1]), &pairs)
            }
        };
        built.map_err(|e| config_error("profile", e.to_string()))
    }

    pub fn potential(&self) -> Result<PotentialConfig> {
        PotentialConfig::new(self.profile_function()?, self.radius)
    }

    pub fn shell(&self) -> Result<EnergyShell> {
        EnergyShell::new(self.lambda)
    }

    pub fn sphere_grid(&self) -> Result<SphereGrid> {
        build_grid(self.grid.n_polar, self.grid.n_azimuth)
    }

    pub fn born(&self) -> BornOrder {
        if self.born_order == 0 {
            BornOrder::Zero
        } else {
            BornOrder::One
        }
    }

    /// Canonical JSON: every field present, fixed key order.
    pub fn emit(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Parse and validate a JSON config. Schema errors carry the JSON path of the
/// offending value.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        config_error(&path, e.into_inner().to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// The canonical form of a config document.
pub fn normalize(text: &str) -> Result<String> {
    parse_config(text).map(|c| c.emit())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path_of(text: &str) -> String {
        match parse_config(text) {
            Err(Error::Config { path, .. }) => path,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = parse_config("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(
            cfg.profile_function().unwrap(),
            ProfileFunction::bump(0.5, FRAC_PI_2, FRAC_PI_4).unwrap()
        );
        assert_eq!((cfg.grid.n_polar, cfg.grid.n_azimuth), (16, 32));
        assert_eq!(cfg.born(), BornOrder::One);
    }

    #[test]
    fn range_errors_name_the_field() {
        assert_eq!(path_of(r#"{"lambda": -1}"#), "lambda");
        assert_eq!(path_of(r#"{"R": 0}"#), "R");
        assert_eq!(path_of(r#"{"born_order": 2}"#), "born_order");
        assert_eq!(
            path_of(r#"{"profile": {"kind": "bump", "half_width": 2.0}}"#),
            "profile.half_width"
        );
        assert_eq!(
            path_of(r#"{"profile": {"kind": "bump", "center": 4.0}}"#),
            "profile.center"
        );
        assert_eq!(path_of(r#"{"grid": {"n_polar": 1, "n_azimuth": 4}}"#), "grid");
    }

    #[test]
    fn schema_errors_carry_paths() {
        assert_eq!(path_of(r#"{"lambda": "one"}"#), "lambda");
        assert_eq!(path_of(r#"{"grid": {"n_polar": 4}}"#), "grid");
        assert_eq!(
            path_of(r#"{"tolerances": {"kernel": 1e-6, "extra": 1}}"#),
            "tolerances.extra"
        );
        assert!(matches!(parse_config(r#"{"colour": 1}"#), Err(Error::Config { .. })));
        assert!(matches!(
            parse_config(r#"{"profile": {"kind": "ring"}}"#),
            Err(Error::Config { .. })
        ));
        assert!(matches!(
            parse_config(r#"{"profile": {"kind": "zero", "amplitude": 1}}"#),
            Err(Error::Config { .. })
        ));
        assert!(parse_config("[").is_err());
    }

    #[test]
    fn sampled_profile_config() {
        let text = r#"{"profile": {"kind": "custom-sampled", "support": [0.5, 2.5],
                       "samples": [[1.0, 0.3], [1.5, 0.8], [2.0, 0.2]]}}"#;
        let cfg = parse_config(text).unwrap();
        let p = cfg.profile_function().unwrap();
        assert!((p.eval(1.5).unwrap() - 0.8).abs() < 1e-14);
        let bad = r#"{"profile": {"kind": "custom-sampled", "support": [0.5, 2.5], "samples": [[3.0, 0.3]]}}"#;
        assert_eq!(path_of(bad), "profile");
    }

    #[test]
    fn normalize_fills_every_field() {
        let text = normalize(r#"{"lambda": 2.0, "output": {"csv": "out.csv"}}"#).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in [
            "profile",
            "R",
            "lambda",
            "grid",
            "born_order",
            "tolerances",
            "output",
            "seed",
        ] {
            assert!(value.get(key).is_some(), "{key}");
        }
        assert_eq!(normalize(&text).unwrap(), text);
    }

    fn arb_profile() -> impl Strategy<Value = ProfileSpec> {
        prop_oneof![
            Just(ProfileSpec::Zero {}),
            (0.0..3.0f64, 0.8..2.3f64, 0.05..0.75f64).prop_map(|(amplitude, center, half_width)| ProfileSpec::Bump {
                amplitude,
                center,
                half_width,
            }),
            proptest::collection::vec(0.0..2.0f64, 1..6).prop_map(|heights| {
                let step = 2.0 / (heights.len() + 1) as f64;
                ProfileSpec::CustomSampled {
                    support: [0.5, 2.5],
                    samples: heights
                        .iter()
                        .enumerate()
                        .map(|(i, &h)| [0.5 + step * (i + 1) as f64, h])
                        .collect(),
                }
            }),
        ]
    }

    proptest! {
        #[test]
        fn emit_parse_round_trip(profile in arb_profile(), radius in 0.1..10.0f64, lambda in 0.01..50.0f64,
                                 n_polar in 2usize..40, n_azimuth in 4usize..80, born_order in 0u8..2,
                                 seed in any::<u64>(), with_csv in any::<bool>()) {
            let cfg = RunConfig {
                profile,
                radius,
                lambda,
                grid: GridSpec { n_polar, n_azimuth },
                born_order,
                seed,
                output: OutputPaths { csv: with_csv.then(|| "table.csv".into()), json: None },
                ..RunConfig::default()
            };
            let text = cfg.emit();
            prop_assert_eq!(parse_config(&text).unwrap(), cfg);
            prop_assert_eq!(normalize(&text).unwrap(), text);
        }
    }
}
