//! Run configuration: flat `key = value` text with section headers.
//!
//! ```text
//! [spectrum]
//! source = cavity L=3.141592653589793 m=0 M=20 x0=1
//! lapse = 1
//!
//! [switching]
//! profile = gaussian T=1
//!
//! [thermal]
//! beta = 1
//! lambda = 0.1
//!
//! [grid]
//! mu_min = -50
//! mu_max = 50
//! mu_n = 4096
//!
//! [oracle]
//! cutoff = 40
//!
//! [output]
//! dir = out
//! jobs = 4
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ini::Ini;
use qwork_core::spectra::{cavity_spectrum, esu_spectrum, load_spectrum, minkowski_continuum_spectrum, QuadratureRule};
use qwork_core::{lapse_rescale, ModeSpectrum, MuGrid, RunParams, SwitchingProfile};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumSource {
    Single { weight: f64, omega: f64, f2: f64 },
    Cavity { length: f64, mass: f64, modes: usize, position: f64 },
    Esu { radius: f64, mass: f64, max_n: usize },
    Minkowski { mass: f64, omega_max: f64, points: usize },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: SpectrumSource,
    pub lapse: f64,
    pub switching: SwitchingProfile,
    pub beta: f64,
    pub lambda: f64,
    pub grid: MuGrid,
    pub oracle_cutoff: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
}

const DEFAULT_MU_HALF_WIDTH: f64 = 50.0;
const DEFAULT_MU_N: usize = 4096;

const KNOWN_KEYS: &[(&str, &[&str])] = &[
    ("spectrum", &["source", "lapse"]),
    ("switching", &["profile"]),
    ("thermal", &["beta", "lambda"]),
    ("grid", &["mu_min", "mu_max", "mu_n"]),
    ("oracle", &["cutoff"]),
    ("output", &["dir", "jobs"]),
];

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn number<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.trim().parse().map_err(|_| bad(format!("`{key}`: cannot parse `{raw}`")))
}

/// `name k=v k=v` into the name and its arguments.
fn declaration(key: &str, raw: &str) -> Result<(String, BTreeMap<String, String>)> {
    let mut parts = raw.split_whitespace();
    let name = parts.next().ok_or_else(|| bad(format!("`{key}` is empty")))?.to_ascii_lowercase();
    let mut args = BTreeMap::new();
    for p in parts {
        let (k, v) = p.split_once('=').ok_or_else(|| bad(format!("`{key}`: expected k=v, got `{p}`")))?;
        if args.insert(k.to_string(), v.to_string()).is_some() {
            return Err(bad(format!("`{key}`: `{k}` given twice")));
        }
    }
    Ok((name, args))
}

struct Args<'a> {
    key: &'a str,
    map: BTreeMap<String, String>,
}

impl Args<'_> {
    fn take<T: std::str::FromStr>(&mut self, name: &str, default: Option<T>) -> Result<T> {
        match self.map.remove(name) {
            Some(v) => number(&format!("{} {name}", self.key), &v),
            None => default.ok_or_else(|| bad(format!("`{}` needs `{name}=`", self.key))),
        }
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            Some(k) => Err(bad(format!("`{}`: unknown argument `{k}`", self.key))),
            None => Ok(()),
        }
    }
}

fn parse_source(raw: &str, base: &Path) -> Result<SpectrumSource> {
    let (name, map) = declaration("source", raw)?;
    let mut a = Args { key: "source", map };
    let src = match name.as_str() {
        "single" => SpectrumSource::Single {
            weight: a.take("w", Some(1.0))?,
            omega: a.take("omega", None)?,
            f2: a.take("f2", Some(1.0))?,
        },
        "cavity" => SpectrumSource::Cavity {
            length: a.take("L", None)?,
            mass: a.take("m", Some(0.0))?,
            modes: a.take("M", None)?,
            position: a.take("x0", None)?,
        },
        "esu" => SpectrumSource::Esu {
            radius: a.take("a", None)?,
            mass: a.take("m", Some(0.0))?,
            max_n: a.take("max_n", None)?,
        },
        "minkowski" => SpectrumSource::Minkowski {
            mass: a.take("m", Some(0.0))?,
            omega_max: a.take("omega_max", None)?,
            points: a.take("points", Some(2048))?,
        },
        "file" => {
            let p: String = a.take("path", None)?;
            SpectrumSource::File(base.join(p))
        }
        other => return Err(bad(format!("unknown spectrum source `{other}`"))),
    };
    a.finish()?;
    Ok(src)
}

fn parse_switching(raw: &str) -> Result<SwitchingProfile> {
    let (name, map) = declaration("profile", raw)?;
    let mut a = Args { key: "profile", map };
    let profile = match name.as_str() {
        "gaussian" => SwitchingProfile::gaussian(a.take("T", None)?),
        "bump" | "smooth-bump" => SwitchingProfile::smooth_bump(a.take("start", None)?, a.take("end", None)?),
        "rectangular" => SwitchingProfile::rectangular(a.take("start", None)?, a.take("end", None)?),
        other => return Err(bad(format!("unknown switching profile `{other}`"))),
    }?;
    a.finish()?;
    Ok(profile)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| bad(e.to_string()))?;
        let mut values: BTreeMap<(String, String), String> = BTreeMap::new();
        for (section, props) in ini.iter() {
            if section.is_none() && props.is_empty() {
                continue;
            }
            let section = section.unwrap_or("");
            let known = KNOWN_KEYS
                .iter()
                .find(|(s, _)| *s == section)
                .ok_or_else(|| bad(format!("unknown section `[{section}]`")))?;
            for (k, v) in props.iter() {
                if !known.1.contains(&k) {
                    return Err(bad(format!("unknown key `{k}` in `[{section}]`")));
                }
                values.insert((section.to_string(), k.to_string()), v.to_string());
            }
        }
        let get = |s: &str, k: &str| values.get(&(s.to_string(), k.to_string())).map(String::as_str);
        let need = |s: &str, k: &str| get(s, k).ok_or_else(|| bad(format!("missing `{k}` in `[{s}]`")));

        let source = parse_source(need("spectrum", "source")?, base)?;
        let lapse = get("spectrum", "lapse").map(|v| number("lapse", v)).transpose()?.unwrap_or(1.0);
        let switching = parse_switching(get("switching", "profile").unwrap_or("gaussian T=1"))?;
        let beta = number("beta", need("thermal", "beta")?)?;
        let lambda = number("lambda", need("thermal", "lambda")?)?;
        let mu_min = get("grid", "mu_min").map(|v| number("mu_min", v)).transpose()?.unwrap_or(-DEFAULT_MU_HALF_WIDTH);
        let mu_max = get("grid", "mu_max").map(|v| number("mu_max", v)).transpose()?.unwrap_or(DEFAULT_MU_HALF_WIDTH);
        let mu_n = get("grid", "mu_n").map(|v| number("mu_n", v)).transpose()?.unwrap_or(DEFAULT_MU_N);
        let grid = MuGrid::new(mu_min, mu_max, mu_n)?;
        let oracle_cutoff = get("oracle", "cutoff").map(|v| number("cutoff", v)).transpose()?;
        let out_dir = get("output", "dir").map(|d| base.join(d));
        let jobs = get("output", "jobs").map(|v| number("jobs", v)).transpose()?;
        Ok(Self { source, lapse, switching, beta, lambda, grid, oracle_cutoff, out_dir, jobs })
    }

    /// Catalog or file spectrum, before the lapse.
    pub fn base_spectrum(&self) -> Result<ModeSpectrum> {
        let spec = match &self.source {
            SpectrumSource::Single { weight, omega, f2 } => ModeSpectrum::single(*weight, *omega, *f2)?,
            SpectrumSource::Cavity { length, mass, modes, position } => {
                cavity_spectrum(*length, *mass, *modes, *position)?
            }
            SpectrumSource::Esu { radius, mass, max_n } => esu_spectrum(*radius, *mass, *max_n)?,
            SpectrumSource::Minkowski { mass, omega_max, points } => {
                minkowski_continuum_spectrum(*mass, *omega_max, *points, QuadratureRule::default())?
            }
            SpectrumSource::File(p) => load_spectrum(p).map_err(|e| CliError::Spectrum { path: p.clone(), source: e })?,
        };
        Ok(spec)
    }

    pub fn spectrum_with_lapse(&self, lapse: f64) -> Result<ModeSpectrum> {
        Ok(lapse_rescale(&self.base_spectrum()?, lapse)?)
    }

    pub fn params(&self) -> Result<RunParams> {
        Ok(RunParams::new(self.spectrum_with_lapse(self.lapse)?, self.switching, self.beta, self.lambda)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[spectrum]\nsource = single omega=1\n[thermal]\nbeta = 1\nlambda = 0.1\n";

    #[test]
    fn minimal_config_defaults() {
        let c = RunConfig::parse(MINIMAL, Path::new(".")).unwrap();
        assert_eq!(c.source, SpectrumSource::Single { weight: 1.0, omega: 1.0, f2: 1.0 });
        assert_eq!(c.switching, SwitchingProfile::gaussian(1.0).unwrap());
        assert_eq!((c.grid.min, c.grid.max, c.grid.n), (-50.0, 50.0, 4096));
        assert_eq!(c.lapse, 1.0);
        assert!(c.oracle_cutoff.is_none());
    }

    #[test]
    fn full_config() {
        let text = "[spectrum]\nsource = cavity L=3.14 m=0.5 M=7 x0=1\nlapse = 2\n\
                    [switching]\nprofile = bump start=-2 end=3\n\
                    [thermal]\nbeta = 0.5\nlambda = 0.2\n\
                    [grid]\nmu_min = -10\nmu_max = 10\nmu_n = 64\n\
                    [oracle]\ncutoff = 30\n[output]\ndir = res\njobs = 3\n";
        let c = RunConfig::parse(text, Path::new("/tmp/x")).unwrap();
        assert_eq!(c.source, SpectrumSource::Cavity { length: 3.14, mass: 0.5, modes: 7, position: 1.0 });
        assert_eq!(c.switching, SwitchingProfile::smooth_bump(-2.0, 3.0).unwrap());
        assert_eq!(c.out_dir, Some(PathBuf::from("/tmp/x/res")));
        assert_eq!((c.oracle_cutoff, c.jobs, c.lapse), (Some(30), Some(3), 2.0));
        assert_eq!(c.params().unwrap().spectrum().line(0).omega, c.base_spectrum().unwrap().line(0).omega / 2.0);
    }

    #[test]
    fn rejects_unknown_and_missing() {
        for text in [
            "[spectrum]\nsource = single omega=1\n[thermal]\nbeta = 1\n",
            "[spectrum]\nsource = single omega=1\ncolour = red\n[thermal]\nbeta = 1\nlambda = 0\n",
            "[spectrum]\nsource = torus r=1\n[thermal]\nbeta = 1\nlambda = 0\n",
            "[spectrum]\nsource = single omega=1 q=2\n[thermal]\nbeta = 1\nlambda = 0\n",
            "[spectrum]\nsource = single omega=abc\n[thermal]\nbeta = 1\nlambda = 0\n",
            "[misc]\nx = 1\n",
        ] {
            assert!(matches!(RunConfig::parse(text, Path::new(".")), Err(CliError::Config(_))), "{text}");
        }
    }

    #[test]
    fn invalid_physics_surfaces_as_core_error() {
        let text = MINIMAL.replace("beta = 1", "beta = -1");
        let c = RunConfig::parse(&text, Path::new(".")).unwrap();
        assert!(matches!(c.params(), Err(CliError::Core(_))));
    }
}
