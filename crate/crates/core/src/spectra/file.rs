//! Plain-text spectrum files.
//!
//! ```text
//! # comment lines start with '#'
//! # provenance: free text, preserved on load
//! kind: discrete
//! 1.0 1.0 0.6366197723675814
//! ```
//!
//! Data lines are `weight omega f2`, whitespace separated.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{ModeLine, ModeSpectrum, SpectrumKind};
use crate::error::{Error, Result};

const PROVENANCE_TAG: &str = "# provenance:";

pub fn parse_spectrum(text: &str) -> Result<ModeSpectrum> {
    let mut kind = None;
    let mut provenance = String::new();
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix(PROVENANCE_TAG) {
            provenance = rest.trim().to_string();
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("kind:") {
            if kind.is_some() {
                return Err(Error::Parse { line: line_no, reason: "duplicate kind header".into() });
            }
            kind = Some(match rest.trim() {
                "discrete" => SpectrumKind::Discrete,
                "continuum" => SpectrumKind::Continuum,
                other => {
                    return Err(Error::Parse { line: line_no, reason: format!("unknown spectrum kind `{other}`") })
                }
            });
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                reason: format!("expected `weight omega f2`, found {} fields", fields.len()),
            });
        }
        let mut vals = [0.0; 3];
        for (v, f) in vals.iter_mut().zip(&fields) {
            *v = f
                .parse::<f64>()
                .map_err(|e| Error::Parse { line: line_no, reason: format!("`{f}`: {e}") })?;
        }
        let mode = ModeLine::new(vals[0], vals[1], vals[2])
            .map_err(|e| Error::Parse { line: line_no, reason: e.to_string() })?;
        lines.push(mode);
    }
    let kind = kind.ok_or(Error::Parse { line: 0, reason: "missing `kind:` header".into() })?;
    if lines.is_empty() {
        return Err(Error::Parse { line: 0, reason: "no data lines".into() });
    }
    ModeSpectrum::new(lines, kind, provenance)
}

pub fn write_spectrum(spec: &ModeSpectrum, mut out: impl Write) -> Result<()> {
    writeln!(out, "# mode spectrum: weight omega f2")?;
    if !spec.provenance().is_empty() {
        writeln!(out, "{PROVENANCE_TAG} {}", spec.provenance().replace('\n', " "))?;
    }
    writeln!(out, "kind: {}", spec.kind())?;
    for l in spec.lines() {
        writeln!(out, "{:.16e} {:.16e} {:.16e}", l.weight, l.omega, l.f2)?;
    }
    Ok(())
}

pub fn load_spectrum(path: impl AsRef<Path>) -> Result<ModeSpectrum> {
    parse_spectrum(&fs::read_to_string(path)?)
}

pub fn save_spectrum(spec: &ModeSpectrum, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_spectrum(spec, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{cavity_spectrum, esu_spectrum, lapse_rescale};
    use proptest::prelude::*;

    #[test]
    fn round_trip_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cavity.txt");
        let s = cavity_spectrum(std::f64::consts::PI, 0.3, 12, 1.0).unwrap();
        save_spectrum(&s, &path).unwrap();
        let back = load_spectrum(&path).unwrap();
        assert_eq!(back.to_lines(), s.to_lines());
        assert_eq!(back.kind(), s.kind());
        assert_eq!(back.provenance(), s.provenance());
    }

    #[test]
    fn negative_omega_rejected_with_line_number() {
        let text = "# test\nkind: discrete\n1.0 1.0 0.5\n1.0 -2.0 0.5\n";
        match parse_spectrum(text) {
            Err(Error::Parse { line, reason }) => {
                assert_eq!(line, 4);
                assert!(reason.contains("omega"), "{reason}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_lines_rejected() {
        assert!(matches!(parse_spectrum("kind: discrete\n1.0 1.0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_spectrum("kind: discrete\n1.0 x 1.0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_spectrum("1.0 1.0 1.0\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_spectrum("kind: lattice\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_spectrum("kind: continuum\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn published_cavity_file_reproduces_catalog() {
        // Regenerate the reference cavity with an independent formula and
        // compare with the catalog output after a file round trip.
        let l = std::f64::consts::PI;
        let x0 = 1.0;
        let mut text = String::from("kind: discrete\n");
        for n in 1..=20 {
            let f2 = 2.0 / l * (n as f64 * x0).sin().powi(2);
            text.push_str(&format!("1 {} {:e}\n", n as f64, f2));
        }
        let file_spec = parse_spectrum(&text).unwrap();
        let catalog = cavity_spectrum(l, 0.0, 20, x0).unwrap();
        for (a, b) in file_spec.lines().zip(catalog.lines()) {
            assert!((a.omega - b.omega).abs() < 1e-14);
            assert!((a.f2 - b.f2).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn write_then_parse_is_identity(radius in 0.1f64..5.0, m in 0.0f64..2.0, n in 1usize..30, lapse in 0.2f64..5.0) {
            let s = lapse_rescale(&esu_spectrum(radius, m, n).unwrap(), lapse).unwrap();
            let mut buf = Vec::new();
            write_spectrum(&s, &mut buf).unwrap();
            let back = parse_spectrum(std::str::from_utf8(&buf).unwrap()).unwrap();
            prop_assert_eq!(back.to_lines(), s.to_lines());
        }
    }
}
