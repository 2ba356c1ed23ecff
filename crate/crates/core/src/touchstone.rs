//! Touchstone v1 two-port (.s2p) ingestion.
//!
//! Enough of the format to feed measured S-parameters into the
//! characterization and application pipelines: the option line
//! `# <unit> S <format> R <ohms>`, `!` comments, and data rows of
//! `freq S11 S21 S12 S22` pairs in RI, MA or DB encoding.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::freq::{ComplexResponse, FrequencyGrid};
use crate::{Error, Result};

/// Frequency unit of the option line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FreqUnit {
    Hz,
    KHz,
    MHz,
    GHz,
}

impl FreqUnit {
    pub fn scale_to_hz(&self) -> f64 {
        match self {
            FreqUnit::Hz => 1.0,
            FreqUnit::KHz => 1e3,
            FreqUnit::MHz => 1e6,
            FreqUnit::GHz => 1e9,
        }
    }

    fn parse(token: &str) -> Option<Self> {
        match token.to_ascii_uppercase().as_str() {
            "HZ" => Some(FreqUnit::Hz),
            "KHZ" => Some(FreqUnit::KHz),
            "MHZ" => Some(FreqUnit::MHz),
            "GHZ" => Some(FreqUnit::GHz),
            _ => None,
        }
    }

    fn token(&self) -> &'static str {
        match self {
            FreqUnit::Hz => "Hz",
            FreqUnit::KHz => "kHz",
            FreqUnit::MHz => "MHz",
            FreqUnit::GHz => "GHz",
        }
    }
}

/// Complex-number encoding of the data columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NumberFormat {
    /// Real, imaginary.
    Ri,
    /// Magnitude, angle in degrees.
    Ma,
    /// 20 log10 magnitude, angle in degrees.
    Db,
}

impl NumberFormat {
    fn parse(token: &str) -> Option<Self> {
        match token.to_ascii_uppercase().as_str() {
            "RI" => Some(NumberFormat::Ri),
            "MA" => Some(NumberFormat::Ma),
            "DB" => Some(NumberFormat::Db),
            _ => None,
        }
    }

    fn token(&self) -> &'static str {
        match self {
            NumberFormat::Ri => "RI",
            NumberFormat::Ma => "MA",
            NumberFormat::Db => "DB",
        }
    }

    fn decode(&self, a: f64, b: f64) -> Complex64 {
        match self {
            NumberFormat::Ri => Complex64::new(a, b),
            NumberFormat::Ma => Complex64::from_polar(a, b.to_radians()),
            NumberFormat::Db => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
        }
    }

    fn encode(&self, v: Complex64) -> (f64, f64) {
        match self {
            NumberFormat::Ri => (v.re, v.im),
            NumberFormat::Ma => (v.norm(), v.arg().to_degrees()),
            NumberFormat::Db => (20.0 * v.norm().log10(), v.arg().to_degrees()),
        }
    }
}

/// One frequency row of a two-port record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPortRow {
    pub freq_hz: f64,
    pub s11: Complex64,
    pub s21: Complex64,
    pub s12: Complex64,
    pub s22: Complex64,
}

/// Parsed two-port Touchstone file.
#[derive(Debug, Clone, PartialEq)]
pub struct TouchstoneRecord {
    pub freq_unit: FreqUnit,
    pub format: NumberFormat,
    pub reference_ohms: f64,
    pub rows: Vec<TwoPortRow>,
    /// Human-readable notes emitted during parsing (e.g. |S21| above 1).
    pub warnings: Vec<String>,
}

impl TouchstoneRecord {
    pub fn span_hz(&self) -> (f64, f64) {
        (self.rows[0].freq_hz, self.rows[self.rows.len() - 1].freq_hz)
    }
}

/// Parse Touchstone v1 two-port text.
///
/// Comment lines start with `!`; the option line starts with `#` and must
/// appear before the data; the parameter must be `S`. Frequencies must be
/// strictly increasing. |S21| up to 1.1 is tolerated (measurement ripple)
/// with a warning above 1.
pub fn parse_touchstone(text: &str) -> Result<TouchstoneRecord> {
    let mut option: Option<(FreqUnit, NumberFormat, f64)> = None;
    let mut rows: Vec<TwoPortRow> = Vec::new();
    let mut warnings = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        // Strip trailing comments.
        let line = match raw_line.find('!') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if option.is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "duplicate option line".into(),
                });
            }
            option = Some(parse_option_line(rest, line_no)?);
            continue;
        }
        let Some((unit, format, _)) = option else {
            return Err(Error::Parse {
                line: line_no,
                message: "data before the option line (expected \"# <unit> S <fmt> R <ohms>\")".into(),
            });
        };

        let fields: Vec<f64> = {
            let mut vals = Vec::new();
            for tok in line.split_whitespace() {
                let v: f64 = tok.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("not a number: {tok:?}"),
                })?;
                vals.push(v);
            }
            vals
        };
        if fields.len() != 9 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 9 columns (freq + 4 complex pairs), got {}", fields.len()),
            });
        }
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse { line: line_no, message: "non-finite entry".into() });
        }
        let freq_hz = fields[0] * unit.scale_to_hz();
        if let Some(last) = rows.last() {
            if freq_hz <= last.freq_hz {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!(
                        "frequencies must be strictly increasing ({} Hz after {} Hz)",
                        freq_hz, last.freq_hz
                    ),
                });
            }
        }
        let s21 = format.decode(fields[3], fields[4]);
        if s21.norm() > 1.1 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("|S21| = {} is beyond measurement ripple tolerance 1.1", s21.norm()),
            });
        }
        if s21.norm() > 1.0 {
            warnings.push(format!("line {line_no}: |S21| = {:.6} exceeds 1 (passive ripple?)", s21.norm()));
        }
        rows.push(TwoPortRow {
            freq_hz,
            s11: format.decode(fields[1], fields[2]),
            s21,
            s12: format.decode(fields[5], fields[6]),
            s22: format.decode(fields[7], fields[8]),
        });
    }

    let Some((freq_unit, format, reference_ohms)) = option else {
        return Err(Error::Parse { line: 0, message: "missing option line".into() });
    };
    if rows.is_empty() {
        return Err(Error::Parse { line: 0, message: "no data rows".into() });
    }
    Ok(TouchstoneRecord { freq_unit, format, reference_ohms, rows, warnings })
}

fn parse_option_line(rest: &str, line_no: usize) -> Result<(FreqUnit, NumberFormat, f64)> {
    let tokens: Vec<&str> = rest.split_whitespace().collect();
    let mut unit = FreqUnit::GHz;
    let mut format = NumberFormat::Ma;
    let mut reference = 50.0;
    let mut saw_parameter = false;
    let mut i = 0;
    while i < tokens.len() {
        let tok = tokens[i];
        if let Some(u) = FreqUnit::parse(tok) {
            unit = u;
        } else if let Some(f) = NumberFormat::parse(tok) {
            format = f;
        } else if tok.eq_ignore_ascii_case("R") {
            i += 1;
            let Some(val) = tokens.get(i) else {
                return Err(Error::Parse { line: line_no, message: "R without an impedance value".into() });
            };
            reference = val.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad reference impedance {val:?}"),
            })?;
        } else if tok.eq_ignore_ascii_case("S") {
            saw_parameter = true;
        } else if ["Y", "Z", "G", "H"].iter().any(|p| tok.eq_ignore_ascii_case(p)) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("parameter {tok} not supported; only S-parameters"),
            });
        } else {
            return Err(Error::Parse { line: line_no, message: format!("unrecognized option token {tok:?}") });
        }
        i += 1;
    }
    if !saw_parameter {
        return Err(Error::Parse { line: line_no, message: "option line does not declare S-parameters".into() });
    }
    Ok((unit, format, reference))
}

/// Serialize a record back to Touchstone text in its own format.
pub fn serialize_touchstone(record: &TouchstoneRecord) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# {} S {} R {}\n",
        record.freq_unit.token(),
        record.format.token(),
        record.reference_ohms
    ));
    let scale = record.freq_unit.scale_to_hz();
    for row in &record.rows {
        let mut fields = vec![format!("{:.12e}", row.freq_hz / scale)];
        for s in [row.s11, row.s21, row.s12, row.s22] {
            let (a, b) = record.format.encode(s);
            fields.push(format!("{a:.12e}"));
            fields.push(format!("{b:.12e}"));
        }
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out
}

/// Resample S21 onto a uniform grid covering `[band_lo_hz, band_hi_hz]`,
/// interpolating real and imaginary parts linearly between measured points.
pub fn to_response(record: &TouchstoneRecord, band_lo_hz: f64, band_hi_hz: f64, points: usize) -> Result<ComplexResponse> {
    let (lo, hi) = record.span_hz();
    if band_lo_hz < lo || band_hi_hz > hi {
        return Err(Error::OutOfRange(format!(
            "requested band [{band_lo_hz}, {band_hi_hz}] Hz exceeds record span [{lo}, {hi}] Hz"
        )));
    }
    let grid = FrequencyGrid::spanning(band_lo_hz, band_hi_hz, points)?;
    let mut values = Vec::with_capacity(grid.count());
    let mut cursor = 0usize;
    for f in grid.iter() {
        while cursor + 2 < record.rows.len() && record.rows[cursor + 1].freq_hz < f {
            cursor += 1;
        }
        let a = &record.rows[cursor];
        let b = &record.rows[cursor + 1];
        let spacing = b.freq_hz - a.freq_hz;
        // Grid points that land on measured points take the measured value
        // bit-identically.
        if (f - a.freq_hz).abs() <= 1e-9 * spacing {
            values.push(a.s21);
        } else if (f - b.freq_hz).abs() <= 1e-9 * spacing {
            values.push(b.s21);
        } else {
            let t = (f - a.freq_hz) / spacing;
            values.push(a.s21 + (b.s21 - a.s21) * t);
        }
    }
    ComplexResponse::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::{group_delay, unwrap_phase};
    use std::f64::consts::TAU;

    #[test]
    fn ri_row_maps_fields_directly() {
        let text = "! two-port\n# GHz S RI R 50\n10 0 0 -1 0 0 0 0 0\n";
        let rec = parse_touchstone(text).unwrap();
        assert_eq!(rec.rows.len(), 1);
        assert_eq!(rec.rows[0].freq_hz, 10e9);
        assert_eq!(rec.rows[0].s21, Complex64::new(-1.0, 0.0));
        assert_eq!(rec.reference_ohms, 50.0);
    }

    #[test]
    fn ma_and_db_rows_agree_with_ri() {
        let ri = parse_touchstone("# GHz S RI R 50\n10 0 0 -1 0 0 0 0 0\n").unwrap();
        let ma = parse_touchstone("# GHz S MA R 50\n10 0 0 1 180 0 0 0 0\n").unwrap();
        let db = parse_touchstone("# GHz S DB R 50\n10 0 0 0 180 0 0 0 0\n").unwrap();
        for rec in [&ma, &db] {
            assert!((rec.rows[0].s21 - ri.rows[0].s21).norm() < 1e-12);
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_touchstone("# GHz S RI R 50\n1 0 0 0 0 0 0 0 0\n0.5 0 0 0 0 0 0 0 0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected monotonicity error, got {other:?}"),
        }
        match parse_touchstone("# GHz S RI R 50\n1 0 0 0 0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected column-count error, got {other:?}"),
        }
        assert!(matches!(
            parse_touchstone("1 0 0 0 0 0 0 0 0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(parse_touchstone("! nothing\n"), Err(Error::Parse { .. })));
        assert!(parse_touchstone("# GHz Z RI R 50\n1 0 0 0 0 0 0 0 0\n").is_err());
    }

    #[test]
    fn mild_overshoot_warns_gross_overshoot_errors() {
        let warn = parse_touchstone("# GHz S MA R 50\n1 0 0 1.05 0 0 0 0 0\n").unwrap();
        assert_eq!(warn.warnings.len(), 1);
        assert!(parse_touchstone("# GHz S MA R 50\n1 0 0 1.2 0 0 0 0 0\n").is_err());
    }

    fn synthetic_delay_record(format: NumberFormat, n: usize, tau: f64) -> TouchstoneRecord {
        let rows: Vec<TwoPortRow> = (0..n)
            .map(|k| {
                let f = 8e9 + 4e9 * k as f64 / (n - 1) as f64;
                let s21 = Complex64::from_polar(1.0, -TAU * f * tau);
                // Small nonzero reflections keep the DB encoding finite.
                let s11 = Complex64::from_polar(0.05, TAU * f * tau);
                TwoPortRow { freq_hz: f, s11, s21, s12: s21, s22: s11 }
            })
            .collect();
        TouchstoneRecord {
            freq_unit: FreqUnit::GHz,
            format,
            reference_ohms: 50.0,
            rows,
            warnings: vec![],
        }
    }

    #[test]
    fn round_trip_all_formats() {
        for format in [NumberFormat::Ri, NumberFormat::Ma, NumberFormat::Db] {
            let rec = synthetic_delay_record(format, 41, 0.05e-9);
            let text = serialize_touchstone(&rec);
            let back = parse_touchstone(&text).unwrap();
            assert_eq!(back.format, format);
            assert_eq!(back.rows.len(), rec.rows.len());
            for (a, b) in rec.rows.iter().zip(&back.rows) {
                assert!((a.freq_hz - b.freq_hz).abs() < 1e-3);
                assert!((a.s21 - b.s21).norm() < 1e-12, "{format:?}");
                assert!((a.s11 - b.s11).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn resampling_on_the_same_grid_is_exact() {
        let rec = synthetic_delay_record(NumberFormat::Ri, 41, 0.05e-9);
        let resp = to_response(&rec, 8e9, 12e9, 41).unwrap();
        for (row, v) in rec.rows.iter().zip(resp.values()) {
            assert_eq!(row.s21, *v);
        }
    }

    #[test]
    fn coarse_delay_record_interpolates_to_the_right_slope() {
        // 0.1 ns pure delay sampled at 26 points over 8-12 GHz (phase step
        // well under pi), resampled densely: the recovered group delay is
        // within 1%.
        let tau = 0.1e-9;
        let rec = synthetic_delay_record(NumberFormat::Ri, 26, tau);
        let resp = to_response(&rec, 8e9, 12e9, 2001).unwrap();
        let curve = unwrap_phase(&resp).unwrap();
        let delays = group_delay(&curve).unwrap();
        for d in delays {
            assert!((d - tau).abs() <= 0.01 * tau, "delay {d}");
        }
    }

    #[test]
    fn out_of_span_resampling_is_rejected() {
        let rec = synthetic_delay_record(NumberFormat::Ri, 41, 0.05e-9);
        assert!(matches!(to_response(&rec, 7e9, 12e9, 101), Err(Error::OutOfRange(_))));
        assert!(matches!(to_response(&rec, 8e9, 13e9, 101), Err(Error::OutOfRange(_))));
    }
}
