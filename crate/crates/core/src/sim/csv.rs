//! CSV output for simulation curves.

use std::io::Write;
use std::path::Path;

use super::config::SimConfig;
use super::runner::CurvePoint;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "decoder,N,K,ebn0_db,frames,bit_errors,frame_errors,ber,fer,avg_iterations";

/// Comment line carrying the run time; excluded from reproducibility checks.
pub const TIMESTAMP_KEY: &str = "# created_unix=";

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: "<csv>".into(),
            source,
        },
        other => Error::Format {
            line,
            msg: format!("{other:?}"),
        },
    }
}

/// Writes the configuration as `#` comments, the header, then one row per
/// point.
pub fn write_csv<W: Write>(mut w: W, config: &SimConfig, extra: &[(&str, String)], points: &[CurvePoint]) -> Result<()> {
    let created = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let actions: Vec<String> = config.agent_params().actions.values().iter().map(|v| v.to_string()).collect();
    let mut comments = vec![
        "# polar-qlbp simulation".to_string(),
        format!("{TIMESTAMP_KEY}{created}"),
        "# indices=0-based".to_string(),
    ];
    comments.extend(config.to_kv_lines().into_iter().map(|l| format!("# {l}")));
    comments.push(format!("# actions={}", actions.join(" ")));
    comments.extend(extra.iter().map(|(k, v)| format!("# {k}={v}")));
    for c in comments {
        writeln!(w, "{c}").map_err(|e| Error::io("<csv>", e))?;
    }

    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER.split(',')).map_err(csv_error)?;
    for p in points {
        out.write_record([
            config.decoder.to_string(),
            config.n.to_string(),
            config.k.to_string(),
            p.ebn0_db.to_string(),
            p.frames_run.to_string(),
            p.bit_errors.to_string(),
            p.frame_errors.to_string(),
            p.ber.to_string(),
            p.fer.to_string(),
            p.avg_iterations.to_string(),
        ])
        .map_err(csv_error)?;
    }
    out.flush().map_err(|e| Error::io("<csv>", e))
}

pub fn emit_csv(config: &SimConfig, extra: &[(&str, String)], points: &[CurvePoint], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(std::io::BufWriter::new(file), config, extra, points).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// One data row of an emitted file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub decoder: String,
    pub n: usize,
    pub k: usize,
    /// `wall_time_s` is not stored in the file and reads back as 0.
    pub point: CurvePoint,
}

/// Parses an emitted file into its comment lines (without `# `) and rows.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<CsvRow>)> {
    let comments = text
        .lines()
        .filter_map(|l| l.strip_prefix('#'))
        .map(|c| c.trim().to_string())
        .collect();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().map_err(csv_error)?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Format {
            line: 0,
            msg: format!("expected header `{CSV_HEADER}`"),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let r = record.map_err(csv_error)?;
        let line = r.position().map_or(0, |p| p.line() as usize);
        let bad = |k: usize| Error::Format {
            line,
            msg: format!("bad value `{}` in column {}", &r[k], k + 1),
        };
        let num = |k: usize| -> Result<f64> { r[k].parse().map_err(|_| bad(k)) };
        let int = |k: usize| -> Result<u64> { r[k].parse().map_err(|_| bad(k)) };
        rows.push(CsvRow {
            decoder: r[0].to_string(),
            n: int(1)? as usize,
            k: int(2)? as usize,
            point: CurvePoint {
                ebn0_db: num(3)?,
                frames_run: int(4)?,
                bit_errors: int(5)?,
                frame_errors: int(6)?,
                ber: num(7)?,
                fer: num(8)?,
                avg_iterations: num(9)?,
                wall_time_s: 0.0,
            },
        });
    }
    Ok((comments, rows))
}

/// The file contents with the timestamp comment removed.
pub fn strip_timestamp(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with(TIMESTAMP_KEY))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(e: f64) -> CurvePoint {
        CurvePoint {
            ebn0_db: e,
            frames_run: 1000,
            bit_errors: 37,
            frame_errors: 9,
            ber: 37.0 / 128_000.0,
            fer: 0.009,
            avg_iterations: 7.25,
            wall_time_s: 1.5,
        }
    }

    #[test]
    fn write_then_parse() {
        let config = SimConfig::default();
        let mut buf = Vec::new();
        write_csv(&mut buf, &config, &[("effective_beta", "0.1".into())], &[point(1.0), point(2.5)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let (comments, rows) = parse_csv(&text).unwrap();
        assert!(comments.iter().any(|c| c == "decoder=bp"));
        assert!(comments.iter().any(|c| c == "effective_beta=0.1"));
        assert!(comments.iter().any(|c| c.starts_with("created_unix=")));
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].decoder, "bp");
        assert_eq!((rows[1].n, rows[1].k), (256, 128));
        let mut expected = point(2.5);
        expected.wall_time_s = 0.0;
        assert_eq!(rows[1].point, expected);
        assert!(!strip_timestamp(&text).contains("created_unix"));
    }

    #[test]
    fn rejects_bad_files() {
        assert!(parse_csv("a,b\n1,2\n").is_err());
        let bad = format!("{CSV_HEADER}\nbp,256,128,2,x,0,0,0,0,0\n");
        assert!(parse_csv(&bad).is_err());
        let short = format!("{CSV_HEADER}\nbp,256\n");
        assert!(parse_csv(&short).is_err());
    }
}
