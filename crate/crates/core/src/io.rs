//! File formats: trace CSV, raw interferograms and key=value reports.
//!
//! A trace file starts with `#` comment lines holding `key = value`
//! parameters, followed by a `position_m,intensity` header and one row
//! per sample. Interferograms are stored as little-endian f64 values, row
//! 0 (lowest y) first, next to a JSON sidecar describing the grid.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diffraction::{Normalization, Trace};
use crate::error::{Error, Result};
use crate::gravity::{ImageGrid, Interferogram};

pub const TRACE_HEADER: [&str; 2] = ["position_m", "intensity"];

/// Ordered key=value parameters.
pub type Params = Vec<(String, String)>;

/// Write `trace` as CSV with `params` in the comment header. The
/// normalisation tag is always recorded.
pub fn write_trace<W: Write>(out: W, trace: &Trace, params: &[(String, String)]) -> Result<()> {
    let mut out = out;
    writeln!(out, "# normalization = {}", trace.normalization.tag())?;
    for (k, v) in params {
        writeln!(out, "# {k} = {v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER).map_err(csv_error)?;
    for (x, i) in trace.positions.iter().zip(&trace.intensities) {
        w.write_record([format!("{x:e}"), format!("{i:e}")])
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_trace(path: &Path, trace: &Trace, params: &[(String, String)]) -> Result<()> {
    let file = fs::File::create(path)?;
    write_trace(std::io::BufWriter::new(file), trace, params)
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

/// Parse a trace file. Returns the trace and its header parameters.
pub fn read_trace<R: Read>(input: R, origin: &Path) -> Result<(Trace, Params)> {
    let parse_error = |reason: String| Error::Parse {
        path: origin.to_path_buf(),
        reason,
    };
    let mut text = String::new();
    BufReader::new(input).read_to_string(&mut text)?;

    let params: Params = text
        .lines()
        .take_while(|l| l.trim_start().starts_with('#'))
        .filter_map(|l| {
            let body = l.trim_start().trim_start_matches('#');
            body.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        })
        .collect();

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| parse_error(e.to_string()))?
        .clone();
    if headers.len() != 2 || headers[0] != *TRACE_HEADER[0] || headers[1] != *TRACE_HEADER[1] {
        return Err(parse_error(format!(
            "expected header {}, found {}",
            TRACE_HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut positions = Vec::new();
    let mut intensities = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_error(e.to_string()))?;
        let field = |i: usize| -> Result<f64> {
            record[i].parse::<f64>().map_err(|_| {
                parse_error(format!("row {}: '{}' is not a number", line + 1, &record[i]))
            })
        };
        positions.push(field(0)?);
        intensities.push(field(1)?);
    }
    let normalization = params
        .iter()
        .find(|(k, _)| k == "normalization")
        .and_then(|(_, v)| Normalization::from_tag(v))
        .unwrap_or(Normalization::Raw);
    let trace = Trace::new(positions, intensities, normalization)
        .map_err(|e| parse_error(e.to_string()))?;
    Ok((trace, params))
}

pub fn load_trace(path: &Path) -> Result<(Trace, Params)> {
    let file = fs::File::open(path).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    read_trace(file, path)
}

/// Sidecar describing a raw interferogram file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageHeader {
    pub nx: usize,
    pub ny: usize,
    pub pitch_x_m: f64,
    pub pitch_y_m: f64,
    pub x_min_m: f64,
    pub y_min_m: f64,
    pub orientation: String,
    pub dtype: String,
    pub data_file: String,
}

const ORIENTATION: &str = "up-positive";
const DTYPE: &str = "f64-le";

/// Path of the JSON sidecar for a raw image.
pub fn sidecar_path(data: &Path) -> PathBuf {
    data.with_extension("json")
}

/// Write `image` to `path` (raw f64) and its sidecar next to it.
pub fn save_interferogram(path: &Path, image: &Interferogram) -> Result<()> {
    let mut bytes = Vec::with_capacity(8 * image.data.len());
    for v in &image.data {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes)?;
    let g = image.grid;
    let header = ImageHeader {
        nx: g.nx,
        ny: g.ny,
        pitch_x_m: g.pitch_x,
        pitch_y_m: g.pitch_y,
        x_min_m: g.x_min,
        y_min_m: g.y_min,
        orientation: ORIENTATION.into(),
        dtype: DTYPE.into(),
        data_file: path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
    };
    let json = serde_json::to_string_pretty(&header)
        .map_err(|e| Error::Config(format!("sidecar: {e}")))?;
    fs::write(sidecar_path(path), json + "\n")?;
    Ok(())
}

/// Read an image written by [`save_interferogram`].
pub fn load_interferogram(path: &Path) -> Result<Interferogram> {
    let side = sidecar_path(path);
    let parse_error = |p: &Path, reason: String| Error::Parse {
        path: p.to_path_buf(),
        reason,
    };
    let text = fs::read_to_string(&side).map_err(|e| parse_error(&side, e.to_string()))?;
    let header: ImageHeader =
        serde_json::from_str(&text).map_err(|e| parse_error(&side, e.to_string()))?;
    if header.orientation != ORIENTATION || header.dtype != DTYPE {
        return Err(parse_error(
            &side,
            format!(
                "unsupported layout {}/{}, expected {ORIENTATION}/{DTYPE}",
                header.orientation, header.dtype
            ),
        ));
    }
    let bytes = fs::read(path).map_err(|e| parse_error(path, e.to_string()))?;
    if bytes.len() % 8 != 0 {
        return Err(parse_error(path, "length is not a multiple of 8".into()));
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let grid = ImageGrid::new(
        header.nx,
        header.ny,
        header.pitch_x_m,
        header.pitch_y_m,
        header.x_min_m,
        header.y_min_m,
    )?;
    Interferogram::from_data(grid, data)
}

/// `key = value` lines.
pub fn format_report(entries: &[(String, String)]) -> String {
    let mut s = String::new();
    for (k, v) in entries {
        s.push_str(k);
        s.push_str(" = ");
        s.push_str(v);
        s.push('\n');
    }
    s
}

/// Inverse of [`format_report`]; blank lines and `#` comments are ignored.
pub fn parse_report<R: BufRead>(input: R) -> Result<Params> {
    let mut out = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Trace {
        Trace::new(
            vec![-1e-6, 0.0, 1e-6],
            vec![0.25, 1.0, 0.125],
            Normalization::Max,
        )
        .unwrap()
    }

    #[test]
    fn trace_round_trip() {
        let mut buf = Vec::new();
        let params = vec![("grating".to_string(), "sinx".to_string())];
        write_trace(&mut buf, &sample(), &params).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# normalization = max-1\n# grating = sinx\nposition_m,intensity\n"));
        let (t, p) = read_trace(&buf[..], Path::new("mem")).unwrap();
        assert_eq!(t, sample());
        assert_eq!(p[1], params[0]);
    }

    #[test]
    fn bad_trace_files() {
        let bad = b"x,y\n1,2\n3,4\n";
        assert!(matches!(read_trace(&bad[..], Path::new("a")), Err(Error::Parse { .. })));
        let bad = b"position_m,intensity\n1,abc\n3,4\n";
        assert!(read_trace(&bad[..], Path::new("a")).is_err());
        let neg = b"position_m,intensity\n1,-1\n3,4\n";
        assert!(read_trace(&neg[..], Path::new("a")).is_err());
        assert!(load_trace(Path::new("/nonexistent/trace.csv")).is_err());
    }

    #[test]
    fn interferogram_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.bin");
        let grid = ImageGrid::new(3, 2, 1e-6, 2e-6, -1e-6, -5e-6).unwrap();
        let img = Interferogram::from_data(grid, vec![0.0, 1.0, 2.0, 3.0, 4.5, 5.0]).unwrap();
        save_interferogram(&path, &img).unwrap();
        assert!(sidecar_path(&path).exists());
        assert_eq!(load_interferogram(&path).unwrap(), img);
        fs::write(&path, [0u8; 7]).unwrap();
        assert!(load_interferogram(&path).is_err());
    }

    #[test]
    fn report_round_trip() {
        let e = vec![("a".to_string(), "1".to_string()), ("b.c".into(), "x y".into())];
        let text = format_report(&e);
        assert_eq!(text, "a = 1\nb.c = x y\n");
        assert_eq!(parse_report(text.as_bytes()).unwrap(), e);
        assert!(parse_report("nothing".as_bytes()).is_err());
    }
}
