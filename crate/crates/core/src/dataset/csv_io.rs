use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::IntervalFrame;
use crate::error::{Error, Result};
use crate::interval::CenterRadius;

/// How to interpret an interval CSV.
#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Variable used as the response. Defaults to `y` when present,
    /// otherwise the last variable pair.
    pub response: Option<String>,
    /// Accept rows with `lower > upper` (raw generator output).
    pub allow_incoherent: bool,
}

struct Pair {
    name: String,
    lower_col: usize,
    upper_col: usize,
}

fn parse_header(header: &csv::StringRecord) -> Result<Vec<Pair>> {
    let cols: Vec<&str> = header.iter().map(str::trim).collect();
    let mut pairs = Vec::new();
    let mut i = 0;
    while i < cols.len() {
        let col = cols[i];
        let name = col.strip_suffix("_L").ok_or_else(|| Error::Parse {
            row: 0,
            column: col.to_string(),
            message: "expected a `<name>_L` column starting a bound pair".into(),
        })?;
        let upper = format!("{name}_U");
        if cols.get(i + 1) != Some(&upper.as_str()) {
            return Err(Error::Parse {
                row: 0,
                column: col.to_string(),
                message: format!("missing partner column `{upper}`"),
            });
        }
        pairs.push(Pair {
            name: name.to_string(),
            lower_col: i,
            upper_col: i + 1,
        });
        i += 2;
    }
    if pairs.len() < 2 {
        return Err(Error::Parse {
            row: 0,
            column: String::new(),
            message: "need at least one predictor pair and one response pair".into(),
        });
    }
    Ok(pairs)
}

fn parse_cell(record: &csv::StringRecord, col: usize, row: usize, name: &str) -> Result<f64> {
    let raw = record.get(col).ok_or_else(|| Error::Parse {
        row,
        column: name.to_string(),
        message: "missing value".into(),
    })?;
    let v: f64 = raw.trim().parse().map_err(|_| Error::Parse {
        row,
        column: name.to_string(),
        message: format!("cannot parse `{raw}` as a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            row,
            column: name.to_string(),
            message: "non-finite value".into(),
        });
    }
    Ok(v)
}

/// Read an interval CSV from any reader.
pub fn read_csv<R: Read>(reader: R, opts: &LoadOptions) -> Result<IntervalFrame> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers().map_err(csv_err)?.clone();
    let pairs = parse_header(&header)?;

    let response_idx = match &opts.response {
        Some(name) => pairs
            .iter()
            .position(|p| &p.name == name)
            .ok_or_else(|| Error::Parse {
                row: 0,
                column: name.clone(),
                message: "response variable not found in header".into(),
            })?,
        None => pairs
            .iter()
            .position(|p| p.name == "y")
            .unwrap_or(pairs.len() - 1),
    };

    let mut columns: Vec<Vec<CenterRadius>> = vec![Vec::new(); pairs.len()];
    for (k, record) in rdr.records().enumerate() {
        let row = k + 1;
        let record = record.map_err(csv_err)?;
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        if record.len() != header.len() {
            return Err(Error::Parse {
                row,
                column: String::new(),
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        for (pair, col) in pairs.iter().zip(columns.iter_mut()) {
            let lo = parse_cell(&record, pair.lower_col, row, &format!("{}_L", pair.name))?;
            let hi = parse_cell(&record, pair.upper_col, row, &format!("{}_U", pair.name))?;
            if lo > hi && !opts.allow_incoherent {
                return Err(Error::Parse {
                    row,
                    column: pair.name.clone(),
                    message: format!("lower bound {lo} exceeds upper bound {hi}"),
                });
            }
            col.push(CenterRadius::from_bounds(lo, hi));
        }
    }
    if columns[0].is_empty() {
        return Err(Error::EmptySample("CSV has no data rows".into()));
    }

    let response = columns.remove(response_idx);
    let mut names: Vec<String> = pairs.into_iter().map(|p| p.name).collect();
    let response_name = names.remove(response_idx);
    IntervalFrame::new(names, columns, response_name, response)
}

pub fn load_csv(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<IntervalFrame> {
    read_csv(File::open(path)?, opts)
}

/// Write a frame as `<name>_L,<name>_U` pairs, response last.
pub fn write_csv_to<W: Write>(frame: &IntervalFrame, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = Vec::with_capacity(2 * (frame.p() + 1));
    for name in frame
        .predictor_names()
        .iter()
        .map(String::as_str)
        .chain(std::iter::once(frame.response_name()))
    {
        header.push(format!("{name}_L"));
        header.push(format!("{name}_U"));
    }
    w.write_record(&header).map_err(csv_err)?;
    for i in 0..frame.n() {
        let mut rec = Vec::with_capacity(header.len());
        for c in frame
            .row(i)
            .into_iter()
            .chain(std::iter::once(frame.response()[i]))
        {
            rec.push(c.lower().to_string());
            rec.push(c.upper().to_string());
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(frame: &IntervalFrame, path: impl AsRef<Path>) -> Result<()> {
    write_csv_to(frame, File::create(path)?)
}

fn csv_err(e: csv::Error) -> Error {
    let row = e.position().map(|p| p.record() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse {
            row,
            column: String::new(),
            message: format!("{other:?}"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(s: &str) -> Result<IntervalFrame> {
        read_csv(s.as_bytes(), &LoadOptions::default())
    }

    #[test]
    fn two_row_file() {
        let f = read("x1_L,x1_U,y_L,y_U\n0,1,2,4\n1,3,0,5").unwrap();
        assert_eq!((f.n(), f.p()), (2, 1));
        assert_eq!(f.predictor_names(), ["x1"]);
        assert_eq!(f.response()[0], CenterRadius::new(3.0, 1.0));
        assert_eq!(f.predictor(0)[1], CenterRadius::new(2.0, 1.0));
    }

    #[test]
    fn reversed_bounds_name_the_row() {
        let err = read("x1_L,x1_U,y_L,y_U\n3,1,2,4\n").unwrap_err();
        match err {
            Error::Parse { row, column, .. } => {
                assert_eq!(row, 1);
                assert_eq!(column, "x1");
            }
            other => panic!("unexpected {other:?}"),
        }
        let lenient = read_csv(
            "x1_L,x1_U,y_L,y_U\n3,1,2,4\n".as_bytes(),
            &LoadOptions {
                allow_incoherent: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(lenient.predictor(0)[0].radius, -1.0);
    }

    #[test]
    fn empty_data_section() {
        assert!(matches!(read("x1_L,x1_U,y_L,y_U\n"), Err(Error::EmptySample(_))));
        assert!(matches!(
            read("x1_L,x1_U,y_L,y_U\n\n\n"),
            Err(Error::EmptySample(_))
        ));
    }

    #[test]
    fn header_errors() {
        assert!(matches!(read("x1_L,y_L,y_U\n0,1,2\n"), Err(Error::Parse { row: 0, .. })));
        assert!(matches!(read("x1,x1_U,y_L,y_U\n0,1,2,3\n"), Err(Error::Parse { row: 0, .. })));
        assert!(matches!(read("y_L,y_U\n0,1\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn malformed_cells() {
        assert!(matches!(
            read("x1_L,x1_U,y_L,y_U\n0,1,2,4\n0,abc,1,2\n"),
            Err(Error::Parse { row: 2, .. })
        ));
        assert!(matches!(
            read("x1_L,x1_U,y_L,y_U\n0,1,2\n"),
            Err(Error::Parse { row: 1, .. })
        ));
    }

    #[test]
    fn blank_lines_and_response_choice() {
        let text = "djia_L,djia_U,jpm_L,jpm_U,ge_L,ge_U\n\n1,2,3,4,5,6\n\n2,3,4,5,6,7\n";
        let f = read(text).unwrap();
        assert_eq!(f.n(), 2);
        assert_eq!(f.response_name(), "ge");
        let f = read_csv(
            text.as_bytes(),
            &LoadOptions {
                response: Some("djia".into()),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(f.response_name(), "djia");
        assert_eq!(f.predictor_names(), ["jpm", "ge"]);
        // `y` wins over position when present.
        let f = read("y_L,y_U,x_L,x_U\n0,1,2,3\n").unwrap();
        assert_eq!(f.response_name(), "y");
    }

    #[test]
    fn write_then_read() {
        let f = read("a_L,a_U,b_L,b_U,y_L,y_U\n0,1,-2,2,2,4\n1,3,0,0.5,0,5\n").unwrap();
        let mut buf = Vec::new();
        write_csv_to(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("a_L,a_U,b_L,b_U,y_L,y_U\n"));
        assert_eq!(read(&text).unwrap(), f);
    }
}
