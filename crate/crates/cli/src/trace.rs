//! Digitized trace files: `t_s,value[,weight]` rows, `#` comments, and an
//! optional header line.

use std::io::Read;
use std::path::Path;

use einstein_rabi::fit::{Sample, TraceData};

use crate::error::CliError;

pub fn read_trace_file(path: &Path) -> Result<TraceData, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::Input(format!("cannot open {}: {e}", path.display())))?;
    read_trace(file)
}

pub fn read_trace<R: Read>(reader: R) -> Result<TraceData, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut samples = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::Input(format!("line {line}: {e}"))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if !(2..=3).contains(&record.len()) {
            return Err(CliError::Input(format!(
                "line {line}: expected 2 or 3 columns (t_s, value[, weight]), found {}",
                record.len()
            )));
        }
        let first_is_number = record[0].parse::<f64>().is_ok();
        if i == 0 && !first_is_number {
            continue;
        }
        let field = |k: usize, what: &str| -> Result<f64, CliError> {
            record[k].parse::<f64>().map_err(|_| {
                CliError::Input(format!(
                    "line {line}: {what} `{}` is not a number",
                    &record[k]
                ))
            })
        };
        samples.push(Sample {
            t: field(0, "time")?,
            value: field(1, "value")?,
            weight: if record.len() == 3 {
                field(2, "weight")?
            } else {
                1.0
            },
        });
    }
    if samples.is_empty() {
        return Err(CliError::Input("trace contains no samples".into()));
    }
    TraceData::new(samples).map_err(|e| CliError::Input(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(n: usize) -> String {
        (0..n).map(|i| format!("{}e-6,0.{i}\n", i + 1)).collect()
    }

    #[test]
    fn header_comments_and_weights() {
        let text = format!("# digitized\nt_s,value\n{}9e-6,0.5,2\n", rows(8));
        let data = read_trace(text.as_bytes()).unwrap();
        assert_eq!(data.samples().len(), 9);
        assert_eq!(data.samples()[8].weight, 2.0);
        assert_eq!(data.samples()[0].weight, 1.0);
    }

    #[test]
    fn bad_number_reports_line() {
        let text = format!("t_s,value\n{}9e-6,abc\n", rows(8));
        let msg = read_trace(text.as_bytes()).unwrap_err().to_string();
        assert!(msg.contains("line 10"), "{msg}");
    }

    #[test]
    fn wrong_column_count() {
        let text = format!("{}1,2,3,4\n", rows(8));
        let msg = read_trace(text.as_bytes()).unwrap_err().to_string();
        assert!(msg.contains("line 9") && msg.contains("columns"), "{msg}");
    }

    #[test]
    fn empty_input() {
        assert!(read_trace("# nothing\n".as_bytes()).is_err());
        assert!(read_trace("".as_bytes()).is_err());
    }

    #[test]
    fn non_monotone_times() {
        let text = format!("{}5e-6,0.1\n", rows(8));
        assert!(matches!(
            read_trace(text.as_bytes()),
            Err(CliError::Input(_))
        ));
    }
}
