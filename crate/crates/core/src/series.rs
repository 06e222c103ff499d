//! Time series with named channels, and their CSV form.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{invalid, Result};

/// A time grid with one or more value channels of the same length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    t: Vec<f64>,
    channels: Vec<(String, Vec<f64>)>,
}

impl TimeSeries {
    /// Fails unless `t` is strictly increasing and every channel matches it
    /// in length.
    pub fn new(t: Vec<f64>, channels: Vec<(String, Vec<f64>)>) -> Result<Self> {
        for w in t.windows(2) {
            if !(w[1] > w[0]) {
                return Err(invalid(format!(
                    "time values must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        for (name, values) in &channels {
            if values.len() != t.len() {
                return Err(invalid(format!(
                    "channel {name} has {} values for {} times",
                    values.len(),
                    t.len()
                )));
            }
        }
        Ok(Self { t, channels })
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn channel_names(&self) -> impl Iterator<Item = &str> {
        self.channels.iter().map(|(n, _)| n.as_str())
    }

    /// Writes a header row `t_name,ch1,ch2,…` followed by one row per time,
    /// every number in scientific notation with 15 significant digits.
    pub fn write_csv<W: Write>(&self, t_name: &str, mut w: W) -> io::Result<()> {
        write!(w, "{t_name}")?;
        for (name, _) in &self.channels {
            write!(w, ",{name}")?;
        }
        writeln!(w)?;
        for i in 0..self.t.len() {
            write!(w, "{}", format_sci(self.t[i]))?;
            for (_, values) in &self.channels {
                write!(w, ",{}", format_sci(values[i]))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self, t_name: &str) -> String {
        let mut buf = Vec::new();
        self.write_csv(t_name, &mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

/// `1.23456789012345e-5` style formatting, 15 significant digits.
pub fn format_sci(x: f64) -> String {
    format!("{x:.14e}")
}
