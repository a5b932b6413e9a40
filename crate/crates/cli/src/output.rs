//! Sweep rows and their CSV / JSON encodings.

use serde::{Deserialize, Serialize};

pub const CSV_HEADER: [&str; 11] = [
    "q0",
    "q1",
    "q2",
    "q3",
    "mu",
    "capacity_bits",
    "min_entropy_bits",
    "extremal_class",
    "sufficient_threshold",
    "sufficient_met",
    "enhanced_numeric",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub mu: f64,
    pub capacity_bits: f64,
    pub min_entropy_bits: f64,
    pub extremal_class: String,
    pub sufficient_threshold: f64,
    pub sufficient_met: bool,
    pub enhanced_numeric: bool,
}

/// `%.12g`: 12 significant digits, trailing zeros dropped, exponent form
/// outside `[1e-5, 1e12)`.
pub fn sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa.to_string()),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn to_csv(rows: &[SweepRow]) -> Result<String, csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            sig12(r.q0),
            sig12(r.q1),
            sig12(r.q2),
            sig12(r.q3),
            sig12(r.mu),
            sig12(r.capacity_bits),
            sig12(r.min_entropy_bits),
            r.extremal_class.clone(),
            sig12(r.sufficient_threshold),
            r.sufficient_met.to_string(),
            r.enhanced_numeric.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("ascii output"))
}

/// One JSON object per line.
pub fn to_json_lines(rows: &[SweepRow]) -> serde_json::Result<String> {
    let mut out = String::new();
    for r in rows {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_examples() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(0.05), "0.05");
        assert_eq!(sig12(0.1 + 0.2), "0.3");
        assert_eq!(sig12(2.0 / 3.0), "0.666666666667");
        assert_eq!(sig12(1234.5), "1234.5");
        assert_eq!(sig12(1.5e-7), "1.5e-07");
        assert_eq!(sig12(-0.25), "-0.25");
    }

    #[test]
    fn csv_layout() {
        let row = SweepRow {
            q0: 0.3,
            q1: 0.3,
            q2: 0.2,
            q3: 0.2,
            mu: 0.7,
            capacity_bits: 0.5,
            min_entropy_bits: 1.5,
            extremal_class: "single_bell".into(),
            sufficient_threshold: 0.2,
            sufficient_met: true,
            enhanced_numeric: true,
        };
        let s = to_csv(std::slice::from_ref(&row)).unwrap();
        assert_eq!(
            s,
            "q0,q1,q2,q3,mu,capacity_bits,min_entropy_bits,extremal_class,sufficient_threshold,sufficient_met,enhanced_numeric\n\
             0.3,0.3,0.2,0.2,0.7,0.5,1.5,single_bell,0.2,true,true\n"
        );
        let json = to_json_lines(std::slice::from_ref(&row)).unwrap();
        let back: SweepRow = serde_json::from_str(json.trim_end()).unwrap();
        assert_eq!(back, row);
        assert_eq!(to_json_lines(&[back]).unwrap(), json);
    }
}
