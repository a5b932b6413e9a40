//! `--grid name=start:stop:step` parsing and expansion.

use std::fmt;

/// Parameters a sweep can vary, in the order used for row ordering (last
/// varies fastest).
pub const PARAMS: [&str; 6] = ["q0", "q1", "q2", "q3", "x", "mu"];

#[derive(Debug, Clone, PartialEq)]
pub struct GridError(pub String);

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "InvalidGrid: {}", self.0)
    }
}

/// One parameter axis with inclusive endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: &'static str,
    pub values: Vec<f64>,
}

fn number(s: &str, what: &str) -> Result<f64, GridError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| GridError(format!("{what} '{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(GridError(format!("{what} '{s}' is not finite")));
    }
    Ok(v)
}

/// Parses `name=value` or `name=start:stop:step`. Points are computed as
/// `start + i·step` from an integer count, with the last one pinned to `stop`.
pub fn parse_axis(spec: &str) -> Result<Axis, GridError> {
    let (name, range) = spec
        .split_once('=')
        .ok_or_else(|| GridError(format!("'{spec}' must look like name=start:stop:step")))?;
    let name = PARAMS
        .iter()
        .find(|p| **p == name.trim())
        .ok_or_else(|| GridError(format!("unknown parameter '{name}'")))?;
    let parts: Vec<&str> = range.split(':').collect();
    let values = match parts.as_slice() {
        [v] => vec![number(v, "value")?],
        [a, b, s] => {
            let (start, stop, step) = (number(a, "start")?, number(b, "stop")?, number(s, "step")?);
            if step <= 0.0 {
                return Err(GridError(format!("{name}: step must be positive")));
            }
            if stop < start {
                return Err(GridError(format!("{name}: stop is below start")));
            }
            let span = (stop - start) / step;
            let intervals = span.round();
            if (span - intervals).abs() > 1e-9 * span.max(1.0) {
                return Err(GridError(format!("{name}: step does not divide [{start}, {stop}]")));
            }
            if intervals > 1e7 {
                return Err(GridError(format!("{name}: too many points")));
            }
            let n = intervals as usize;
            (0..=n)
                .map(|i| if i == n { stop } else { start + i as f64 * step })
                .collect()
        }
        _ => return Err(GridError(format!("'{range}' must be value or start:stop:step"))),
    };
    Ok(Axis { name, values })
}

/// Cartesian product in lexicographic index order; each point maps parameter
/// names to values.
pub fn expand(axes: &[Axis]) -> Result<Vec<Vec<(&'static str, f64)>>, GridError> {
    let mut sorted: Vec<&Axis> = Vec::with_capacity(axes.len());
    for name in PARAMS {
        let mut found = axes.iter().filter(|a| a.name == name);
        if let Some(a) = found.next() {
            if found.next().is_some() {
                return Err(GridError(format!("parameter '{name}' given twice")));
            }
            sorted.push(a);
        }
    }
    let mut points = vec![Vec::new()];
    for axis in sorted {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push((axis.name, v));
                    q
                })
            })
            .collect();
    }
    Ok(points)
}
