//! Tracking-error reports over a cycle log.
//!
//! A pair spec is a comma-separated list of `REFERENCE:MEASURED` entries:
//!
//! - `jrg/position/0:q/0` compares two columns;
//! - `jrg/position/*:q/*` compares every column under each prefix, in log
//!   order (both sides must expand to the same count);
//! - `trg/pose:ee` compares two poses (columns `x y z qw qx qy qz` under each
//!   prefix), reporting position-error norm and orientation angle.

use std::fmt;

use refchain_core::chain::layout::POSE_AXES;
use thiserror::Error;

use crate::log::LogTable;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error("unknown channel `{0}`")]
    UnknownChannel(String),

    #[error("malformed pair `{0}`: expected REFERENCE:MEASURED")]
    MalformedPair(String),

    #[error("`{reference}` expands to {left} channels but `{measured}` to {right}")]
    CountMismatch {
        reference: String,
        measured: String,
        left: usize,
        right: usize,
    },

    #[error("log has no rows")]
    EmptyLog,
}

/// Max, RMS and final absolute error of one signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats {
    pub max: f64,
    pub rms: f64,
    pub last: f64,
}

impl ErrorStats {
    pub fn from_errors(errors: impl IntoIterator<Item = f64>) -> Option<Self> {
        let (mut max, mut sum_sq, mut last, mut n) = (0.0f64, 0.0, 0.0, 0usize);
        for e in errors {
            let e = e.abs();
            max = max.max(e);
            sum_sq += e * e;
            last = e;
            n += 1;
        }
        (n > 0).then(|| Self {
            max,
            rms: (sum_sq / n as f64).sqrt(),
            last,
        })
    }
}

impl fmt::Display for ErrorStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "max {:.6e}  rms {:.6e}  final {:.6e}", self.max, self.rms, self.last)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pair {
    Channel { reference: usize, measured: usize },
    Pose { reference: [usize; 7], measured: [usize; 7] },
}

#[derive(Debug, Clone, PartialEq)]
pub enum PairReport {
    Channel {
        reference: String,
        measured: String,
        error: ErrorStats,
    },
    Pose {
        reference: String,
        measured: String,
        position: ErrorStats,
        orientation: ErrorStats,
    },
}

impl fmt::Display for PairReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairReport::Channel { reference, measured, error } => write!(f, "{reference} vs {measured}: {error}"),
            PairReport::Pose {
                reference,
                measured,
                position,
                orientation,
            } => write!(
                f,
                "{reference} vs {measured}: position [m] {position}\n{reference} vs {measured}: orientation [rad] {orientation}"
            ),
        }
    }
}

fn pose_columns(table: &LogTable, prefix: &str) -> Option<[usize; 7]> {
    let mut cols = [0; 7];
    for (slot, axis) in cols.iter_mut().zip(POSE_AXES) {
        *slot = table.column_index(&format!("{prefix}/{axis}"))?;
    }
    Some(cols)
}

fn expand(table: &LogTable, side: &str) -> Result<Vec<usize>, ReportError> {
    if let Some(prefix) = side.strip_suffix('*') {
        let cols: Vec<usize> = table
            .headers
            .iter()
            .enumerate()
            .filter(|(_, h)| h.starts_with(prefix) && h.len() > prefix.len())
            .map(|(i, _)| i)
            .collect();
        if cols.is_empty() {
            return Err(ReportError::UnknownChannel(side.to_string()));
        }
        return Ok(cols);
    }
    table
        .column_index(side)
        .map(|i| vec![i])
        .ok_or_else(|| ReportError::UnknownChannel(side.to_string()))
}

pub fn parse_pairs(spec: &str, table: &LogTable) -> Result<Vec<Pair>, ReportError> {
    let mut pairs = Vec::new();
    for entry in spec.split(',').map(str::trim).filter(|e| !e.is_empty()) {
        let (reference, measured) = entry
            .split_once(':')
            .map(|(a, b)| (a.trim(), b.trim()))
            .filter(|(a, b)| !a.is_empty() && !b.is_empty())
            .ok_or_else(|| ReportError::MalformedPair(entry.to_string()))?;
        let plain = table.column_index(reference).is_some() || reference.ends_with('*');
        if !plain {
            if let (Some(r), Some(m)) = (pose_columns(table, reference), pose_columns(table, measured)) {
                pairs.push(Pair::Pose { reference: r, measured: m });
                continue;
            }
        }
        let left = expand(table, reference)?;
        let right = expand(table, measured)?;
        if left.len() != right.len() {
            return Err(ReportError::CountMismatch {
                reference: reference.to_string(),
                measured: measured.to_string(),
                left: left.len(),
                right: right.len(),
            });
        }
        pairs.extend(left.into_iter().zip(right).map(|(reference, measured)| Pair::Channel { reference, measured }));
    }
    if pairs.is_empty() {
        return Err(ReportError::MalformedPair(spec.to_string()));
    }
    Ok(pairs)
}

/// Rotation angle between two unit quaternions given as `w x y z`.
fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let dot = a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().abs().min(1.0);
    2.0 * dot.acos()
}

pub fn summarize(table: &LogTable, pairs: &[Pair]) -> Result<Vec<PairReport>, ReportError> {
    if table.rows.is_empty() {
        return Err(ReportError::EmptyLog);
    }
    let name = |i: usize| table.headers[i].clone();
    let prefix = |i: usize| {
        let h = &table.headers[i];
        h.rsplit_once('/').map_or(h.clone(), |(p, _)| p.to_string())
    };
    Ok(pairs
        .iter()
        .map(|pair| match *pair {
            Pair::Channel { reference, measured } => PairReport::Channel {
                reference: name(reference),
                measured: name(measured),
                error: ErrorStats::from_errors(table.rows.iter().map(|r| r[reference] - r[measured]))
                    .expect("non-empty log"),
            },
            Pair::Pose { reference, measured } => {
                let position = table.rows.iter().map(|r| {
                    (0..3).map(|k| (r[reference[k]] - r[measured[k]]).powi(2)).sum::<f64>().sqrt()
                });
                let orientation = table.rows.iter().map(|r| {
                    let a: Vec<f64> = reference[3..].iter().map(|&i| r[i]).collect();
                    let b: Vec<f64> = measured[3..].iter().map(|&i| r[i]).collect();
                    angle_between(&a, &b)
                });
                PairReport::Pose {
                    reference: prefix(reference[0]),
                    measured: prefix(measured[0]),
                    position: ErrorStats::from_errors(position).expect("non-empty log"),
                    orientation: ErrorStats::from_errors(orientation).expect("non-empty log"),
                }
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(headers: &[&str], rows: Vec<Vec<f64>>) -> LogTable {
        LogTable {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows,
        }
    }

    #[test]
    fn identical_signals_give_zero() {
        let t = table(&["a", "b"], vec![vec![1.0, 1.0], vec![2.5, 2.5]]);
        let r = summarize(&t, &parse_pairs("a:b", &t).unwrap()).unwrap();
        match &r[0] {
            PairReport::Channel { error, .. } => assert_eq!(*error, ErrorStats { max: 0.0, rms: 0.0, last: 0.0 }),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constant_offset() {
        let rows = (0..50).map(|k| vec![k as f64 * 0.01 + 0.1, k as f64 * 0.01]).collect();
        let t = table(&["r", "m"], rows);
        let r = summarize(&t, &parse_pairs("r:m", &t).unwrap()).unwrap();
        let PairReport::Channel { error, .. } = &r[0] else { panic!() };
        for v in [error.max, error.rms, error.last] {
            assert!((v - 0.1).abs() < 1e-12, "{error:?}");
        }
    }

    #[test]
    fn wildcard_expands_in_order() {
        let t = table(&["time", "jrg/position/0", "jrg/position/1", "q/0", "q/1"], vec![vec![0.0; 5]]);
        let pairs = parse_pairs("jrg/position/*:q/*", &t).unwrap();
        assert_eq!(
            pairs,
            vec![Pair::Channel { reference: 1, measured: 3 }, Pair::Channel { reference: 2, measured: 4 }]
        );
        assert!(matches!(parse_pairs("jrg/position/*:time", &t), Err(ReportError::CountMismatch { .. })));
    }

    #[test]
    fn unknown_channel_is_reported() {
        let t = table(&["a"], vec![vec![0.0]]);
        assert_eq!(parse_pairs("a:zz", &t), Err(ReportError::UnknownChannel("zz".into())));
        assert!(matches!(parse_pairs("a", &t), Err(ReportError::MalformedPair(_))));
    }

    #[test]
    fn pose_pair_splits_position_and_angle() {
        let mut headers = Vec::new();
        for p in ["r", "m"] {
            for a in POSE_AXES {
                headers.push(format!("{p}/{a}"));
            }
        }
        let half = 0.2f64;
        let row = vec![
            0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, //
            0.3, 0.4, 0.0, half.cos(), 0.0, 0.0, half.sin(),
        ];
        let t = LogTable { headers, rows: vec![row] };
        let r = summarize(&t, &parse_pairs("r:m", &t).unwrap()).unwrap();
        let PairReport::Pose { position, orientation, .. } = &r[0] else { panic!() };
        assert!((position.max - 0.5).abs() < 1e-12);
        assert!((orientation.max - 0.4).abs() < 1e-12);
    }
}
