//! Convergence tables.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::numfmt::fmt_g17;

/// One refinement parameter: a label for output and the numeric value used
/// on the x-axis of the order fit.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyPoint {
    pub label: String,
    pub param: f64,
}

impl StudyPoint {
    pub fn new(label: impl Into<String>, param: f64) -> Self {
        Self { label: label.into(), param }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateRow {
    pub label: String,
    pub param: f64,
    pub estimate: Vec<f64>,
    pub reference: Vec<f64>,
    pub abs_error: f64,
    pub rel_error: f64,
}

impl EstimateRow {
    /// Errors are Euclidean norms over the component vectors.
    pub fn new(label: impl Into<String>, param: f64, estimate: Vec<f64>, reference: Vec<f64>) -> Self {
        let abs_error = estimate
            .iter()
            .zip(&reference)
            .map(|(e, r)| (e - r) * (e - r))
            .sum::<f64>()
            .sqrt();
        let rnorm = reference.iter().map(|r| r * r).sum::<f64>().sqrt();
        let rel_error = if rnorm > 0.0 { abs_error / rnorm } else { abs_error };
        Self { label: label.into(), param, estimate, reference, abs_error, rel_error }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order {
    /// Every error is at rounding level.
    Exact,
    /// Least-squares slope of `log(error)` against `log(param)`.
    Observed { p: f64, r_squared: f64 },
    Undetermined,
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Order::Exact => f.write_str("exact"),
            Order::Observed { p, .. } => f.write_str(&fmt_g17(*p)),
            Order::Undetermined => f.write_str("undetermined"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EstimateTable {
    /// Component names, shared by estimate and reference.
    pub columns: Vec<String>,
    pub rows: Vec<EstimateRow>,
}

const EXACT_TOL: f64 = 1e-12;

impl EstimateTable {
    pub fn new(columns: Vec<String>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: EstimateRow) {
        self.rows.push(row);
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.abs_error).collect()
    }

    /// Order fitted over the whole table. The sign follows the parameter:
    /// for a mesh size it is positive, for a subdivision count negative.
    pub fn observed_order(&self) -> Order {
        let exact = self.rows.iter().all(|r| {
            let scale = r.reference.iter().fold(1.0f64, |m, x| m.max(x.abs()));
            r.abs_error <= EXACT_TOL * scale
        });
        if !self.rows.is_empty() && exact {
            return Order::Exact;
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .rows
            .iter()
            .filter(|r| r.abs_error > 0.0 && r.param > 0.0)
            .map(|r| (r.param, r.abs_error))
            .unzip();
        match loglog_fit(&xs, &ys) {
            Some((p, r_squared)) => Order::Observed { p, r_squared },
            None => Order::Undetermined,
        }
    }

    /// Header `label,param,<col>...,ref_<col>...,abs_error,rel_error,local_order,observed_order`.
    /// The whole-table order is repeated on every row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,param");
        for c in &self.columns {
            let _ = write!(out, ",{c}");
        }
        for c in &self.columns {
            let _ = write!(out, ",ref_{c}");
        }
        out.push_str(",abs_error,rel_error,local_order,observed_order\n");
        let order = self.observed_order().to_string();
        for (i, r) in self.rows.iter().enumerate() {
            let _ = write!(out, "{},{}", r.label, fmt_g17(r.param));
            for v in r.estimate.iter().chain(&r.reference) {
                let _ = write!(out, ",{}", fmt_g17(*v));
            }
            let local = if i == 0 {
                String::new()
            } else {
                let prev = &self.rows[i - 1];
                match loglog_fit(&[prev.param, r.param], &[prev.abs_error, r.abs_error]) {
                    Some((p, _)) => fmt_g17(p),
                    None => String::new(),
                }
            };
            let _ = writeln!(out, ",{},{},{},{}", fmt_g17(r.abs_error), fmt_g17(r.rel_error), local, order);
        }
        out
    }
}

/// Least-squares fit of `log y = p log x + c`, returning `(p, R²)`.
/// `None` for fewer than two usable points or a constant `x`.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((slope, r2))
}

/// Runs `estimate` and `reference` over `schedule`. An estimator failure at
/// any point aborts the study.
pub fn convergence_study<E, R>(
    columns: Vec<String>,
    schedule: &[StudyPoint],
    mut estimate: E,
    mut reference: R,
) -> Result<EstimateTable>
where
    E: FnMut(&StudyPoint) -> Result<Vec<f64>>,
    R: FnMut(&StudyPoint) -> Result<Vec<f64>>,
{
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("empty schedule".into()));
    }
    let mut table = EstimateTable::new(columns);
    let mut sorted: Vec<&StudyPoint> = schedule.iter().collect();
    sorted.sort_by(|a, b| a.param.total_cmp(&b.param));
    for pt in sorted {
        let est = estimate(pt)?;
        let rf = reference(pt)?;
        table.push(EstimateRow::new(pt.label.clone(), pt.param, est, rf));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{balanced_mean_bivector, jacobian_estimate, mean_bivector_naive, EstimatorOptions};
    use crate::geom::{OrientedTriangle2, Point2, Vertex};
    use crate::partition::schwarz_local_triangle;
    use crate::surfaces::{make_cylinder, PlaneTransform};

    fn m_schedule() -> Vec<StudyPoint> {
        (2..=8).map(|k| 1usize << k).map(|m| StudyPoint::new(format!("m={m}"), m as f64)).collect()
    }

    #[test]
    fn fit_recovers_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.5)).collect();
        let (p, r2) = loglog_fit(&xs, &ys).unwrap();
        assert!((p + 1.5).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
        assert!(loglog_fit(&[1.0], &[1.0]).is_none());
    }

    #[test]
    fn empty_schedule_rejected() {
        let r = convergence_study(vec![], &[], |_| Ok(vec![]), |_| Ok(vec![]));
        assert!(r.is_err());
    }

    #[test]
    fn affine_jacobian_is_exact() {
        let f = PlaneTransform::affine([[2.0, 1.0], [-0.5, 3.0]], Point2::new(0.3, -1.0));
        let sched: Vec<StudyPoint> =
            (0..6).map(|k| StudyPoint::new(format!("k={k}"), 0.5f64.powi(k))).collect();
        let t = convergence_study(
            vec!["det".into()],
            &sched,
            |p| {
                let h = p.param;
                let tri = OrientedTriangle2::new(
                    Point2::new(0.2, 0.1),
                    Point2::new(0.2 + h, 0.1),
                    Point2::new(0.2 + 0.3 * h, 0.1 + 0.8 * h),
                );
                Ok(vec![jacobian_estimate(&f, &tri, Vertex::A, &EstimatorOptions::default())?])
            },
            |_| Ok(vec![6.5]),
        )
        .unwrap();
        assert_eq!(t.observed_order(), Order::Exact);
        assert!(t.to_csv().lines().skip(1).all(|l| l.ends_with(",exact")));
    }

    #[test]
    fn balanced_schwarz_cube_is_second_order() {
        let s = make_cylinder(1.0).unwrap();
        let t = convergence_study(
            vec!["e23".into()],
            &m_schedule(),
            |p| {
                let m = p.param as u64;
                let tri = schwarz_local_triangle(m, m * m * m)?;
                let b = balanced_mean_bivector(&s, &tri, Vertex::A, &EstimatorOptions::default())?;
                Ok(vec![b.value.bivector_coeff(2, 3)])
            },
            |_| Ok(vec![1.0]),
        )
        .unwrap();
        match t.observed_order() {
            Order::Observed { p, r_squared } => {
                assert!((p + 2.0).abs() < 0.02, "{p}");
                assert!(r_squared > 0.999);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn naive_schwarz_cube_diverges() {
        let s = make_cylinder(1.0).unwrap();
        let t = convergence_study(
            vec!["e12".into(), "e23".into()],
            &m_schedule(),
            |p| {
                let m = p.param as u64;
                let b = mean_bivector_naive(&s, &schwarz_local_triangle(m, m * m * m)?)?;
                Ok(vec![b.bivector_coeff(1, 2), b.bivector_coeff(2, 3)])
            },
            |_| Ok(vec![0.0, 1.0]),
        )
        .unwrap();
        let errs = t.errors();
        assert!(errs.windows(2).all(|w| w[1] > w[0]));
        assert!(matches!(t.observed_order(), Order::Observed { p, .. } if p > 0.9));
    }
}
