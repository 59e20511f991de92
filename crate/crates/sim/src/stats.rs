use kdclass::numeric::{least_squares, quantile_sorted};

use crate::study::Which;

/// Ordinary least-squares line through `points`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: Vec<(f64, f64)>,
    pub which: Which,
}

impl SlopeFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }

    /// Mean of the abscissae and of the fitted values there.
    pub fn center(&self) -> (f64, f64) {
        let k = self.points.len() as f64;
        let mx = self.points.iter().map(|p| p.0).sum::<f64>() / k;
        (mx, self.predict(mx))
    }

    /// Line of the given slope through [`SlopeFit::center`].
    pub fn reference_line(&self, slope: f64) -> (f64, f64) {
        let (cx, cy) = self.center();
        (slope, cy - slope * cx)
    }
}

pub fn fit_slope(points: &[(f64, f64)], which: Which) -> kdclass::Result<SlopeFit> {
    let (slope, intercept) = least_squares(points).ok_or(kdclass::Error::DegenerateRegression)?;
    Ok(SlopeFit { slope, intercept, points: points.to_vec(), which })
}

pub fn mean_sd(v: &[f64]) -> (f64, f64) {
    let k = v.len() as f64;
    let mean = v.iter().sum::<f64>() / k;
    let sd = if v.len() > 1 { (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt() } else { 0.0 };
    (mean, sd)
}

/// Interquartile range with linear interpolation between order statistics.
pub fn iqr(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    quantile_sorted(&s, 0.75) - quantile_sorted(&s, 0.25)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_lines() {
        let pts: Vec<(f64, f64)> = (0..6).map(|i| (i as f64, 0.2 * i as f64 + 1.0)).collect();
        let f = fit_slope(&pts, Which::H1).unwrap();
        assert!((f.slope - 0.2).abs() < 1e-14 && (f.intercept - 1.0).abs() < 1e-14);
        let pts: Vec<(f64, f64)> = (1..8).map(|i| (i as f64, i as f64 / 9.0)).collect();
        assert!((fit_slope(&pts, Which::H2).unwrap().slope - 1.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn shift_invariance_and_reference_lines() {
        let pts = vec![(3.0, 1.2), (3.5, 1.4), (4.1, 1.45), (5.3, 1.9)];
        let shifted: Vec<_> = pts.iter().map(|&(x, y)| (x, y + 7.5)).collect();
        let a = fit_slope(&pts, Which::H1).unwrap();
        let b = fit_slope(&shifted, Which::H1).unwrap();
        assert!((a.slope - b.slope).abs() < 1e-12);
        let (cx, cy) = a.center();
        for s in [0.2, 1.0 / 9.0] {
            let (slope, icpt) = a.reference_line(s);
            assert_eq!(slope, s);
            assert!((icpt + slope * cx - cy).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_regression() {
        assert!(fit_slope(&[(1.0, 2.0), (1.0, 3.0)], Which::H1).is_err());
        assert!(fit_slope(&[(1.0, 2.0)], Which::H1).is_err());
    }

    #[test]
    fn spread_helpers() {
        assert_eq!(iqr(&[1.0, 2.0, 3.0, 4.0, 5.0]), 2.0);
        let (m, s) = mean_sd(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
    }
}
