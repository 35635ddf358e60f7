//! Map-quality and sampling-quality metrics.

use crate::environment::FieldGrid;
use crate::error::{Error, Result};
use crate::gp::{GaussianProcess, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRecord {
    pub rmse: f64,
    pub mae: f64,
    pub hotspot_rmse: f64,
    pub hotspot_mae: f64,
    /// Share of samples inside hotspot cells, in percent.
    pub hotspot_pct: f64,
}

/// Compares `prediction` with `truth` cell by cell. Hotspot cells are those
/// whose truth exceeds the truth median; a sample counts as a hotspot sample
/// when the truth cell containing it is a hotspot. No samples gives 0%.
pub fn metrics(prediction: &FieldGrid, truth: &FieldGrid, samples: &[Point]) -> Result<MetricRecord> {
    if !prediction.same_shape(truth) {
        return Err(Error::InvalidArgument(format!(
            "prediction grid {}x{} does not match truth grid {}x{}",
            prediction.width(),
            prediction.height(),
            truth.width(),
            truth.height()
        )));
    }
    let mask = truth.hotspot_mask();
    let (mut sq, mut abs, mut hsq, mut habs, mut hn) = (0.0, 0.0, 0.0, 0.0, 0usize);
    for ((p, t), hot) in prediction.cells().iter().zip(truth.cells()).zip(&mask) {
        let e = p - t;
        sq += e * e;
        abs += e.abs();
        if *hot {
            hsq += e * e;
            habs += e.abs();
            hn += 1;
        }
    }
    let n = truth.cells().len() as f64;
    let (hotspot_rmse, hotspot_mae) = if hn == 0 {
        (0.0, 0.0)
    } else {
        ((hsq / hn as f64).sqrt(), habs / hn as f64)
    };
    let hits = samples
        .iter()
        .filter(|s| truth.cell_index(s[0], s[1]).is_some_and(|i| mask[i]))
        .count();
    let hotspot_pct = if samples.is_empty() {
        0.0
    } else {
        100.0 * hits as f64 / samples.len() as f64
    };
    Ok(MetricRecord {
        rmse: (sq / n).sqrt(),
        mae: abs / n,
        hotspot_rmse,
        hotspot_mae,
        hotspot_pct,
    })
}

/// Posterior mean at every cell center of `template`, in the GP's units.
pub fn predict_grid(gp: &GaussianProcess, template: &FieldGrid) -> Result<FieldGrid> {
    let cells = template.cell_centers().iter().map(|c| gp.mean(c)).collect();
    template.with_cells(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::Extent;
    use crate::gp::GpParams;

    fn grid(cells: Vec<f64>, w: usize, h: usize) -> FieldGrid {
        FieldGrid::new(w, h, Extent::new(0.0, 0.0, w as f64, h as f64).unwrap(), cells).unwrap()
    }

    #[test]
    fn two_by_two_example() {
        let truth = grid(vec![1.0, 2.0, 3.0, 4.0], 2, 2);
        let pred = grid(vec![1.0, 2.0, 3.0, 6.0], 2, 2);
        let m = metrics(&pred, &truth, &[]).unwrap();
        assert!((m.rmse - 1.0).abs() < 1e-12);
        assert!((m.mae - 0.5).abs() < 1e-12);
        assert!((m.hotspot_rmse - 2f64.sqrt()).abs() < 1e-12);
        assert!((m.hotspot_mae - 1.0).abs() < 1e-12);
        assert_eq!(m.hotspot_pct, 0.0);
    }

    #[test]
    fn perfect_and_shifted_predictions() {
        let truth = grid((0..12).map(|i| (i * i) as f64).collect(), 4, 3);
        let m = metrics(&truth, &truth, &[]).unwrap();
        assert_eq!((m.rmse, m.mae, m.hotspot_rmse, m.hotspot_mae), (0.0, 0.0, 0.0, 0.0));
        let shifted = truth.map(|v| v - 0.75).unwrap();
        let m = metrics(&shifted, &truth, &[]).unwrap();
        assert!((m.rmse - 0.75).abs() < 1e-12 && (m.mae - 0.75).abs() < 1e-12);
    }

    #[test]
    fn hotspot_percentage_counts_truth_cells() {
        let truth = grid(vec![1.0, 2.0, 3.0, 4.0], 2, 2);
        // Cells (0,1) and (1,1) hold 3 and 4, the hotspots.
        let samples = [[0.5, 0.5], [1.5, 1.5], [0.2, 1.9], [1.1, 0.1]];
        let m = metrics(&truth, &truth, &samples).unwrap();
        assert!((m.hotspot_pct - 50.0).abs() < 1e-12);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let a = grid(vec![0.0; 4], 2, 2);
        let b = grid(vec![0.0; 6], 3, 2);
        assert!(metrics(&a, &b, &[]).is_err());
    }

    #[test]
    fn prior_prediction_is_zero() {
        let gp = GaussianProcess::prior(GpParams::default()).unwrap();
        let template = grid(vec![5.0; 9], 3, 3);
        let p = predict_grid(&gp, &template).unwrap();
        assert!(p.cells().iter().all(|&v| v == 0.0));
    }
}
