use crate::error::{Error, Result};

/// Least-squares slope of `ln(error)` against `ln(step)`.
pub fn estimate_order(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::OrderFit(format!("need at least 2 points, got {}", points.len())));
    }
    if let Some(&(s, e)) = points.iter().find(|(s, e)| !(*s > 0.0 && *e > 0.0 && s.is_finite() && e.is_finite())) {
        return Err(Error::OrderFit(format!("steps and errors must be positive and finite, got ({s}, {e})")));
    }
    let n = points.len() as f64;
    let (mx, my) = points
        .iter()
        .fold((0.0, 0.0), |(x, y), &(s, e)| (x + s.ln() / n, y + e.ln() / n));
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(sxy, sxx), &(s, e)| {
        let dx = s.ln() - mx;
        (sxy + dx * (e.ln() - my), sxx + dx * dx)
    });
    if sxx == 0.0 {
        return Err(Error::OrderFit("all steps are equal".into()));
    }
    Ok(sxy / sxx)
}
