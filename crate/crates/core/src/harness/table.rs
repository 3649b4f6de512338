use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::certify::{corollary_gap, gda_scsc_rate, log_grid, quarter_kappa_rate, scsc_alpha_sq};
use crate::error::{Error, Result};

/// Gaps below this count as negative.
pub const GAP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub kappa: f64,
    pub dgda_bilinear: f64,
    pub dgda_scsc: f64,
    pub eg_ogda_baseline: f64,
    pub gda_scsc_baseline: f64,
    pub corollary_gap: f64,
    /// Whether `κ ≥ 2`, where the gap is required to be non-negative.
    pub asserted: bool,
}

/// Theoretical per-iteration factors on a log grid of `κ`. Fails if an
/// asserted row has a negative gap.
pub fn rate_table(kappa_min: f64, kappa_max: f64, points: usize) -> Result<Vec<RateRow>> {
    if !(kappa_min >= 1.0) || !(kappa_max >= kappa_min) || !kappa_max.is_finite() {
        return Err(Error::Usage(format!(
            "need 1 <= kappa-min <= kappa-max, got {kappa_min} and {kappa_max}"
        )));
    }
    if points == 0 {
        return Err(Error::Usage("points must be at least 1".into()));
    }
    log_grid(kappa_min, kappa_max, points)
        .into_iter()
        .map(|kappa| {
            let row = RateRow {
                kappa,
                dgda_bilinear: quarter_kappa_rate(kappa),
                dgda_scsc: scsc_alpha_sq(kappa, 1.0)?,
                eg_ogda_baseline: quarter_kappa_rate(kappa),
                gda_scsc_baseline: gda_scsc_rate(kappa),
                corollary_gap: corollary_gap(kappa)?,
                asserted: kappa >= 2.0,
            };
            if row.asserted && row.corollary_gap < -GAP_TOLERANCE {
                return Err(Error::Validation(format!(
                    "rate gap {} is negative at kappa={kappa}",
                    row.corollary_gap
                )));
            }
            Ok(row)
        })
        .collect()
}

pub fn write_rate_table<W: Write>(rows: &[RateRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))
}
