//! Codec run reports: byte accounting, distortion and reproducibility
//! metadata, with a human table and a machine-readable record format.

use std::time::Duration;

/// Outcome of one codec run over one input.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub method: String,
    pub original_bytes: u64,
    pub compressed_bytes: u64,
    /// Name of the distance used for `distortion` (e.g. "hamming").
    pub metric: String,
    pub distortion: f64,
    pub wall: Duration,
    pub seed: u64,
    /// Flat echo of the run configuration; must not contain tabs/newlines.
    pub config: String,
}

impl RunReport {
    /// `original / compressed`.
    pub fn ratio(&self) -> f64 {
        self.original_bytes as f64 / self.compressed_bytes as f64
    }

    /// One tab-separated record:
    /// `method  original_bytes  compressed_bytes  ratio  metric  distortion  seed  config`.
    ///
    /// Wall time is deliberately left to the human table so record files are
    /// byte-identical across reruns with the same seed.
    pub fn record_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{:.9}\t{}\t{:.9}\t{}\t{}",
            self.method,
            self.original_bytes,
            self.compressed_bytes,
            self.ratio(),
            self.metric,
            self.distortion,
            self.seed,
            self.config
        )
    }

    pub fn record_header() -> &'static str {
        "method\toriginal_bytes\tcompressed_bytes\tratio\tmetric\tdistortion\tseed\tconfig"
    }

    /// Fixed-width table for terminals, including wall time.
    pub fn table(reports: &[RunReport]) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<8} {:>10} {:>12} {:>10} {:>9} {:>12} {:>9}  {}\n",
            "method", "original", "compressed", "ratio", "metric", "distortion", "wall_ms", "config"
        ));
        for r in reports {
            out.push_str(&format!(
                "{:<8} {:>10} {:>12} {:>10.3} {:>9} {:>12.6} {:>9} {}\n",
                r.method,
                r.original_bytes,
                r.compressed_bytes,
                r.ratio(),
                r.metric,
                r.distortion,
                r.wall.as_millis(),
                r.config
            ));
        }
        out
    }
}
