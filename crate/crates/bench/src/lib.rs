//! Shared fixtures for the benchmarks.

use tsolr::features::{build_design, Design};
use tsolr::simgen::{simulate, Preset};
use tsolr::OrdinalSeries;

/// A simulated series from `preset` and its design matrix under the generating covariates.
pub fn fixture(preset: Preset, n: usize) -> (OrdinalSeries, Design) {
    let spec = preset.process().spec();
    let trace = simulate(&preset.truth(), &spec, n, 17, 100).expect("simulation");
    let design = build_design(&trace.series, &spec).expect("design");
    (trace.series, design)
}
