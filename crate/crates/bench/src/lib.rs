//! Shared fixtures for the criterion benches.

use ecbound_core::curve::WeierstrassCurve;

pub fn fixture_curves() -> Vec<WeierstrassCurve> {
    ["0,-1,0", "0,0,1", "0,-16,16", "1,-2,1", "0,-1,1/4"]
        .iter()
        .map(|s| WeierstrassCurve::parse(s).unwrap())
        .collect()
}
