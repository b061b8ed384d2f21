//! Benchmark fixtures shared by the criterion targets.

use conespec::spectrum::robin_constant;
use conespec::{BoundaryCondition, Channel, ConeParams, Convention};

/// Channels timed by the solver benches: a cone tower and an anti-cone
/// shell state, both at unit coupling.
pub fn fixtures() -> Vec<(&'static str, Channel, BoundaryCondition)> {
    [("cone_0.5", 0.5), ("anticone_2", 2.0)]
        .into_iter()
        .map(|(name, alpha)| {
            let p = ConeParams::unit(alpha).expect("valid alpha");
            let ch = p.channel(0).expect("channel");
            let bc = robin_constant(&p, &ch, Convention::Integral).boundary();
            (name, ch, bc)
        })
        .collect()
}
