//! Inputs shared by the benchmarks.

use segal_core::{Flavour, RootedForest};

/// The five-vertex tree with two branches of length two.
pub fn example_tree() -> RootedForest {
    RootedForest::parse("a(b(c),d(e))", Flavour::Labelled).expect("valid expression")
}
