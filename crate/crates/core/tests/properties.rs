mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(config())]

    #[test]
    fn simplicial_identities(t in tree(6), f in flavour(), g in graph(4), labelled in any::<bool>()) {
        identities_hold(&t, f, &g, labelled)?;
    }

    #[test]
    fn faces_respect_classes(t in tree(6), f in flavour(), g in graph(4), labelled in any::<bool>()) {
        codes_well_defined(&t, f, &g, labelled)?;
    }

    #[test]
    fn plain_below_planar_below_labelled(t in tree(6)) {
        flavours_monotone(&t)?;
    }

    #[test]
    fn tree_codes_ignore_vertex_ids((t, perm) in permuted_tree()) {
        codes_invariant(&t, &perm)?;
    }

    #[test]
    fn graph_codes_ignore_vertex_ids((g, perm) in permuted_graph()) {
        graph_codes_invariant(&g, &perm)?;
    }
}
