use surface_threshold::eem::{mechanism_coset_table, EdgeSet, EffectiveParams};
use surface_threshold::layout::CodeLayout;
use surface_threshold::rbim::{Adjacency, PlanarModel};

fn max_error(d: usize, adjacency: Adjacency, p1: f64, p2: f64, draws: u64) -> f64 {
    let layout = CodeLayout::new(d).unwrap();
    let edges = EdgeSet::build(&layout);
    let params = EffectiveParams::new(p1, p2).unwrap();
    let table = mechanism_coset_table(&layout, p1, p2).unwrap();
    let model = PlanarModel::new(&layout, &edges, adjacency).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..draws {
        let signs = edges.sample_signs(&params, seed);
        let support = edges.chain_support(&signs.indicators(), layout.num_qubits());
        let syndrome = layout.syndrome_of(&support);
        let sums = table.get(&syndrome).unwrap();
        let exact = sums.success_given(layout.logical_parity(&support));
        let thermal = model.success_probability(&edges, &signs, &params);
        worst = worst.max((exact - thermal).abs());
    }
    worst
}

#[test]
fn smallest_code_matches_coset_sums() {
    assert!(max_error(2, Adjacency::Standard, 0.2, 0.15, 50) < 1e-8);
}

#[test]
fn distance_three_matches_coset_sums() {
    assert!(max_error(3, Adjacency::Standard, 0.12, 0.1, 10) < 1e-8);
}

/// The other reading of the inter-cell spin labels breaks the equivalence
/// by a wide margin at both distances.
#[test]
fn transposed_labels_are_rejected() {
    assert!(max_error(2, Adjacency::Transposed, 0.2, 0.15, 50) > 1e-3);
    assert!(max_error(3, Adjacency::Transposed, 0.12, 0.1, 10) > 1e-3);
}
