use rand::Rng;
use surface_threshold::layout::{CodeLayout, LogicalClass, MechanismSet, PairKind};
use surface_threshold::rng;

#[test]
fn distance_two_description_matches_golden_file() {
    let golden = include_str!("data/layout_d2.txt");
    assert_eq!(CodeLayout::new(2).unwrap().describe(), golden);
}

#[test]
fn stabilizers_preserve_syndrome_and_class() {
    let mut rng = rng::stream(1, &[0x4C41_594F], 0);
    for d in 2..=5 {
        let layout = CodeLayout::new(d).unwrap();
        for _ in 0..20 {
            let z: Vec<bool> = (0..layout.num_qubits()).map(|_| rng.gen_bool(0.3)).collect();
            let s = layout.syndrome_of(&z);
            let parity = layout.logical_parity(&z);
            for stab in layout.z_stabilizers() {
                let mut w = z.clone();
                for &q in &stab.qubits {
                    w[q] ^= true;
                }
                assert_eq!(layout.syndrome_of(&w), s);
                assert_eq!(layout.logical_parity(&w), parity);
            }
        }
        for stab in layout.z_stabilizers() {
            let mut w = vec![false; layout.num_qubits()];
            for &q in &stab.qubits {
                w[q] = true;
            }
            assert_eq!(layout.logical_class(&w).unwrap(), LogicalClass::Trivial);
        }
    }
}

#[test]
fn syndrome_depends_only_on_net_support() {
    let mut rng = rng::stream(2, &[0x4E45_5453], 0);
    for d in 2..=5 {
        let layout = CodeLayout::new(d).unwrap();
        for _ in 0..200 {
            let m = layout.sample_mechanisms_with(0.2, 0.2, &mut rng).unwrap();
            // Re-express the same net support as singles only.
            let singles = MechanismSet {
                single_fires: m.net_support(&layout),
                pair_fires: vec![false; layout.pairs().len()],
            };
            assert_eq!(layout.syndrome(&m), layout.syndrome(&singles));
        }
    }
}

#[test]
fn partner_pairs_compose_to_their_plaquette() {
    for d in 2..=6 {
        let layout = CodeLayout::new(d).unwrap();
        let mut checked = 0;
        for (plaquette, stab) in layout.z_stabilizers().iter().enumerate() {
            for kind in [PairKind::Diagonal, PairKind::AntiDiagonal] {
                let owned: Vec<usize> = (0..layout.pairs().len())
                    .filter(|&p| layout.pairs()[p].plaquette == plaquette && layout.pairs()[p].kind == kind)
                    .collect();
                if owned.len() != 2 {
                    continue;
                }
                let mut m = MechanismSet::empty(&layout);
                for &p in &owned {
                    m.pair_fires[p] = true;
                }
                let support = m.net_support(&layout);
                let on: Vec<usize> = (0..support.len()).filter(|&q| support[q]).collect();
                let mut expected = stab.qubits.clone();
                expected.sort_unstable();
                assert_eq!(on, expected, "d = {d}, plaquette {plaquette}");
                checked += 1;
            }
        }
        assert!(d == 2 || checked > 0);
    }
}

#[test]
fn logical_chain_is_logical() {
    for d in 2..=7 {
        let layout = CodeLayout::new(d).unwrap();
        let mut z = vec![false; layout.num_qubits()];
        for &q in layout.logical_z() {
            z[q] = true;
        }
        assert!(layout.syndrome_of(&z).is_empty());
        assert_eq!(layout.logical_class(&z).unwrap(), LogicalClass::Logical);
        assert_eq!(layout.logical_class(&vec![false; layout.num_qubits()]).unwrap(), LogicalClass::Trivial);
    }
}
