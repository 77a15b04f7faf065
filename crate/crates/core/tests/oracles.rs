mod common;

use common::{close, edge_set, flow_oracle, greedy_oracle};
use edpaths::kflow::FlowSolver;
use edpaths::{min_cost_k_flow, successive_paths, StorageMode, WeightModel, WeightedCompleteGraph};

const MODELS: [WeightModel; 2] = [WeightModel::Uniform01, WeightModel::Exponential1];

fn graph(n: usize, model: WeightModel, seed: u64) -> WeightedCompleteGraph {
    WeightedCompleteGraph::generate(n, model, seed, StorageMode::Dense).unwrap()
}

#[test]
fn successive_paths_match_exhaustive_greedy() {
    for model in MODELS {
        for n in [4, 5, 6] {
            for seed in 0..50 {
                let g = graph(n, model, seed);
                let k_max = if n == 6 { 3 } else { n - 1 };
                let want = greedy_oracle(&g, k_max);
                let got = successive_paths(&mut g.clone(), k_max).unwrap();
                assert_eq!(got.records.len(), want.len(), "n={n} seed={seed}");
                for (rec, (vs, c)) in got.records.iter().zip(&want) {
                    assert_eq!(&rec.vertices, vs, "n={n} seed={seed}");
                    assert_eq!(rec.cost, *c, "n={n} seed={seed}");
                }
            }
        }
    }
}

#[test]
fn flows_match_pair_enumeration() {
    for model in MODELS {
        for n in [4, 5, 6] {
            for seed in 0..50 {
                let g = graph(n, model, seed);
                for k in [1, 2] {
                    let (want_cost, want_edges) = flow_oracle(&g, k).unwrap();
                    let got = min_cost_k_flow(&g, k).unwrap();
                    assert!(got.feasible);
                    let got_edges = got.paths.iter().flat_map(|p| edge_set(&p.vertices)).collect();
                    assert_eq!(want_edges, got_edges, "n={n} seed={seed} k={k}");
                    assert!(close(got.total_cost, want_cost, 1e-12), "n={n} seed={seed} k={k}");
                }
            }
        }
    }
}

#[test]
fn crafted_instance_flow_beats_greedy() {
    let g = WeightedCompleteGraph::from_edges(
        4,
        &[(0, 2, 1.0), (2, 1, 10.0), (2, 3, 1.0), (3, 1, 1.0), (0, 3, 10.0), (0, 1, 100.0)],
    )
    .unwrap();
    let greedy = greedy_oracle(&g, 2);
    let s2 = greedy[0].1 + greedy[1].1;
    assert_eq!(s2, successive_paths(&mut g.clone(), 2).unwrap().prefix_sum(2).unwrap());
    let (f2, _) = flow_oracle(&g, 2).unwrap();
    assert_eq!(f2, 22.0);
    assert_eq!(min_cost_k_flow(&g, 2).unwrap().total_cost, 22.0);
    assert!(f2 < s2);
}

#[test]
fn full_augmentation_is_consistent_on_small_graphs() {
    for model in MODELS {
        for seed in 0..30 {
            let g = graph(7, model, seed);
            let mut solver = FlowSolver::new(&g);
            assert_eq!(solver.augment_to(6), 6);
            solver.audit_slackness(1e-9).unwrap();
            assert!(!solver.has_two_way_flow());
            let m = solver.marginals();
            assert!(m.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{m:?}");
        }
    }
}
