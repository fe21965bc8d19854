//! Small worked examples with values fixed by hand enumeration, plus
//! frequency checks of the generators against chi-square and binomial oracles.

use sparse_interp::exact::{
    edge_addition_value, gibbs_event_probability, ground_state, ising_levels, log_partition, nae_equivalence, GibbsEvent,
    SizeCaps,
};
use sparse_interp::hypergraph::{disjoint_union, generate_er, generate_er_interpolated, Hyperedge, Hypergraph};
use sparse_interp::interpolate::er_chain_mc;
use sparse_interp::models::{build_instance, Instance, ModelSpec, PotentialAssignment, Value};
use sparse_interp::verify::{
    check_superadditivity_er, check_superadditivity_reg, concentration_report, edit_distance_bound, monotone_in_edges,
    LadderEnsemble, Verdict,
};

fn graph(n: usize, edges: &[&[u32]]) -> Hypergraph {
    let k = edges.first().map_or(2, |e| e.len());
    Hypergraph::new(n, k, edges.iter().map(|e| Hyperedge::new(e.to_vec())).collect()).unwrap()
}

fn plain(n: usize, edges: &[&[u32]], spec: ModelSpec) -> Instance {
    Instance::new(graph(n, edges), spec, PotentialAssignment::none()).unwrap()
}

fn signed(n: usize, edges: &[&[u32]], spec: ModelSpec, signs: Vec<u32>) -> Instance {
    Instance::new(graph(n, edges), spec, PotentialAssignment::from_packed(signs)).unwrap()
}

fn caps() -> SizeCaps {
    SizeCaps::default()
}

/// Pearson statistic of `counts` against equal cell probabilities.
fn chi_square(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

/// `df + 3 sqrt(2 df)`: a three-sigma bound for a chi-square variable.
fn chi_square_bound(df: usize) -> f64 {
    df as f64 + 3.0 * (2.0 * df as f64).sqrt()
}

#[test]
fn independent_set_on_a_path() {
    let s = ground_state(&plain(3, &[&[0, 1], &[1, 2]], ModelSpec::independent_set()), &caps()).unwrap();
    assert_eq!(s.value, Value::Finite(2.0));
    assert_eq!(s.optimal_count, 1);
    assert_eq!(s.frozen_set, vec![0, 2]);
    assert_eq!(s.witness, vec![1, 0, 1]);
}

#[test]
fn max_cut_on_one_edge() {
    let s = ground_state(&plain(2, &[&[0, 1]], ModelSpec::max_cut()), &caps()).unwrap();
    assert_eq!(s.value, Value::Finite(1.0));
    assert_eq!(s.optimal_count, 2);
    assert_eq!(s.classes, vec![vec![0], vec![1]]);
    assert_eq!(s.frozen_values, vec![None, None]);
}

#[test]
fn two_coloring_without_edges() {
    let inst = Instance::new(Hypergraph::edgeless(2, 2).unwrap(), ModelSpec::coloring(2), PotentialAssignment::none()).unwrap();
    let s = ground_state(&inst, &caps()).unwrap();
    assert_eq!(s.value, Value::Finite(0.0));
    assert_eq!(s.optimal_count, 4);
    assert_eq!(s.classes, vec![vec![0], vec![1]]);
}

#[test]
fn nae_classes() {
    // x1 x2 != 00 and != 11: the optima are 01 and 10
    let one = signed(2, &[&[0, 1]], ModelSpec::nae_ksat(2), vec![0]);
    let s = ground_state(&one, &caps()).unwrap();
    assert_eq!(s.optimal_count, 2);
    assert_eq!(nae_equivalence(&one, &caps()).unwrap(), vec![vec![0, 1]]);
    let edgeless = Instance::new(Hypergraph::edgeless(3, 2).unwrap(), ModelSpec::nae_ksat(2), PotentialAssignment::none()).unwrap();
    assert_eq!(nae_equivalence(&edgeless, &caps()).unwrap(), vec![vec![0], vec![1], vec![2]]);
    let two = signed(4, &[&[0, 1], &[2, 3]], ModelSpec::nae_ksat(2), vec![0, 1]);
    assert_eq!(nae_equivalence(&two, &caps()).unwrap(), vec![vec![0, 1], vec![2, 3]]);
}

#[test]
fn ising_levels_on_tiny_graphs() {
    // one edge, beta = 1, no field: unequal pairs give +1, equal pairs -1
    let edge = plain(2, &[&[0, 1]], ModelSpec::ising(1.0, 0.0));
    let lv = ising_levels(&edge, &caps()).unwrap();
    assert_eq!(lv.levels, vec![1.0, -1.0]);
    assert_eq!(lv.cutoff, 1);
    assert!(lv.exhausted);
    assert_eq!(lv.partitions[0], vec![vec![0], vec![1]]);
    // a single node in field 1: values +1 and -1, both within 2 beta of the top
    let node = Instance::new(Hypergraph::edgeless(1, 2).unwrap(), ModelSpec::ising(1.0, 1.0), PotentialAssignment::none()).unwrap();
    assert_eq!(ising_levels(&node, &caps()).unwrap().levels, vec![1.0, -1.0]);
}

#[test]
fn edge_addition_rules() {
    // path 1-2-3: O* = {1, 3}, so edge (1, 3) lowers H by one
    let path = plain(3, &[&[0, 1], &[1, 2]], ModelSpec::independent_set());
    let add = edge_addition_value(&path, &Hyperedge::new(vec![0, 2]), 0, &caps()).unwrap();
    assert_eq!((add.base, add.brute_force), (Value::Finite(2.0), Value::Finite(1.0)));
    assert!(add.agrees());
    // K-SAT with no clauses: every node is free, so a new clause is satisfiable
    let free = Instance::new(Hypergraph::edgeless(2, 2).unwrap(), ModelSpec::ksat(2), PotentialAssignment::none()).unwrap();
    let add = edge_addition_value(&free, &Hyperedge::new(vec![0, 1]), 3, &caps()).unwrap();
    assert_eq!(add.brute_force, Value::Finite(1.0));
    assert!(add.agrees());
    // Ising edgeless, no field: nodes 1 and 2 are not 0-equivalent, so H rises by beta
    let ising = Instance::new(Hypergraph::edgeless(2, 2).unwrap(), ModelSpec::ising(0.7, 0.0), PotentialAssignment::none()).unwrap();
    let add = edge_addition_value(&ising, &Hyperedge::new(vec![0, 1]), 0, &caps()).unwrap();
    assert!((add.brute_force.as_f64() - 0.7).abs() < 1e-12);
    assert!(add.agrees());
}

#[test]
fn partition_function_examples() {
    let one = Instance::new(Hypergraph::edgeless(1, 2).unwrap(), ModelSpec::independent_set(), PotentialAssignment::none()).unwrap();
    assert!((log_partition(&one, 3.0, &caps()).unwrap() - 4f64.ln()).abs() < 1e-12);
    // ln Z / ln lambda is within N ln q / ln lambda of H
    let inst = build_instance(generate_er(10, 12, 2, 5).unwrap(), ModelSpec::independent_set(), 5).unwrap();
    let h = ground_state(&inst, &caps()).unwrap().value.as_f64();
    let lambda: f64 = 1e6;
    let ratio = log_partition(&inst, lambda, &caps()).unwrap() / lambda.ln();
    assert!(ratio >= h && ratio - h <= 10.0 * 2f64.ln() / lambda.ln());
}

#[test]
fn gibbs_event_examples() {
    let two = Instance::new(Hypergraph::edgeless(2, 2).unwrap(), ModelSpec::independent_set(), PotentialAssignment::none()).unwrap();
    let p = gibbs_event_probability(&two, 1.0, &GibbsEvent::AllOnes(vec![0, 1]), &caps()).unwrap();
    assert!((p - 0.25).abs() < 1e-15);
    let cut = plain(2, &[&[0, 1]], ModelSpec::max_cut());
    let p = gibbs_event_probability(&cut, 1.0, &GibbsEvent::AllEqual(vec![0, 1]), &caps()).unwrap();
    assert!((p - 0.5).abs() < 1e-15);
}

#[test]
fn disjoint_union_relabels() {
    let u = disjoint_union(&graph(2, &[&[0, 1]]), &graph(2, &[&[0, 1]])).unwrap();
    assert_eq!(u.n_nodes(), 4);
    assert_eq!(u.edges(), &[Hyperedge::new(vec![0, 1]), Hyperedge::new(vec![2, 3])]);
    let e = disjoint_union(&Hypergraph::edgeless(2, 2).unwrap(), &Hypergraph::edgeless(3, 2).unwrap()).unwrap();
    assert_eq!((e.n_nodes(), e.n_edges()), (5, 0));
}

#[test]
fn tuples_are_uniform() {
    let g = generate_er(3, 100_000, 2, 17).unwrap();
    let mut counts = [0u64; 9];
    for e in g.edges() {
        counts[(e.nodes()[0] * 3 + e.nodes()[1]) as usize] += 1;
    }
    assert!(chi_square(&counts) <= chi_square_bound(8), "{counts:?}");
}

#[test]
fn ksat_signs_are_uniform() {
    let inst = build_instance(generate_er(5, 100_000, 3, 3).unwrap(), ModelSpec::ksat(3), 3).unwrap();
    let mut counts = [0u64; 8];
    for i in 0..inst.graph().n_edges() {
        counts[inst.sign(i) as usize] += 1;
    }
    assert!(chi_square(&counts) <= chi_square_bound(7), "{counts:?}");
}

#[test]
fn block_edges_split_evenly() {
    // r = 0 on N = 2 with N1 = 1: every edge is (1,1) or (2,2) with probability 1/2 each
    let m = 10_000;
    let g = generate_er_interpolated(2, m, 0, 1, 2, 23).unwrap();
    assert!(g.edges().iter().all(|e| e.nodes()[0] == e.nodes()[1]));
    let first = g.edges().iter().filter(|e| e.nodes()[0] == 0).count() as f64;
    let sd = (m as f64 * 0.25).sqrt();
    assert!((first - m as f64 / 2.0).abs() <= 3.0 * sd);
}

#[test]
fn fully_interpolated_matches_er() {
    // with r = M, the count of edges inside block 1 has the same law as for G(N, M)
    let (n, m, n1, trials) = (6, 8, 3, 4000u64);
    let inside = |g: &Hypergraph| g.edges().iter().filter(|e| e.nodes().iter().all(|&v| (v as usize) < n1)).count() as f64;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for s in 0..trials {
        a.push(inside(&generate_er_interpolated(n, m, m, n1, 2, s).unwrap()));
        b.push(inside(&generate_er(n, m, 2, s + trials).unwrap()));
    }
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let var = |xs: &[f64]| {
        let mu = mean(xs);
        xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
    };
    let se = ((var(&a) + var(&b)) / trials as f64).sqrt();
    assert!((mean(&a) - mean(&b)).abs() <= 3.0 * se);
    // both estimate M (N1/N)^2 = 2
    assert!((mean(&a) - 2.0).abs() <= 3.0 * (var(&a) / trials as f64).sqrt());
}

#[test]
fn interpolation_with_no_edges_is_flat() {
    let r = er_chain_mc(8, 0.0, 4, &ModelSpec::independent_set(), &[0], 50, 1, false).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    let r = check_superadditivity_er(8, 4, 0.0, &ModelSpec::independent_set(), 50, 1, false).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    // no edges: every node joins the independent set on both sides
    let sides: Vec<f64> = r.estimates.iter().filter(|e| e.name.starts_with("E[")).map(|e| e.value).collect();
    assert_eq!(sides, vec![8.0, 8.0]);
}

#[test]
fn degenerate_splits_are_rejected() {
    assert!(check_superadditivity_er(8, 8, 1.0, &ModelSpec::max_cut(), 10, 1, false).is_err());
    assert!(check_superadditivity_reg(8, 8, 2, &ModelSpec::max_cut(), 10, 1, 0.0).is_err());
}

#[test]
fn monotone_and_lipschitz_ladders() {
    for spec in [ModelSpec::independent_set(), ModelSpec::ksat(3)] {
        let r = monotone_in_edges(&spec, 10, &[0, 4, 8, 12], 200, 9).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.margins);
    }
    for spec in [ModelSpec::max_cut(), ModelSpec::ising(1.5, 0.3)] {
        let r = edit_distance_bound(&spec, 10, 10, 3, 200, 9).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.margins);
    }
}

#[test]
fn fluctuations_shrink_with_size() {
    for spec in [ModelSpec::independent_set(), ModelSpec::max_cut()] {
        let r = concentration_report(&[8, 12, 16, 20], LadderEnsemble::ErdosRenyi { c: 1.0 }, &spec, 2000, 4).unwrap();
        let sd: Vec<f64> = r.plot.iter().filter(|p| p.series == "sd(H/N)").map(|p| p.y).collect();
        assert_eq!(sd.len(), 4);
        assert!(sd.windows(2).all(|w| w[1] < w[0]), "{sd:?}");
    }
}

#[test]
fn repeated_runs_give_identical_bodies() {
    let run = || check_superadditivity_er(12, 6, 1.0, &ModelSpec::coloring(3), 500, 77, false).unwrap();
    assert_eq!(serde_json::to_string(&run()).unwrap(), serde_json::to_string(&run()).unwrap());
}
