use esp_core::catalog::connected_graphs_up_to;
use esp_core::cpc::{cpc_brute, cpc_solve, CpcInstance};
use esp_core::deletion::{find_deletion_set, split_bipartition, verify_deletion_set, DeletionKind};
use esp_core::generators::{complete, cycle, path, star};
use esp_core::graph::{all_pairs_distances, bfs_distances, covers, is_shortest_path, path_eccentricity};
use esp_core::hardness::{
    dominating_set_brute, expected_vertex_count, generate_hard_instance, h_minus_x_is_chordal, verify_reduction,
};
use esp_core::oracle::{enumerate_shortest_paths, esp_decide_oracle, mesp_optimum};
use esp_core::skeleton::{order_on_shortest_path, skeleton_bound};
use esp_core::solver::{build_q_set, esp_dpd_decide, esp_fvs_decide, mesp_dpd_optimum, mesp_fvs_optimum};
use esp_core::svd::esp_svd_decide_with;
use esp_core::{EspError, Graph, Path, INF};

fn p(g: &Graph, v: &[usize]) -> Path {
    Path::new(g, v.to_vec()).unwrap()
}

#[test]
fn distances() {
    assert_eq!(bfs_distances(&path(4), 0), vec![0, 1, 2, 3]);
    assert_eq!(bfs_distances(&complete(3), 1), vec![1, 0, 1]);
    let split = Graph::from_edges(3, &[(0, 1)]).unwrap();
    assert_eq!(bfs_distances(&split, 0), vec![0, 1, INF]);
    let d = all_pairs_distances(&cycle(4));
    assert_eq!((d.get(0, 2), d.get(0, 1)), (2, 1));
    assert_eq!(all_pairs_distances(&path(1)).get(0, 0), 0);
    assert_eq!(all_pairs_distances(&path(5)).get(0, 4), 4);
}

#[test]
fn paths_and_eccentricity() {
    let c4 = cycle(4);
    assert!(is_shortest_path(&c4, &p(&c4, &[0, 1, 2])));
    assert!(!is_shortest_path(&c4, &p(&c4, &[0, 1, 2, 3])));
    assert!(is_shortest_path(&c4, &p(&c4, &[2])));
    let p4 = path(4);
    assert_eq!(path_eccentricity(&p4, &p(&p4, &[0, 1, 2, 3])).unwrap(), 0);
    assert_eq!(path_eccentricity(&p4, &p(&p4, &[0, 1])).unwrap(), 2);
    let s = star(4);
    assert_eq!(path_eccentricity(&s, &p(&s, &[1, 0, 2])).unwrap(), 1);
    let split = Graph::from_edges(3, &[(0, 1)]).unwrap();
    assert_eq!(path_eccentricity(&split, &p(&split, &[0, 1])), Err(EspError::Disconnected));
    assert!(covers(&p4, &p(&p4, &[3]), 3, 0));
    assert!(!covers(&p4, &p(&p4, &[0]), 3, 2));
    assert!(covers(&p4, &p(&p4, &[0]), 3, 3));
}

#[test]
fn oracle() {
    let a = esp_decide_oracle(&path(4), 0).unwrap();
    assert_eq!(a.certificate.unwrap().vertices(), &[0, 1, 2, 3]);
    assert!(!esp_decide_oracle(&star(4), 0).unwrap().feasible);
    assert!(esp_decide_oracle(&cycle(6), 1).unwrap().feasible);
    for n in 1..=15 {
        assert_eq!(mesp_optimum(&path(n)).unwrap().0, 0);
    }
    assert_eq!(mesp_optimum(&complete(4)).unwrap().0, 1);
    assert_eq!(mesp_optimum(&star(4)).unwrap().0, 1);
    assert_eq!(enumerate_shortest_paths(&cycle(4), 0, 2, 10).unwrap().len(), 2);
    assert_eq!(enumerate_shortest_paths(&complete(4), 0, 1, 10).unwrap().len(), 1);
    assert_eq!(enumerate_shortest_paths(&star(6), 1, 2, 10).unwrap().len(), 1);
}

#[test]
fn skeleton_helpers() {
    let d = all_pairs_distances(&path(5));
    assert_eq!(order_on_shortest_path(&d, &[3, 1], 0), Some(vec![1, 3]));
    let d = all_pairs_distances(&cycle(4));
    assert_eq!(order_on_shortest_path(&d, &[1, 3], 0), None);
    assert_eq!(order_on_shortest_path(&d, &[], 0), Some(vec![]));
    assert_eq!(skeleton_bound(5, 1, 2), 400);
}

#[test]
fn cpc() {
    let forest = path(5);
    let mk = |fam: Vec<usize>| CpcInstance { forest: forest.clone(), b: vec![0, 4], ell: 1, families: vec![vec![fam]] };
    let yes = mk(vec![1, 2, 3]);
    assert_eq!(cpc_solve(&yes).unwrap(), Some(vec![0]));
    assert_eq!(cpc_brute(&yes, 1 << 20).unwrap(), Some(vec![0]));
    assert_eq!(cpc_solve(&mk(vec![2])).unwrap(), None);
    let empty = CpcInstance { forest: path(3), b: vec![], ell: 0, families: vec![] };
    assert_eq!(cpc_solve(&empty).unwrap(), Some(vec![]));
    let uncovered = CpcInstance { b: vec![1], ..empty };
    assert_eq!(cpc_solve(&uncovered).unwrap(), None);
    assert_eq!(cpc_brute(&uncovered, 1).unwrap(), None);
}

#[test]
fn deletion_sets() {
    assert!(verify_deletion_set(&cycle(4), DeletionKind::Fvs, &[0]));
    assert!(!verify_deletion_set(&cycle(4), DeletionKind::Fvs, &[]));
    for v in 0..4 {
        assert!(verify_deletion_set(&cycle(4), DeletionKind::Svd, &[v]));
    }
    assert_eq!(find_deletion_set(&path(7), DeletionKind::Fvs, 3).unwrap().k(), 0);
    assert_eq!(find_deletion_set(&cycle(6), DeletionKind::Dpd, 3).unwrap().k(), 1);
    // Removing a vertex of C5 leaves P4, which is split.
    assert_eq!(find_deletion_set(&cycle(5), DeletionKind::Svd, 3).unwrap().k(), 1);
    let (c, i) = split_bipartition(&complete(4)).unwrap();
    assert_eq!((c.len(), i.len()), (4, 0));
    assert!(split_bipartition(&cycle(4)).is_none());
}

#[test]
fn solvers() {
    assert!(esp_fvs_decide(&cycle(4), &[0], 1).unwrap().answer.feasible);
    assert!(!esp_fvs_decide(&cycle(4), &[0], 0).unwrap().answer.feasible);
    assert_eq!(mesp_fvs_optimum(&path(6), &[]).unwrap().0, 0);
    assert_eq!(mesp_fvs_optimum(&star(5), &[]).unwrap().0, 1);
    assert_eq!(mesp_fvs_optimum(&cycle(8), &[0]).unwrap().0, mesp_optimum(&cycle(8)).unwrap().0);
    assert_eq!(mesp_dpd_optimum(&path(6), &[]).unwrap().0, 0);
    let d = all_pairs_distances(&path(3));
    assert_eq!(build_q_set(&d, &[0, 2], 3), vec![0, 1, 2, 3]);
    assert_eq!(build_q_set(&d, &[1], 9), vec![0, 1]);
    assert!(esp_dpd_decide(&cycle(7), &[0], 2).unwrap().answer.feasible);
}

#[test]
fn split_solver_on_small_graphs() {
    for g in connected_graphs_up_to(6) {
        let Some(ds) = find_deletion_set(&g, DeletionKind::Svd, 2) else { continue };
        let d = all_pairs_distances(&g);
        for ell in 0..=d.diameter() {
            let want = esp_decide_oracle(&g, ell).unwrap().feasible;
            let got = esp_svd_decide_with(&g, &d, &ds.vertices, ell, 0).unwrap();
            assert_eq!(got.answer.feasible, want, "{g:?} ell={ell}");
        }
    }
}

#[test]
fn hardness() {
    let k2 = complete(2);
    let hi = generate_hard_instance(&k2, 1).unwrap();
    assert_eq!(hi.h.n(), 14);
    assert_eq!(expected_vertex_count(&k2, 1), 14);
    assert_eq!(hi.x.len(), 2);
    assert!(h_minus_x_is_chordal(&hi));
    let check = verify_reduction(&k2, 1, &hi).unwrap();
    assert!(check.agree && check.dominating_set.is_some() && check.path.is_some());

    let empty = Graph::new(3);
    let hi = generate_hard_instance(&empty, 1).unwrap();
    let check = verify_reduction(&empty, 1, &hi).unwrap();
    assert!(check.agree && check.path.is_none());

    assert!(dominating_set_brute(&complete(3), 1).is_some());
    assert!(dominating_set_brute(&cycle(5), 1).is_none());
    assert!(dominating_set_brute(&cycle(5), 2).is_some());
    assert!(dominating_set_brute(&empty, 2).is_none());
}
