use std::collections::BTreeMap;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::{Length, Rational};

fn t(s: &str) -> Tree {
    Tree::parse(s).unwrap()
}

fn len(s: &str) -> Length {
    s.parse().unwrap()
}

fn metric(tree: &str, lens: &[(&str, &str)]) -> MetricTree {
    let table: Vec<LengthEntry> =
        lens.iter().map(|(e, l)| LengthEntry { edge: e.to_string(), len: l.to_string() }).collect();
    MetricTree::from_table(t(tree), &table).unwrap()
}

/// Little Schröder numbers by the three-term recurrence
/// `(m+1) a_m = 3(2m-1) a_{m-1} - (m-2) a_{m-2}`; trees with `n` leaves
/// are counted by `a_{n-1}`.
fn schroeder_oracle(n: usize) -> u64 {
    let mut a = vec![1i64, 1];
    for m in 2..n as i64 {
        let v = (3 * (2 * m - 1) * a[m as usize - 1] - (m - 2) * a[m as usize - 2]) / (m + 1);
        a.push(v);
    }
    a[n - 1] as u64
}

fn catalan_oracle(m: u64) -> u64 {
    // C_m = binom(2m, m) / (m + 1)
    let mut c: u64 = 1;
    for i in 0..m {
        c = c * (2 * m - i) / (i + 1);
    }
    c / (m + 1)
}

#[test]
fn parse_examples() {
    assert_eq!(t("*"), Tree::Leaf);
    assert_eq!(t("(***)"), Tree::corolla(3));
    let two = Tree::corolla(2);
    assert_eq!(t("((**)*)"), two.graft(1, &two).unwrap());
    assert_eq!(t(" ( ( * * ) * ) ").serialize(), "((**)*)");
}

#[test]
fn parse_errors() {
    assert_eq!(Tree::parse("(*)"), Err(TreeError::ArityOne { offset: 0 }));
    assert!(matches!(Tree::parse("(**"), Err(TreeError::Syntax { offset: 3, .. })));
    assert!(matches!(Tree::parse("(*x)"), Err(TreeError::Syntax { offset: 2, .. })));
    assert!(matches!(Tree::parse("**"), Err(TreeError::Syntax { offset: 1, .. })));
    assert!(matches!(Tree::parse("()"), Err(TreeError::Syntax { offset: 0, .. })));
    assert!(matches!(Tree::parse(""), Err(TreeError::Syntax { offset: 0, .. })));
    assert_eq!(Tree::parse("(*(*))"), Err(TreeError::ArityOne { offset: 2 }));
}

#[test]
fn leaves_and_edges() {
    let c4 = Tree::corolla(4);
    assert_eq!(c4.leaves(), 4);
    assert!(c4.internal_edges().is_empty());
    let b = t("((**)*)");
    assert_eq!(b.leaves(), 3);
    assert_eq!(b.internal_edges(), vec![EdgeId(vec![0])]);
    let e = t("((**)(*(**)))").internal_edges();
    let ids: Vec<String> = e.iter().map(|x| x.to_string()).collect();
    assert_eq!(ids, vec!["0", "1", "1.1"]);
}

#[test]
fn binary_trees_have_n_minus_two_edges() {
    for n in 2..=7 {
        for tree in enumerate_trees(n, true).unwrap() {
            assert_eq!(tree.internal_edges().len(), n - 2);
            assert_eq!(tree.internal_edges().len(), tree.internal_nodes() - 1);
        }
    }
}

#[test]
fn graft_examples() {
    let c2 = Tree::corolla(2);
    assert_eq!(c2.graft(2, &c2).unwrap().serialize(), "(*(**))");
    let g = Tree::corolla(3).graft(1, &c2).unwrap();
    assert_eq!(g.serialize(), "((**)**)");
    assert_eq!(g.internal_edges().len(), 1);
    assert_eq!(c2.graft(3, &c2), Err(TreeError::LeafOutOfRange { k: 3, leaves: 2 }));
    assert_eq!(c2.graft(0, &c2), Err(TreeError::LeafOutOfRange { k: 0, leaves: 2 }));
    // grafting the one-leaf tree is the identity
    assert_eq!(c2.graft(1, &Tree::Leaf).unwrap(), c2);
    assert_eq!(Tree::Leaf.graft(1, &c2).unwrap(), c2);
}

#[test]
fn metric_graft_examples() {
    let c2 = MetricTree::uniform(Tree::corolla(2), Length::Infinity);
    let g = c2.graft_metric(2, &c2, len("5")).unwrap();
    assert_eq!(g.tree().serialize(), "(*(**))");
    assert_eq!(g.length(&EdgeId(vec![1])), Some(&len("5")));
    // zero-length new edge collapses back to the corolla
    let z = c2.graft_metric(2, &c2, Length::zero()).unwrap().canonicalize();
    assert_eq!(z.tree(), &Tree::corolla(3));
    assert!(z.lengths().is_empty());
    // infinite new edge matches the plain graft
    let inf = c2.graft_metric(1, &c2, Length::Infinity).unwrap();
    assert_eq!(inf.tree(), &Tree::corolla(2).graft(1, &Tree::corolla(2)).unwrap());
    assert!(inf.lengths().values().all(|l| l.is_infinite()));
}

#[test]
fn metric_graft_preserves_lengths() {
    let rho = metric("((**)*)", &[("0", "2")]);
    let sigma = metric("(*(**))", &[("1", "7/3")]);
    let g = rho.graft_metric(3, &sigma, len("1")).unwrap();
    assert_eq!(g.tree().serialize(), "((**)(*(**)))");
    assert_eq!(g.length(&EdgeId(vec![0])), Some(&len("2")));
    assert_eq!(g.length(&EdgeId(vec![1])), Some(&len("1")));
    assert_eq!(g.length(&EdgeId(vec![1, 1])), Some(&len("7/3")));
}

#[test]
fn degeneracy_examples() {
    assert_eq!(Tree::corolla(4).degeneracy(2).unwrap(), Tree::corolla(3));
    assert_eq!(t("((**)*)").degeneracy(1).unwrap(), Tree::corolla(2));
    assert_eq!(t("((**)*)").degeneracy(3).unwrap(), Tree::corolla(2));
    assert_eq!(Tree::corolla(2).degeneracy(1), Err(TreeError::TooFewLeaves(2)));
    assert_eq!(Tree::corolla(3).degeneracy(4), Err(TreeError::LeafOutOfRange { k: 4, leaves: 3 }));
}

#[test]
fn degeneracy_merges_lengths_by_max() {
    // removing leaf 2 leaves the node over edge "1" with a single child,
    // so edges "1" (length 2) and "1.1" (length 5) fuse
    let mt = metric("(*(*(**)))", &[("1", "2"), ("1.1", "5")]);
    let s = mt.degeneracy_metric(2).unwrap();
    assert_eq!(s.tree().serialize(), "(*(**))");
    assert_eq!(s.lengths().len(), 1);
    assert_eq!(s.length(&EdgeId(vec![1])), Some(&len("5")));
    // fusing at the outermost node drops the edge into the root edge
    let mt = metric("(*(**))", &[("1", "3")]);
    let s = mt.degeneracy_metric(1).unwrap();
    assert_eq!(s.tree(), &Tree::corolla(2));
    assert!(s.lengths().is_empty());
}

#[test]
fn canonicalize_examples() {
    let pos = metric("((**)(**))", &[("0", "1"), ("1", "inf")]);
    assert_eq!(pos.canonicalize(), pos);
    let zero = metric("((**)(*(**)))", &[("0", "0"), ("1", "0"), ("1.1", "0")]);
    let c = zero.canonicalize();
    assert_eq!(c.tree(), &Tree::corolla(5));
    assert!(c.lengths().is_empty());
    let partial = metric("((**)(*(**)))", &[("0", "1/2"), ("1", "0"), ("1.1", "4")]);
    let c = partial.canonicalize();
    assert_eq!(c.tree().serialize(), "((**)*(**))");
    assert_eq!(c.length(&EdgeId(vec![0])), Some(&len("1/2")));
    assert_eq!(c.length(&EdgeId(vec![2])), Some(&len("4")));
}

#[test]
fn metric_validation() {
    let tree = t("((**)*)");
    assert_eq!(MetricTree::<Rational>::new(tree.clone(), BTreeMap::new()), Err(TreeError::MissingLength("0".into())));
    let mut extra = BTreeMap::new();
    extra.insert(EdgeId(vec![0]), len("1"));
    extra.insert(EdgeId(vec![1]), len("1"));
    assert_eq!(MetricTree::new(tree, extra), Err(TreeError::UnknownEdge("1".into())));
}

#[test]
fn enumeration_counts_match_oracles() {
    for n in 1..=7 {
        assert_eq!(enumerate_trees(n, false).unwrap().len() as u64, schroeder_oracle(n), "n = {n}");
    }
    assert_eq!(enumerate_trees(3, false).unwrap().len(), 3);
    assert_eq!(enumerate_trees(4, false).unwrap().len(), 11);
    assert_eq!(enumerate_trees(6, false).unwrap().len(), 197);
    for n in 2..=8 {
        assert_eq!(enumerate_trees(n, true).unwrap().len() as u64, catalan_oracle(n as u64 - 1), "n = {n}");
    }
    assert!(enumerate_trees(0, false).is_err());
    assert!(enumerate_trees(13, false).is_err());
}

#[test]
fn enumeration_order_and_uniqueness() {
    let trees = enumerate_trees(4, false).unwrap();
    let ser: Vec<String> = trees.iter().map(Tree::serialize).collect();
    assert_eq!(ser[0], "(****)");
    let mut sorted = ser.clone();
    sorted.dedup();
    assert_eq!(sorted.len(), ser.len());
    let keys: Vec<(usize, String)> = trees.iter().map(|t| (t.internal_edge_count(), t.serialize())).collect();
    let mut expect = keys.clone();
    expect.sort();
    assert_eq!(keys, expect);
    assert!(trees.iter().all(|t| t.leaves() == 4));
}

#[test]
fn cut_examples() {
    let c2 = MetricTree::uniform(Tree::corolla(2), Length::Infinity);
    let g = c2.graft_metric(2, &c2, len("5")).unwrap();
    let cut = g.cut(&len("3"));
    assert_eq!(cut.pieces.len(), 2);
    assert_eq!(cut.pieces[0].tree(), &Tree::corolla(2));
    assert_eq!(cut.pieces[1].tree(), &Tree::corolla(2));
    assert_eq!(cut.cut_lengths, vec![len("5")]);
    assert_eq!(cut.reassemble(), g);

    let uncut = g.cut(&len("7"));
    assert_eq!(uncut.pieces, vec![g.clone()]);
    assert!(uncut.cut_lengths.is_empty());
}

#[test]
fn cut_five_leaf_figure_shape() {
    // spine edges "2" and "2.1" carry l3, l4 ≥ L
    let mt = metric("(**(*(**)))", &[("2", "4"), ("2.1", "9/2")]);
    assert_eq!(mt.leaves(), 5);
    assert_eq!(mt.spine(), vec![EdgeId(vec![2]), EdgeId(vec![2, 1])]);
    let cut = mt.cut(&len("3"));
    assert_eq!(cut.pieces.len(), 3);
    let ser: Vec<String> = cut.pieces.iter().map(|p| p.tree().serialize()).collect();
    assert_eq!(ser, vec!["(***)", "(**)", "(**)"]);
    assert_eq!(cut.cut_lengths, vec![len("4"), len("9/2")]);
    assert_eq!(cut.reassemble(), mt);
    // only the longer edge qualifies at L = 9/2
    let cut = mt.cut(&len("9/2"));
    assert_eq!(cut.pieces.len(), 2);
    assert_eq!(cut.pieces[0].tree().serialize(), "(**(**))");
    // an off-spine edge stays inside its piece
    let mt = metric("((**)*(*(**)))", &[("0", "1"), ("2", "4"), ("2.1", "9/2")]);
    let cut = mt.cut(&len("3"));
    assert_eq!(cut.pieces[0].tree().serialize(), "((**)**)");
    assert_eq!(cut.pieces[0].length(&EdgeId(vec![0])), Some(&len("1")));
}

#[test]
fn json_round_trip() {
    let mt = metric("((**)(*(**)))", &[("0", "1/2"), ("1", "inf"), ("1.1", "3")]);
    let j = mt.to_json();
    assert_eq!(j.lengths[0], LengthEntry { edge: "0".into(), len: "1/2".into() });
    assert_eq!(j.lengths[1].len, "inf");
    let text = serde_json::to_string(&j).unwrap();
    let back: MetricTreeJson = serde_json::from_str(&text).unwrap();
    assert_eq!(MetricTree::from_json(&back).unwrap(), mt);
}

fn arb_tree(max_leaves: usize) -> impl Strategy<Value = Tree> {
    let leaf = Just(Tree::Leaf);
    leaf.prop_recursive(4, max_leaves as u32, 4, |inner| prop::collection::vec(inner, 2..=4).prop_map(Tree::Node))
}

fn arb_length() -> impl Strategy<Value = Length> {
    prop_oneof![
        2 => Just(Length::zero()),
        1 => Just(Length::Infinity),
        5 => (1i64..12, 1i64..4).prop_map(|(a, b)| Length::Finite(Rational::new(BigInt::from(a), BigInt::from(b)))),
    ]
}

fn arb_metric(max_leaves: usize) -> impl Strategy<Value = MetricTree> {
    arb_tree(max_leaves).prop_flat_map(|tree| {
        let edges = tree.internal_edges();
        prop::collection::vec(arb_length(), edges.len())
            .prop_map(move |lens| MetricTree::new(tree.clone(), edges.iter().cloned().zip(lens).collect()).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn serialization_round_trips(tree in arb_tree(16)) {
        let s = tree.serialize();
        prop_assert_eq!(Tree::parse(&s).unwrap(), tree);
        prop_assert_eq!(Tree::parse(&s).unwrap().serialize(), s);
    }

    #[test]
    fn graft_bookkeeping(rho in arb_tree(8), sigma in arb_tree(8), k in 1usize..20) {
        prop_assume!(!rho.is_leaf() && !sigma.is_leaf());
        let k = (k - 1) % rho.leaves() + 1;
        let g = rho.graft(k, &sigma).unwrap();
        prop_assert_eq!(g.leaves(), rho.leaves() + sigma.leaves() - 1);
        prop_assert_eq!(g.internal_edges().len(), rho.internal_edges().len() + sigma.internal_edges().len() + 1);
        prop_assert_eq!(Tree::parse(&g.serialize()).unwrap(), g);
    }

    #[test]
    fn degeneracy_keeps_trees_canonical(tree in arb_tree(12), k in 1usize..20) {
        prop_assume!(tree.leaves() >= 3);
        let k = (k - 1) % tree.leaves() + 1;
        let d = tree.degeneracy(k).unwrap();
        prop_assert_eq!(d.leaves(), tree.leaves() - 1);
        // parse rejects arity-one nodes, so a successful reparse certifies it
        prop_assert_eq!(Tree::parse(&d.serialize()).unwrap(), d);
    }

    #[test]
    fn canonicalize_is_idempotent_and_confluent(mt in arb_metric(12), seed in any::<u64>()) {
        let canon = mt.canonicalize();
        prop_assert!(canon.is_canonical());
        prop_assert_eq!(canon.canonicalize(), canon.clone());
        prop_assert_eq!(canon.leaves(), mt.leaves());
        // collapse the zero edges one at a time in a random order
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cur = mt.clone();
        loop {
            let zeros: Vec<EdgeId> = cur.lengths().iter().filter(|(_, l)| l.is_zero()).map(|(e, _)| e.clone()).collect();
            let Some(e) = zeros.choose(&mut rng) else { break };
            cur = cur.collapse_edge(e).unwrap();
        }
        prop_assert_eq!(cur, canon);
    }

    #[test]
    fn cut_then_graft_reassembles(mt in arb_metric(12), th in arb_length()) {
        let canon = mt.canonicalize();
        let cut = canon.cut(&th);
        prop_assert_eq!(cut.pieces.len(), canon.spine_at_least(&th).len() + 1);
        prop_assert_eq!(cut.cut_lengths.len() + 1, cut.pieces.len());
        prop_assert!(cut.cut_lengths.iter().all(|l| l >= &th));
        let leaves: usize = cut.pieces.iter().map(MetricTree::leaves).sum();
        prop_assert_eq!(leaves, canon.leaves() + cut.pieces.len() - 1);
        prop_assert_eq!(cut.reassemble(), canon);
    }

    #[test]
    fn spine_cut_separates_graft_factors(rho in arb_metric(6), sigma in arb_metric(6), extra in 0i64..5, th in 1i64..5) {
        let rho = rho.canonicalize();
        let sigma = sigma.canonicalize();
        prop_assume!(!rho.tree().is_leaf() && !sigma.tree().is_leaf());
        let threshold = Length::Finite(Rational::from_integer(BigInt::from(th)));
        let joint = Length::Finite(Rational::from_integer(BigInt::from(th + extra)));
        let g = rho.graft_metric(rho.leaves(), &sigma, joint.clone()).unwrap();
        let new_edge = EdgeId(rho.tree().leaf_path(rho.leaves()).unwrap());
        prop_assert!(g.spine_at_least(&threshold).contains(&new_edge));
        // the pieces up to the new edge rebuild rho, the rest rebuild sigma
        let cut = g.cut(&threshold);
        let idx = g.spine_at_least(&threshold).iter().position(|e| e == &new_edge).unwrap();
        let lower = CutResult { pieces: cut.pieces[..=idx].to_vec(), cut_lengths: cut.cut_lengths[..idx].to_vec() };
        let upper = CutResult { pieces: cut.pieces[idx + 1..].to_vec(), cut_lengths: cut.cut_lengths[idx + 1..].to_vec() };
        prop_assert_eq!(lower.reassemble(), rho);
        prop_assert_eq!(upper.reassemble(), sigma);
    }
}
