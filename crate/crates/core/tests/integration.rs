use hnormal::associahedra;
use hnormal::barhomology::{self, FiniteMonoid, GSet, Side};
use hnormal::charclass::{self, GeneratorFamily, SparsePoly};
use hnormal::exactlin::Coefficients;
use hnormal::normality::{self, CertificateStatus, Family, Grid, Ledger, VerdictKind};
use hnormal::trees::{enumerate_trees, Tree};

#[test]
fn associahedron_boundaries_square_to_zero() {
    for n in 2..=6 {
        let cx = associahedra::boundary(n).unwrap();
        assert!(cx.boundary_squares_vanish(), "K_{n}");
        assert_eq!(cx.cell_counts(), associahedra::f_vector(n).unwrap());
    }
}

#[test]
fn vertices_of_cubical_associahedron_are_all_trees() {
    // a 0-cell pins every internal edge, so there is one per tree
    for n in 2..=6 {
        let f = associahedra::f_vector(n).unwrap();
        assert_eq!(f[0], enumerate_trees(n, false).unwrap().len());
        assert_eq!(*f.last().unwrap(), enumerate_trees(n, true).unwrap().len());
    }
}

#[test]
fn bar_complex_with_free_right_end_is_contractible() {
    let g = FiniteMonoid::cyclic(4).unwrap();
    let bc = barhomology::build_bar(&g, &GSet::point(Side::Right, &g), &GSet::regular(Side::Left, &g), 4).unwrap();
    assert!(bc.boundary_squares_vanish());
    let h = barhomology::bar_homology(&bc, Coefficients::Integers);
    assert_eq!(h[0].rank, 1);
    for grp in &h[1..4] {
        assert_eq!((grp.rank, grp.torsion.len()), (0, 0));
    }
}

#[test]
fn trees_round_trip_through_text() {
    for t in enumerate_trees(6, false).unwrap() {
        assert_eq!(Tree::parse(&t.serialize()).unwrap(), t);
    }
}

#[test]
fn p1_is_additive_and_satisfies_cartan_on_products() {
    // P^1(xy) = P^1(x) y + x P^1(y)
    let p = 5;
    let fam = GeneratorFamily::chern(4).unwrap();
    let table = charclass::wu_table(p, fam).unwrap();
    let c2 = SparsePoly::generator(p, fam, 2).unwrap();
    let c3 = SparsePoly::generator(p, fam, 3).unwrap();
    let prod = c2.mul(&c3).unwrap();
    let lhs = charclass::p1_extend(&prod, &table).unwrap();
    let rhs = table[&2].mul(&c3).unwrap().add(&c2.mul(&table[&3]).unwrap()).unwrap();
    assert_eq!(lhs, rhs);
    let sum = c2.add(&c3).unwrap();
    assert_eq!(charclass::p1_extend(&sum, &table).unwrap(), table[&2].add(&table[&3]).unwrap());
}

#[test]
fn sweep_rows_agree_with_classify_and_certify() {
    let ledger = Ledger::shipped();
    let grid = Grid { family: Family::Su, m_max: 4, n_max: 5, k_max: 3, l_max: 3, p_max: 31 };
    let instances = grid.instances();
    let rows = normality::sweep_rows(&instances, &ledger);
    assert_eq!(rows.len(), instances.len());
    for (inst, row) in instances.iter().zip(&rows) {
        let v = normality::classify(inst, &ledger).unwrap();
        assert_eq!(row.verdict, v.verdict.to_string());
        match normality::certify(inst, &ledger) {
            Ok(c) => {
                assert_eq!(row.status, c.status.to_string());
                if c.status == CertificateStatus::Validated {
                    assert_eq!(v.verdict, VerdictKind::NotNormal, "{inst}");
                }
            }
            Err(_) => assert!(row.status.is_empty()),
        }
    }
}

#[test]
fn thresholds_dominate_windows_on_the_grid() {
    for family in [Family::Su, Family::SoOdd] {
        let grid = Grid { family, m_max: 7, n_max: 8, k_max: 4, l_max: 4, p_max: 3 };
        for inst in grid.instances() {
            let s = inst.skeleton();
            let w = normality::nonnormal_window(&s);
            assert!(w.hi < normality::normal_threshold(&s) as i64, "{inst}");
        }
    }
}
