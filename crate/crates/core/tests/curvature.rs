use approx::assert_relative_eq;
use flagflow::curvature::Region;
use flagflow::{
    constraints, enumerate_triples, is_member, ric_scal_value, ricci_components, scalar_curvature, sec_ric_value,
    sectional_curvature, sectional_from_general_formula, BasisIndex, Block, CoefficientTriple, CrossCurvatures,
    Metric, Metric32, RegionSpec, Table,
};

fn m(x: f64, y: f64) -> Metric {
    Metric::new(x, y).unwrap()
}

#[test]
fn normal_metric_values() {
    let g = m(1.0 / 3.0, 1.0 / 3.0);
    let cross = CrossCurvatures::at(&g);
    for k in [cross.xy, cross.xz, cross.yz] {
        assert_relative_eq!(k, 3.0 / 16.0, max_relative = 1e-14);
    }
    let table = Table::at(&g);
    let (i, j) = (BasisIndex::new(1).unwrap(), BasisIndex::new(2).unwrap());
    assert_relative_eq!(table.k(i, j), 3.0, max_relative = 1e-14);
    assert!(ricci_components(&g).is_einstein(1e-12));
}

#[test]
fn kahler_einstein_metrics() {
    for g in [m(0.25, 0.25), m(0.25, 0.5), m(0.5, 0.25)] {
        assert!(ricci_components(&g).is_einstein(1e-12));
    }
    assert!(!ricci_components(&m(0.3, 0.2)).is_einstein(1e-6));
}

#[test]
fn swapping_weights_swaps_curvatures() {
    for (x, y) in [(0.1, 0.2), (0.45, 0.3), (0.05, 0.8)] {
        let a = CrossCurvatures::at(&m(x, y));
        let b = CrossCurvatures::at(&m(y, x));
        assert_relative_eq!(a.xy, b.xy, max_relative = 1e-13);
        assert_relative_eq!(a.xz, b.yz, max_relative = 1e-13);
        let (ra, rb) = (ricci_components(&m(x, y)), ricci_components(&m(y, x)));
        assert_relative_eq!(ra.r_x, rb.r_y, max_relative = 1e-13);
        assert_relative_eq!(ra.r_z, rb.r_z, max_relative = 1e-13);
    }
}

#[test]
fn closed_forms_agree_with_general_formula() {
    for (x, y) in [(0.2, 0.3), (0.6, 0.1), (0.01, 0.5), (0.33, 0.33)] {
        let g = m(x, y);
        for i in BasisIndex::all() {
            for j in BasisIndex::all().filter(|&j| j != i) {
                let closed = sectional_curvature(&g, i, j).unwrap();
                let general = sectional_from_general_formula(&g, i, j).unwrap();
                assert!((closed - general).abs() <= 1e-12 * closed.abs().max(1.0), "({x},{y}) K{i:?}{j:?}");
            }
        }
    }
}

#[test]
fn single_precision_matches_double() {
    let (x, y) = (0.27f32, 0.41f32);
    let single = CrossCurvatures::at(&Metric32::new(x, y).unwrap());
    let double = CrossCurvatures::at(&m(x as f64, y as f64));
    assert_relative_eq!(single.xy as f64, double.xy, max_relative = 1e-5);
    assert_relative_eq!(single.yz as f64, double.yz, max_relative = 1e-5);
}

#[test]
fn scalar_curvature_is_trace() {
    let g = m(0.2, 0.45);
    let r = ricci_components(&g);
    assert_relative_eq!(scalar_curvature(&g), 2.0 * (r.r_x + r.r_y + r.r_z), max_relative = 1e-15);
    let t = CoefficientTriple::new(2, 2, 2);
    assert_relative_eq!(ric_scal_value(&g, t).unwrap(), scalar_curvature(&g), max_relative = 1e-14);
}

#[test]
fn constraint_values_match_direct_sums() {
    let g = m(0.31, 0.22);
    for c in constraints(RegionSpec::sec_ric(4).unwrap()) {
        let direct = sec_ric_value(&g, c.block.unwrap(), c.triple).unwrap();
        assert!((c.eval(&g) - direct).abs() < 1e-12 * direct.abs().max(1.0));
    }
    for c in constraints(RegionSpec::ric_scal(4).unwrap()) {
        let direct = ric_scal_value(&g, c.triple).unwrap();
        assert!((c.eval(&g) - direct).abs() < 1e-12 * direct.abs().max(1.0));
    }
}

#[test]
fn triple_enumeration() {
    let ts = enumerate_triples(RegionSpec::sec_ric(5).unwrap());
    assert_eq!(ts, vec![CoefficientTriple::new(1, 2, 2)]);
    let ts = enumerate_triples(RegionSpec::ric_scal(3).unwrap());
    assert_eq!(ts.len(), 7);
    assert!(ts.windows(2).all(|w| w[0] > w[1]));
    assert!(sec_ric_value(&m(0.3, 0.3), Block::B12, CoefficientTriple::new(2, 0, 0)).is_err());
}

#[test]
fn membership_examples() {
    let u = m(1.0 / 3.0, 1.0 / 3.0);
    for d in 1..=5 {
        assert!(is_member(&u, RegionSpec::sec_ric(d).unwrap()).is_member());
    }
    for d in 1..=6 {
        assert!(is_member(&u, RegionSpec::ric_scal(d).unwrap()).is_member());
    }
    // near a corner the small weight blows up the negative cross term
    assert!(!Region::new(RegionSpec::sec_ric(1).unwrap()).contains(&m(0.05, 0.05)));
    // a point just inside the central triangle off the medians
    let off = m(0.3, 0.36);
    assert!(is_member(&off, RegionSpec::sec_ric(4).unwrap()).is_member());
}
