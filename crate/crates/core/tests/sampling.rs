mod common;

use common::factor;
use common::oracles::star_discrepancy_2d;
use mesbench::sampling::{grid_design, oat_design, saltelli_design, sobol_points, sobol_points_raw, DesignMeta, SamplingError};
use mesbench::scenario::{default_factors, recipes_to_json, Factor};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn assert_one_per_interval(pts: &[Vec<f64>], m: u32) {
    let n = 1usize << m;
    let mut hits = vec![0u32; n];
    for p in pts {
        assert!((0.0..1.0).contains(&p[0]));
        hits[(p[0] * n as f64).floor() as usize] += 1;
    }
    assert!(hits.iter().all(|&h| h == 1), "m = {m}: {hits:?}");
}

#[test]
fn first_dimension_fills_every_dyadic_interval_once() {
    for m in 0..=8u32 {
        let n = 1usize << m;
        // origin plus the next 2^m - 1 points
        let mut pts = sobol_points_raw(1, 1, 0).unwrap();
        pts.extend(sobol_points(1, n - 1, 0).unwrap());
        assert_one_per_interval(&pts, m);
        // every later aligned block of 2^m raw indices as well
        for block in 1..4u64 {
            let start = block * n as u64;
            assert_one_per_interval(&sobol_points(1, n, start - 1).unwrap(), m);
        }
    }
}

#[test]
fn empty_request() {
    assert!(sobol_points(3, 0, 0).unwrap().is_empty());
}

#[test]
fn dimension_errors() {
    assert!(matches!(sobol_points(0, 4, 0), Err(SamplingError::ZeroDimension)));
    assert!(matches!(sobol_points(100_000, 4, 0), Err(SamplingError::DimensionTooLarge { .. })));
}

#[test]
fn origin_is_dropped() {
    let pts = sobol_points(4, 16, 0).unwrap();
    assert!(pts.iter().all(|p| p.iter().any(|&x| x != 0.0)));
    assert_eq!(pts[0], vec![0.5; 4]);
    // skip continues the same stream
    assert_eq!(sobol_points(4, 8, 8).unwrap(), pts[8..].to_vec());
}

#[test]
fn lower_discrepancy_than_pseudo_random() {
    let sobol: Vec<[f64; 2]> = sobol_points(2, 64, 0).unwrap().iter().map(|p| [p[0], p[1]]).collect();
    let d_sobol = star_discrepancy_2d(&sobol);
    let mut random: Vec<f64> = (0..20)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<[f64; 2]> = (0..64).map(|_| [rng.gen(), rng.gen()]).collect();
            star_discrepancy_2d(&pts)
        })
        .collect();
    random.sort_by(f64::total_cmp);
    let median = (random[9] + random[10]) / 2.0;
    assert!(d_sobol < median, "sobol {d_sobol} vs random median {median}");
}

#[test]
fn discrepancy_oracle_sanity() {
    // a single point at the centre: the box [0, 0.5]² holds it with volume 1/4
    let d = star_discrepancy_2d(&[[0.5, 0.5]]);
    assert!((d - 0.75).abs() < 1e-12, "{d}");
}

fn three() -> Vec<Factor> {
    vec![factor("a", 0.0, 0.5, 1.0), factor("b", -2.0, 0.0, 2.0), factor("c", 10.0, 15.0, 20.0)]
}

#[test]
fn saltelli_sizes() {
    assert_eq!(saltelli_design(&three(), 1024, false, 0).unwrap().len(), 5120);
    assert_eq!(saltelli_design(&three(), 1024, true, 0).unwrap().len(), 8192);
}

#[test]
fn saltelli_single_factor_degeneracy() {
    let f = vec![factor("x", 0.0, 0.5, 1.0)];
    let d = saltelli_design(&f, 2, false, 0).unwrap();
    // A, B, AB_0 and nothing else: 2 · (1 + 2)
    assert_eq!(d.len(), 6);
    for row in 0..2 {
        assert_eq!(d.recipes[4 + row].get("x"), d.recipes[2 + row].get("x"));
    }
}

#[test]
fn saltelli_ab_blocks_differ_from_a_only_in_their_column() {
    let fs = three();
    let n = 64;
    let d = saltelli_design(&fs, n, true, 0).unwrap();
    let DesignMeta::Saltelli { blocks, .. } = &d.meta else { panic!() };
    let start = |label: &str| blocks.iter().find(|b| b.label == label).unwrap().start;
    for (i, fi) in fs.iter().enumerate() {
        let ab = start(&format!("AB_{i}"));
        let ba = start(&format!("BA_{i}"));
        for row in 0..n {
            let a = &d.recipes[row];
            let b = &d.recipes[n + row];
            for fj in &fs {
                let want = if fj.name == fi.name { b.get(&fj.name) } else { a.get(&fj.name) };
                assert_eq!(d.recipes[ab + row].get(&fj.name), want);
                let want = if fj.name == fi.name { a.get(&fj.name) } else { b.get(&fj.name) };
                assert_eq!(d.recipes[ba + row].get(&fj.name), want);
            }
        }
    }
}

#[test]
fn saltelli_needs_factors() {
    assert!(matches!(saltelli_design(&[], 8, false, 0), Err(SamplingError::NoFactors)));
}

#[test]
fn grid_diameter_axis() {
    let d = grid_design(&default_factors(), &["hwt_inner_diameter"], 8).unwrap();
    let values: Vec<f64> = d.recipes.iter().map(|r| r.get("hwt_inner_diameter").unwrap()).collect();
    assert_eq!(values, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
    // everything else at base
    for r in &d.recipes {
        assert_eq!(r.get("pv_scaling"), Some(1.0));
        assert_eq!(r.get("hp_power"), Some(100.0));
    }
}

#[test]
fn grid_two_axes_row_major() {
    let d = grid_design(&three(), &["a", "c"], 5).unwrap();
    assert_eq!(d.len(), 25);
    let a = [0.0, 0.25, 0.5, 0.75, 1.0];
    let c = [10.0, 12.5, 15.0, 17.5, 20.0];
    for (k, r) in d.recipes.iter().enumerate() {
        assert_eq!(r.get("a"), Some(a[k / 5]));
        assert_eq!(r.get("c"), Some(c[k % 5]));
        assert_eq!(r.get("b"), Some(0.0));
    }
}

#[test]
fn grid_errors() {
    assert!(matches!(grid_design(&three(), &["a"], 1), Err(SamplingError::TooFewPoints(1))));
    assert!(matches!(grid_design(&three(), &[], 4), Err(SamplingError::AxisCount(0))));
    assert!(matches!(grid_design(&three(), &["a", "b", "c"], 4), Err(SamplingError::AxisCount(3))));
    assert!(matches!(grid_design(&three(), &["zz"], 4), Err(SamplingError::UnknownAxis(_))));
}

#[test]
fn oat_seven_factors() {
    let d = oat_design(&default_factors()).unwrap();
    assert_eq!(d.len(), 15);
    let DesignMeta::Oat { triples } = &d.meta else { panic!() };
    assert_eq!(triples.len(), 7);
    for (t, f) in triples.iter().zip(default_factors()) {
        assert_eq!(d.recipes[t.min_run as usize].get(&f.name), Some(f.min));
        assert_eq!(d.recipes[t.max_run as usize].get(&f.name), Some(f.max));
        assert_eq!(d.recipes[t.base_run as usize].get(&f.name), Some(f.base));
    }
}

#[test]
fn oat_single_factor() {
    let d = oat_design(&[factor("f", 0.0, 1.0, 2.0)]).unwrap();
    let v: Vec<f64> = d.recipes.iter().map(|r| r.get("f").unwrap()).collect();
    assert_eq!(v, vec![1.0, 0.0, 2.0]);
}

#[test]
fn oat_needs_factors() {
    assert!(matches!(oat_design(&[]), Err(SamplingError::NoFactors)));
}

#[test]
fn designs_are_deterministic() {
    let a = recipes_to_json(&saltelli_design(&three(), 128, true, 3).unwrap().recipes).unwrap();
    let b = recipes_to_json(&saltelli_design(&three(), 128, true, 3).unwrap().recipes).unwrap();
    assert_eq!(a, b);
    let a = recipes_to_json(&grid_design(&three(), &["b", "a"], 6).unwrap().recipes).unwrap();
    let b = recipes_to_json(&grid_design(&three(), &["b", "a"], 6).unwrap().recipes).unwrap();
    assert_eq!(a, b);
}

fn arb_factors() -> impl Strategy<Value = Vec<Factor>> {
    prop::collection::vec((-1e3f64..1e3, 1e-6f64..1e3, 0.0f64..=1.0), 1..5).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (min, width, t))| {
                let max = min + width;
                factor(&format!("f{i}"), min, min + t * width, max)
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_values_respect_bounds(fs in arb_factors(), logn in 0u32..7, points in 2usize..9) {
        let n = 1usize << logn;
        let designs = [
            oat_design(&fs).unwrap(),
            saltelli_design(&fs, n, true, 0).unwrap(),
            grid_design(&fs, &[fs[0].name.as_str()], points).unwrap(),
        ];
        for d in &designs {
            d.validate().unwrap();
            for r in &d.recipes {
                for f in &fs {
                    let v = r.get(&f.name).unwrap();
                    prop_assert!(v >= f.min && v <= f.max, "{} = {v} outside [{}, {}]", f.name, f.min, f.max);
                }
            }
        }
    }
}
