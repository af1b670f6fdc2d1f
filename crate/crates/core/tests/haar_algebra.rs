//! Exact identities of the dyadic Haar system, checked against pointwise
//! evaluation at cell centres.

use disclab_core::dyadic::{product_rule, DyadicInterval, DyadicRectangle, ProductRule, ShapeVector};
use disclab_core::grid::{GridBudget, GridFunction};
use disclab_core::hyperbolic::{count_rectangles, lp_norm, square_function, HaarExpansion, HaarSeries, RFunction};
use proptest::prelude::*;

/// Values of `f` at the centres of the uniform grid with `levels` per axis.
fn sample(levels: &[u32], f: impl Fn(&[f64]) -> f64) -> GridFunction {
    let total: u32 = levels.iter().sum();
    let values = (0..1usize << total)
        .map(|flat| {
            let mut rest = flat;
            let mut x = vec![0.0; levels.len()];
            for j in (0..levels.len()).rev() {
                let c = rest & ((1 << levels[j]) - 1);
                rest >>= levels[j];
                x[j] = (c as f64 + 0.5) / (1u64 << levels[j]) as f64;
            }
            f(&x)
        })
        .collect();
    GridFunction::new(levels.to_vec(), values).unwrap()
}

fn rect_strategy(d: usize, max_level: u32) -> impl Strategy<Value = DyadicRectangle> {
    prop::collection::vec((0..=max_level).prop_flat_map(|l| (Just(l), 0..(1u64 << l))), d)
        .prop_map(|pairs| DyadicRectangle::from_pairs(&pairs).unwrap())
}

/// Two rectangles of the same order `n` in the plane.
fn planar_pair(n: u32) -> impl Strategy<Value = (DyadicRectangle, DyadicRectangle)> {
    let one = (0..=n).prop_flat_map(move |j| {
        (0..(1u64 << j), 0..(1u64 << (n - j)))
            .prop_map(move |(a, b)| DyadicRectangle::from_pairs(&[(j, a), (n - j, b)]).unwrap())
    });
    (one.clone(), one)
}

fn haar(r: &DyadicRectangle) -> impl Fn(&[f64]) -> f64 + '_ {
    move |x| r.haar(x).unwrap() as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn haar_functions_are_orthogonal(
        (a, b) in (1usize..=3).prop_flat_map(|d| (rect_strategy(d, 3), rect_strategy(d, 3)))
    ) {
        let levels = vec![4; a.dim()];
        let ga = sample(&levels, haar(&a));
        let gb = sample(&levels, haar(&b));
        let ip = ga.inner(&gb).unwrap();
        let expected = if a == b { a.volume() } else { 0.0 };
        prop_assert!((ip - expected).abs() < 1e-15, "⟨h_a,h_b⟩ = {ip}, expected {expected}");
    }

    #[test]
    fn planar_product_rule((a, b) in (0u32..=4).prop_flat_map(planar_pair)) {
        let levels = [5, 5];
        match product_rule(&a, &b) {
            ProductRule::Haar { sign, rect } => {
                prop_assert_ne!(&a, &b);
                prop_assert_eq!(Some(rect.clone()), a.intersect(&b));
                let lhs = sample(&levels, |x| (a.haar(x).unwrap() * b.haar(x).unwrap()) as f64);
                let rhs = sample(&levels, |x| (sign * rect.haar(x).unwrap()) as f64);
                prop_assert_eq!(lhs.values(), rhs.values());
            }
            ProductRule::NotApplicable => {
                prop_assert!(a == b || a.intersect(&b).is_none());
            }
        }
    }

    #[test]
    fn parseval_identity(
        (d, n, seed) in (1usize..=3, 0u32..=4, any::<u64>())
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut e = HaarExpansion::new(d, n).unwrap();
        let mut l2 = 0.0;
        for shape in ShapeVector::with_order(n, d) {
            let count = shape.count().unwrap() as usize;
            let coeffs: Vec<f64> = (0..count).map(|_| rng.random_range(-1.0..1.0)).collect();
            l2 += coeffs.iter().map(|a| a * a).sum::<f64>() * (-(n as f64)).exp2();
            e.set_shape(&shape, coeffs).unwrap();
        }
        let g = e.to_grid(GridBudget::default()).unwrap();
        let direct = lp_norm(&g, 2.0).unwrap().powi(2);
        prop_assert!((direct - l2).abs() <= 1e-12 * l2.max(1.0));
        prop_assert!((e.parseval_l2().powi(2) - l2).abs() <= 1e-12 * l2.max(1.0));
    }

    #[test]
    fn rectangle_count_matches_enumeration(n in 0u32..=10, d in 1usize..=4) {
        let enumerated: u64 = ShapeVector::with_order(n, d)
            .iter()
            .map(|s| s.rectangles().count() as u64)
            .sum();
        prop_assert_eq!(count_rectangles(n, d).unwrap(), enumerated);
    }

    #[test]
    fn full_rfunctions_have_unit_modulus(
        (shape, signs) in (1usize..=3).prop_flat_map(|d| prop::collection::vec(0u32..=3, d))
            .prop_flat_map(|entries| {
                let shape = ShapeVector::new(entries);
                let count = shape.count().unwrap() as usize;
                (Just(shape), prop::collection::vec(prop::bool::ANY, count))
            })
    ) {
        let signs: Vec<i8> = signs.into_iter().map(|b| if b { 1 } else { -1 }).collect();
        let f = RFunction::new(shape.clone(), signs).unwrap();
        prop_assert!(f.is_full());
        let levels: Vec<u32> = shape.entries().iter().map(|l| l + 1).collect();
        let g = f.to_grid(&levels, GridBudget::default()).unwrap();
        prop_assert!(g.values().iter().all(|v| v.abs() == 1.0));
    }

    #[test]
    fn rectangles_of_a_shape_partition_the_cube(entries in prop::collection::vec(0u32..=3, 1..=3)) {
        let shape = ShapeVector::new(entries);
        let levels: Vec<u32> = shape.entries().iter().map(|l| l + 1).collect();
        let rects: Vec<DyadicRectangle> = shape.rectangles().collect();
        let cover = sample(&levels, |x| rects.iter().filter(|r| r.contains(x)).count() as f64);
        prop_assert!(cover.values().iter().all(|&c| c == 1.0));
    }

    #[test]
    fn square_function_preserves_l2(coeffs in prop::collection::vec(-2.0f64..2.0, 1..=31)) {
        let mut s = HaarSeries::new(1).unwrap();
        let mut f = vec![0.0; 32];
        for (i, &a) in coeffs.iter().enumerate() {
            let level = (i + 1).ilog2();
            let interval = DyadicInterval::new(level, (i + 1 - (1 << level)) as u64).unwrap();
            s.insert_scalar(interval, a).unwrap();
            for (c, v) in f.iter_mut().enumerate() {
                *v += a * interval.haar((c as f64 + 0.5) / 32.0).unwrap() as f64;
            }
        }
        let sq = square_function(&s, GridBudget::default()).unwrap();
        let f = GridFunction::new(vec![5], f).unwrap();
        let (a, b) = (lp_norm(&sq, 2.0).unwrap(), lp_norm(&f, 2.0).unwrap());
        prop_assert!((a - b).abs() < 1e-12 * b.max(1.0));
    }
}

#[test]
fn product_rule_examples() {
    let a = DyadicRectangle::from_pairs(&[(1, 0), (0, 0)]).unwrap();
    let b = DyadicRectangle::from_pairs(&[(0, 0), (1, 0)]).unwrap();
    let ProductRule::Haar { rect, .. } = product_rule(&a, &b) else {
        panic!("expected a Haar product");
    };
    assert_eq!(rect, DyadicRectangle::from_pairs(&[(1, 0), (1, 0)]).unwrap());
    assert_eq!(product_rule(&a, &a), ProductRule::NotApplicable);
    let c = DyadicRectangle::from_pairs(&[(1, 1), (0, 0)]).unwrap();
    let d = DyadicRectangle::from_pairs(&[(1, 0), (0, 0)]).unwrap();
    assert_eq!(product_rule(&c, &d), ProductRule::NotApplicable);
}
