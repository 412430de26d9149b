mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssr_core::subspace::DEFAULT_RANK_TOLERANCE;
use ssr_core::*;

fn basis(points: &[Point2]) -> SubspaceBasis {
    shape_subspace_basis(&ShapeMatrix::from_planar(points).unwrap(), DEFAULT_RANK_TOLERANCE).unwrap()
}

fn columns(b: &SubspaceBasis) -> Vec<Vec<f64>> {
    (0..b.effective_dim())
        .map(|c| b.vectors().column(c).iter().copied().collect())
        .collect()
}

#[test]
fn centring_zeroes_column_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rows: Vec<[f64; 3]> = (0..8)
        .map(|_| [rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0)])
        .collect();
    let c = center_shape_matrix(&ShapeMatrix::new(rows).unwrap());
    for col in 0..3 {
        let s: f64 = c.rows().iter().map(|r| r[col]).sum();
        assert!(s.abs() < 1e-12, "column {col} sums to {s}");
    }
}

#[test]
fn full_rank_basis_matches_eigen_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let rows: Vec<[f64; 3]> = (0..8)
            .map(|_| [rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)])
            .collect();
        let m = ShapeMatrix::new(rows.clone()).unwrap();
        let b = shape_subspace_basis(&m, DEFAULT_RANK_TOLERANCE).unwrap();
        assert_eq!(b.effective_dim(), 3);

        let mean: Vec<f64> = (0..3).map(|c| rows.iter().map(|r| r[c]).sum::<f64>() / 8.0).collect();
        let x: Mat = rows.iter().map(|r| (0..3).map(|c| r[c] - mean[c]).collect()).collect();
        let oracle = oracle_basis(&x, DEFAULT_RANK_TOLERANCE).unwrap();
        for (i, o) in oracle.iter().enumerate() {
            let v = b.vectors().column(i);
            let sign = if v.dot(&nalgebra::DVector::from_vec(o.clone())) < 0.0 { -1.0 } else { 1.0 };
            let dev = v.iter().zip(o).map(|(a, b)| (a - sign * b).abs()).fold(0.0, f64::max);
            assert!(dev < 1e-9, "vector {i} deviates by {dev}");
        }
        let sv = b.singular_values();
        assert!(sv.windows(2).all(|w| w[0] >= w[1]) && sv.iter().all(|s| *s >= 0.0));
    }
}

#[test]
fn orthogonal_subspaces_score_zero() {
    // K=4, collinear configurations on orthogonal directions
    let a = [(1., 0.), (-1., 0.), (0., 0.), (0., 0.)].map(Point2::from);
    let b = [(0., 0.), (0., 0.), (1., 0.), (-1., 0.)].map(Point2::from);
    let (ba, bb) = (basis(&a), basis(&b));
    assert_eq!((ba.effective_dim(), bb.effective_dim()), (1, 1));
    assert!(subspace_similarity(&ba, &bb).unwrap().abs() < 1e-9);
    assert!(projection_trace_similarity(&columns(&ba), &columns(&bb)).abs() < 1e-9);

    // K=5, two planar (rank-2) configurations with orthogonal centred spans
    let a = [(1., 0.), (-1., 0.), (0., 1.), (0., -1.), (0., 0.)].map(Point2::from);
    let b = [(1., 1.), (1., 1.), (1., -1.), (1., -1.), (-4., 0.)].map(Point2::from);
    let (ba, bb) = (basis(&a), basis(&b));
    assert_eq!((ba.effective_dim(), bb.effective_dim()), (2, 2));
    assert!(subspace_similarity(&ba, &bb).unwrap().abs() < 1e-9);
    assert!(projection_trace_similarity(&columns(&ba), &columns(&bb)).abs() < 1e-9);
}

#[test]
fn mean_similarity_matches_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(67);
    let test = basis(&random_points(&mut rng, 8, 100.0));
    let bank: Vec<SubspaceBasis> = (0..67).map(|_| basis(&random_points(&mut rng, 8, 100.0))).collect();
    let mut direct = 0.0;
    for b in &bank {
        direct += subspace_similarity(&test, b).unwrap();
    }
    direct /= 67.0;
    assert!((mean_similarity(&test, &bank).unwrap() - direct).abs() < 1e-12);
    let one = mean_similarity(&test, &bank[..1]).unwrap();
    assert_eq!(one, subspace_similarity(&test, &bank[0]).unwrap());
}

#[test]
fn non_rigid_perturbation_lowers_similarity() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..200 {
        let pts = random_points(&mut rng, 8, 100.0);
        let diameter = pts
            .iter()
            .flat_map(|a| pts.iter().map(move |b| a.distance(b)))
            .fold(0.0, f64::max);
        let mut moved = pts.clone();
        let i = rng.random_range(0..8);
        let ang: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let r = diameter * rng.random_range(0.05..0.3);
        moved[i].x += r * ang.cos();
        moved[i].y += r * ang.sin();
        let s = subspace_similarity(&basis(&pts), &basis(&moved)).unwrap();
        assert!(s < 1.0 - 1e-9, "similarity {s} not reduced");
    }
}

proptest! {
    #[test]
    fn affine_invariance(seed in any::<u64>(), k in 3usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = random_points(&mut rng, k, 100.0);
        let map = random_affine(&mut rng);
        let mapped: Vec<Point2> = pts.iter().map(|&p| map(p)).collect();
        let s = subspace_similarity(&basis(&pts), &basis(&mapped)).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-9, "similarity {}", s);
    }

    #[test]
    fn symmetric_and_bounded(seed in any::<u64>(), k in 3usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = basis(&random_points(&mut rng, k, 50.0));
        let b = basis(&random_points(&mut rng, k, 50.0));
        let (ab, ba) = (subspace_similarity(&a, &b).unwrap(), subspace_similarity(&b, &a).unwrap());
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
    }

    #[test]
    fn cross_gram_equals_projection_trace(seed in any::<u64>(), k in 3usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = basis(&random_points(&mut rng, k, 50.0));
        let b = basis(&random_points(&mut rng, k, 50.0));
        let direct = subspace_similarity(&a, &b).unwrap();
        let trace = projection_trace_similarity(&columns(&a), &columns(&b));
        prop_assert!((direct - trace).abs() < 1e-10);
    }

    #[test]
    fn basis_columns_orthonormal(seed in any::<u64>(), k in 3usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = basis(&random_points(&mut rng, k, 1e3));
        let gram = b.vectors().tr_mul(b.vectors());
        let n = b.effective_dim();
        prop_assert!((1..=2).contains(&n));
        prop_assert!((gram - nalgebra::DMatrix::<f64>::identity(n, n)).abs().max() < 1e-10);
    }
}
