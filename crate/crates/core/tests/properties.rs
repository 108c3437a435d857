use proptest::prelude::*;

use rotforest::io::{decode_model, encode_model};
use rotforest::rotation::{random_rotation, rotate_points};
use rotforest::tree::c_factor;
use rotforest::{Algorithm, AnomalyScorer, ForestParams, Matrix, Model, RngStream};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-100.0f64..100.0, rows * cols)
        .prop_map(move |v| Matrix::from_vec(rows, cols, v).unwrap())
}

fn dataset() -> impl Strategy<Value = Matrix> {
    (2usize..120, 1usize..5).prop_flat_map(|(n, d)| matrix(n, d))
}

fn algorithm() -> impl Strategy<Value = Algorithm> {
    prop::sample::select(Algorithm::ALL.to_vec())
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotations_preserve_distances(
        (points, seed) in (2usize..30, 1usize..12)
            .prop_flat_map(|(n, d)| (matrix(n, d), any::<u64>()))
    ) {
        let q = random_rotation(&mut RngStream::new(seed, 3), points.cols());
        let rotated = rotate_points(&points, &q).unwrap();
        for i in 0..points.rows() {
            for j in i + 1..points.rows() {
                let before = distance(points.row(i), points.row(j));
                let after = distance(rotated.row(i), rotated.row(j));
                prop_assert!((before - after).abs() <= 1e-9 * before.max(1.0));
            }
        }
    }

    #[test]
    fn rotation_products_stay_rotations(d in 1usize..40, seed in any::<u64>()) {
        let rng = RngStream::new(seed, 3);
        let a = random_rotation(&mut rng.derive(0), d);
        let b = random_rotation(&mut rng.derive(1), d);
        let ab = a.compose(&b).unwrap();
        prop_assert!(ab.matrix().orthogonality_error() <= 1e-10);
    }

    #[test]
    fn scores_lie_in_unit_interval(
        points in dataset(),
        algorithm in algorithm(),
        seed in any::<u64>(),
    ) {
        let model = Model::fit(algorithm, &points, ForestParams::new(20, 64).with_seed(seed)).unwrap();
        for s in model.score_batch(&points).unwrap() {
            prop_assert!(s > 0.0 && s <= 1.0, "score {s}");
        }
    }

    #[test]
    fn path_lengths_respect_the_depth_bound(
        points in dataset(),
        algorithm in algorithm(),
        depth in 1usize..10,
        seed in any::<u64>(),
    ) {
        let params = ForestParams::new(10, 64).with_seed(seed).with_depth_limit(depth);
        let model = Model::fit(algorithm, &points, params).unwrap();
        let floor = (-(depth as f64 + c_factor(model.psi_effective()))
            / c_factor(model.psi_effective()))
            .exp2();
        for s in model.score_batch(&points).unwrap() {
            prop_assert!(s >= floor * (1.0 - 1e-12));
        }
    }

    #[test]
    fn fit_is_deterministic_and_round_trips(
        points in dataset(),
        algorithm in algorithm(),
        seed in any::<u64>(),
    ) {
        let params = ForestParams::new(8, 32).with_seed(seed);
        let model = Model::fit(algorithm, &points, params).unwrap();
        let again = Model::fit(algorithm, &points, params).unwrap();
        let bytes = encode_model(&model);
        prop_assert_eq!(&bytes, &encode_model(&again));
        let decoded = decode_model(&bytes).unwrap();
        prop_assert_eq!(encode_model(&decoded), bytes);
        let a = model.score_batch(&points).unwrap();
        let b = decoded.score_batch(&points).unwrap();
        prop_assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn truncated_models_are_rejected(
        points in dataset(),
        algorithm in algorithm(),
        cut in 0.0f64..1.0,
    ) {
        let bytes = encode_model(&Model::fit(algorithm, &points, ForestParams::new(4, 16)).unwrap());
        let len = (cut * bytes.len() as f64) as usize;
        prop_assert!(decode_model(&bytes[..len]).is_err());
    }
}
