use proptest::prelude::*;

use paving_core::linalg::{
    apply_psp, compress_diagonal, compress_psp, jacobi_eigenvalues, materialize, operator_norm, operator_norm_with,
    random_projection, random_unit_vector, EigenMethod, SymmetricMatrix,
};
use paving_core::Symmetry;

fn signs_from_bits(n: usize, bits: u64) -> Symmetry {
    Symmetry::new((0..n).map(|i| if bits >> (i % 64) & 1 == 1 { 1 } else { -1 }).collect()).unwrap()
}

/// `p s p` built entrywise from the dense projection.
fn dense_psp(pm: &SymmetricMatrix, s: &Symmetry) -> SymmetricMatrix {
    let n = pm.dim();
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| pm.get(i, k) * s.sign(k) * pm.get(k, j)).sum())
                .collect()
        })
        .collect::<Vec<Vec<f64>>>();
    SymmetricMatrix::from_rows(&rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn compression_norm_matches_dense(n in 2usize..=40, r_frac in 0.0f64..1.0, seed: u64, bits: u64) {
        let rank = 1 + ((n - 1) as f64 * r_frac) as usize;
        let p = random_projection(n, rank, seed).unwrap();
        let s = signs_from_bits(n, bits);
        let compressed = operator_norm(&compress_psp(&p, &s).unwrap()).unwrap();
        let dense = operator_norm(&dense_psp(&materialize(&p), &s)).unwrap();
        prop_assert!((compressed - dense).abs() <= 1e-9, "{compressed} vs {dense}");
    }

    #[test]
    fn projection_is_idempotent(n in 1usize..=24, r_frac in 0.0f64..1.0, seed: u64) {
        let rank = 1 + ((n - 1) as f64 * r_frac) as usize;
        let pm = materialize(&random_projection(n, rank, seed).unwrap());
        let sq = SymmetricMatrix::from_rows(
            &(0..n).map(|i| pm.mul_vec(pm.row(i))).collect::<Vec<_>>(),
        ).unwrap();
        prop_assert!(sq.max_abs_diff(&pm) <= 1e-12);
        let trace: f64 = (0..n).map(|i| pm.get(i, i)).sum();
        prop_assert!((trace - rank as f64).abs() <= 1e-10);
    }

    #[test]
    fn norm_dominates_quadratic_form(n in 1usize..=30, seed: u64, bits: u64, vseed: u64) {
        let p = random_projection(n, n.div_ceil(2), seed).unwrap();
        let weights: Vec<f64> = (0..n).map(|i| if bits >> (i % 64) & 1 == 1 { 0.7 } else { -1.3 }).collect();
        let m = compress_diagonal(&p, &weights).unwrap();
        let x = random_unit_vector(m.dim(), vseed);
        let norm = operator_norm(&m).unwrap();
        prop_assert!(m.quadratic_form(x.as_slice()).abs() <= norm + 1e-12);
    }

    #[test]
    fn vector_image_bounded_by_operator_norm(n in 2usize..=30, seed: u64, bits: u64, vseed: u64) {
        let p = random_projection(n, n / 2, seed).unwrap();
        let s = signs_from_bits(n, bits);
        let v = random_unit_vector(n, vseed);
        let image = apply_psp(&p, &s, &v).unwrap().norm();
        prop_assert!(image <= operator_norm(&compress_psp(&p, &s).unwrap()).unwrap() + 1e-12);
    }

    #[test]
    fn jacobi_and_power_iteration_agree(n in 1usize..=20, seed: u64, bits: u64) {
        let p = random_projection(n + 3, n, seed).unwrap();
        let m = compress_psp(&p, &signs_from_bits(n + 3, bits)).unwrap();
        let a = operator_norm_with(&m, EigenMethod::Jacobi).unwrap();
        let b = operator_norm_with(&m, EigenMethod::PowerIteration).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * a.max(1.0), "{a} vs {b}");
        let eig = jacobi_eigenvalues(&m).unwrap();
        let trace: f64 = (0..m.dim()).map(|i| m.get(i, i)).sum();
        prop_assert!((eig.iter().sum::<f64>() - trace).abs() <= 1e-10);
    }
}
