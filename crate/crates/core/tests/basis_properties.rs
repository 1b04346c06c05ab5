use approx::assert_relative_eq;
use proptest::prelude::*;
use vergo::spatial::{reconstruct, target_coefficients, ModeIndex};
use vergo::{BasisSet, GaussianMixture, GridDensity, SearchSpace, TargetDistribution};

/// Midpoint-rule inner products of all basis pairs on an `n × n` grid.
fn gram(basis: &BasisSet, n: usize) -> Vec<f64> {
    let l = basis.space().lengths().to_vec();
    let k = basis.len();
    let cell = l[0] * l[1] / (n * n) as f64;
    let mut g = vec![0.0; k * k];
    for j in 0..n {
        for i in 0..n {
            let x = [(i as f64 + 0.5) * l[0] / n as f64, (j as f64 + 0.5) * l[1] / n as f64];
            let f = basis.eval_all(&x);
            for a in 0..k {
                for b in a..k {
                    g[a * k + b] += f[a] * f[b] * cell;
                }
            }
        }
    }
    g
}

#[test]
fn basis_is_orthonormal_on_unit_square() {
    let basis = BasisSet::new(SearchSpace::unit_square(), 8).unwrap();
    let k = basis.len();
    let g = gram(&basis, 128);
    for a in 0..k {
        assert!((g[a * k + a] - 1.0).abs() <= 1e-3, "norm of mode {a}: {}", g[a * k + a]);
        for b in a + 1..k {
            assert!(g[a * k + b].abs() <= 1e-3, "modes {a},{b}: {}", g[a * k + b]);
        }
    }
}

#[test]
fn basis_is_orthonormal_on_rectangle() {
    let basis = BasisSet::new(SearchSpace::new(vec![2.0, 0.5]).unwrap(), 5).unwrap();
    let k = basis.len();
    let g = gram(&basis, 100);
    for a in 0..k {
        assert!((g[a * k + a] - 1.0).abs() <= 1e-3);
        for b in a + 1..k {
            assert!(g[a * k + b].abs() <= 1e-3);
        }
    }
}

#[test]
fn sobolev_weights_follow_dimension() {
    let b2 = BasisSet::new(SearchSpace::unit_square(), 3).unwrap();
    for (k, &w) in b2.indices().iter().zip(b2.weights()) {
        assert_relative_eq!(w, (1.0 + k.norm_squared() as f64).powf(-1.5), max_relative = 1e-15);
    }
    let b3 = BasisSet::new(SearchSpace::new(vec![1.0, 1.0, 1.0]).unwrap(), 3).unwrap();
    assert_eq!(b3.len(), 27);
    let pos = b3.position(&ModeIndex(vec![1, 1, 0])).unwrap();
    assert_relative_eq!(b3.weights()[pos], 3f64.powf(-2.0), max_relative = 1e-15);
}

#[test]
fn indices_are_lexicographic() {
    let basis = BasisSet::new(SearchSpace::unit_square(), 3).unwrap();
    let got: Vec<Vec<usize>> = basis.indices().iter().map(|k| k.0.clone()).collect();
    let mut expected = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            expected.push(vec![a, b]);
        }
    }
    assert_eq!(got, expected);
}

#[test]
fn target_coefficients_reconstruct_a_smooth_density() {
    let space = SearchSpace::unit_square();
    let basis = BasisSet::new(space.clone(), 10).unwrap();
    let q = GaussianMixture::new(
        vec![0.6, 0.4],
        vec![vec![0.3, 0.4], vec![0.7, 0.6]],
        vec![
            nalgebra::DMatrix::from_diagonal_element(2, 2, 0.02),
            nalgebra::DMatrix::from_row_slice(2, 2, &[0.03, 0.01, 0.01, 0.02]),
        ],
    )
    .unwrap();
    let target = TargetDistribution::GaussianMixture(q);
    let phi = target_coefficients(&basis, &target, 256).unwrap();
    // φ_0 = ∫ q f_0 = mass / h_0 = 1 for a unit-area space
    assert_relative_eq!(phi.values()[0], 1.0, max_relative = 1e-9);
    let x = [0.45, 0.5];
    let rec = reconstruct(&basis, &phi, &x);
    assert!((rec - target.density(&x)).abs() < 0.1 * target.density(&x), "{rec} vs {}", target.density(&x));
}

#[test]
fn grid_and_uniform_targets_agree_when_constant() {
    let space = SearchSpace::new(vec![2.0, 1.0]).unwrap();
    let basis = BasisSet::new(space.clone(), 4).unwrap();
    let flat = GridDensity::new(&space, vec![4, 2], vec![3.0; 8]).unwrap();
    let a = target_coefficients(&basis, &TargetDistribution::Grid(flat), 64).unwrap();
    let b = target_coefficients(&basis, &TargetDistribution::Grid(GridDensity::uniform(&space)), 64).unwrap();
    for (x, y) in a.values().iter().zip(b.values()) {
        assert_relative_eq!(x, y, epsilon = 1e-12);
    }
}

fn fd_grad(basis: &BasisSet, k: &ModeIndex, x: &[f64]) -> Vec<f64> {
    let h = 1e-6;
    (0..x.len())
        .map(|i| {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[i] += h;
            m[i] -= h;
            (basis.eval(k, &p).unwrap() - basis.eval(k, &m).unwrap()) / (2.0 * h)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gradient_matches_central_differences(x in 0.01f64..0.99, y in 0.01f64..0.99, k1 in 0usize..8, k2 in 0usize..8) {
        let basis = BasisSet::new(SearchSpace::unit_square(), 8).unwrap();
        let k = ModeIndex(vec![k1, k2]);
        let g = basis.eval_grad(&k, &[x, y]).unwrap();
        let fd = fd_grad(&basis, &k, &[x, y]);
        let scale = g.iter().chain(&fd).fold(1.0f64, |a, v| a.max(v.abs()));
        for (a, b) in g.iter().zip(&fd) {
            prop_assert!((a - b).abs() <= 1e-5 * scale, "{:?} vs {:?}", g, fd);
        }
    }

    #[test]
    fn bulk_evaluation_matches_single_modes(x in 0.0f64..1.5, y in 0.0f64..0.7) {
        let basis = BasisSet::new(SearchSpace::new(vec![1.5, 0.7]).unwrap(), 6).unwrap();
        let all = basis.eval_all(&[x, y]);
        for (m, k) in basis.indices().iter().enumerate() {
            prop_assert!((all[m] - basis.eval(k, &[x, y]).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn basis_values_are_bounded(x in -1.0f64..2.0, y in -1.0f64..2.0) {
        let basis = BasisSet::new(SearchSpace::unit_square(), 6).unwrap();
        for (v, h) in basis.eval_all(&[x, y]).iter().zip(basis.normalizers()) {
            prop_assert!(v.is_finite() && v.abs() <= 1.0 / h + 1e-12);
        }
    }
}
