use nalgebra::{Matrix4, SymmetricEigen};
use proptest::prelude::*;
use xy_discord::quadrature::QuadratureConfig;
use xy_discord::xstate::{discord_oracle, reduced_density_matrix, Branch, XState};
use xy_discord::ModelParams;

prop_compose! {
    fn valid_xstate()(
        w in prop::array::uniform3(1e-3f64..1.0),
        zs in -1.0f64..1.0,
        fs in -1.0f64..1.0,
    ) -> XState {
        let total: f64 = w.iter().sum();
        let (a, b, d) = (w[0] / total, 0.5 * w[1] / total, w[2] / total);
        XState::new(a, b, d, zs * b, fs * (a * d).sqrt()).unwrap()
    }
}

fn dense_eigenvalues(s: &XState) -> Vec<f64> {
    let m = s.to_matrix();
    let mat = Matrix4::from_fn(|i, j| m[i][j]);
    let mut ev: Vec<f64> = SymmetricEigen::new(mat).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

fn model_states() -> Vec<XState> {
    let q = QuadratureConfig::default();
    let mut out = Vec::new();
    for &lambda in &[0.0, 0.4, 0.7, 1.0, 1.3] {
        for &gamma in &[-1.0, -0.4, 0.0, 0.7, 1.0] {
            for &kt in &[0.0, 0.1, 1.0] {
                for r in [1, 2, 3] {
                    let p = ModelParams::thermal(lambda, gamma, kt).unwrap();
                    out.push(reduced_density_matrix(&p, r, &q).unwrap());
                }
            }
        }
    }
    out
}

proptest! {
    #[test]
    fn representation_round_trip(s in valid_xstate()) {
        let back = s.c_representation().x_representation().unwrap();
        for (x, y) in [(s.a, back.a), (s.b, back.b), (s.d, back.d), (s.z, back.z), (s.f, back.f)] {
            prop_assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn eigenvalues_match_dense_solver(s in valid_xstate()) {
        for (x, y) in s.eigenvalues().iter().zip(dense_eigenvalues(&s)) {
            prop_assert!((x - y.max(0.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn correlation_decomposition_is_nonnegative(s in valid_xstate()) {
        let i = s.mutual_information();
        let (q, _) = s.discord();
        let c = s.classical_correlations();
        prop_assert!(q >= -1e-12 && q <= i + 1e-12);
        prop_assert!(c >= -1e-12 && c <= i + 1e-12);
        prop_assert!((i - c - q).abs() < 1e-10);
    }

    #[test]
    fn swapping_c1_and_c2_changes_nothing(s in valid_xstate()) {
        let mut c = s.c_representation();
        std::mem::swap(&mut c.c1, &mut c.c2);
        let t = c.x_representation().unwrap();
        prop_assert!((s.mutual_information() - t.mutual_information()).abs() < 1e-12);
        prop_assert!((s.discord().0 - t.discord().0).abs() < 1e-12);
        prop_assert!((s.classical_correlations() - t.classical_correlations()).abs() < 1e-12);
        let (sa, sab) = s.entropies();
        let (ta, tab) = t.entropies();
        prop_assert!((sa - ta).abs() < 1e-12 && (sab - tab).abs() < 1e-12);
        for (x, y) in s.eigenvalues().iter().zip(t.eigenvalues()) {
            prop_assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn z_measurement_form_when_q1_wins(s in valid_xstate()) {
        if s.discord().1 == Branch::Q1 {
            prop_assert!((s.classical_correlations() - s.classical_correlations_z_measurement()).abs() < 1e-10);
        }
    }
}

#[test]
fn model_states_are_valid_density_matrices() {
    for s in model_states() {
        s.validate(1e-12).unwrap();
        assert!((s.a + 2.0 * s.b + s.d - 1.0).abs() < 1e-12);
        assert!(s.z.abs() <= s.b + 1e-12);
        assert!(s.f * s.f <= s.a * s.d + 1e-12);
        for (x, y) in s.eigenvalues().iter().zip(dense_eigenvalues(&s)) {
            assert!((x - y.max(0.0)).abs() < 1e-10);
        }
    }
}

#[test]
fn oracle_agrees_on_model_states() {
    for s in model_states().iter().step_by(7) {
        let oracle = discord_oracle(s, 32, 200).unwrap();
        assert!((oracle - s.discord().0).abs() < 1e-6, "{s:?}");
    }
}

#[test]
fn golden_matrix_nearest_neighbour() {
    let q = QuadratureConfig::default();
    let s = reduced_density_matrix(&ModelParams::ground(0.7, 0.7).unwrap(), 1, &q).unwrap();
    let got: Vec<Vec<f64>> = serde_json::from_str(&s.matrix_json()).unwrap();
    let want: Vec<Vec<f64>> =
        serde_json::from_str(include_str!("golden/state_l0.7_g0.7_r1.json")).unwrap();
    for (row_got, row_want) in got.iter().zip(&want) {
        for (x, y) in row_got.iter().zip(row_want) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
    }
}

#[test]
fn mutual_information_regression() {
    // dense-eigensolver entropies of the λ = γ = 0.7 nearest-neighbour state
    let q = QuadratureConfig::default();
    let s = reduced_density_matrix(&ModelParams::ground(0.7, 0.7).unwrap(), 1, &q).unwrap();
    let eta = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    let s_ab: f64 = dense_eigenvalues(&s).into_iter().map(eta).sum();
    let s_a = eta(s.a + s.b) + eta(s.b + s.d);
    let oracle = 2.0 * s_a - s_ab;
    assert!((s.mutual_information() - oracle).abs() < 1e-12);
    assert!((s.mutual_information() - 0.185_465_863_373).abs() < 1e-11);
}
