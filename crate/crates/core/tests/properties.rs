//! Property tests for the transform and duality invariants.

use proptest::prelude::*;

use mahlerlab_core::config::Tolerances;
use mahlerlab_core::extreal::ExtReal;
use mahlerlab_core::grid::{Axis, GridFunction};
use mahlerlab_core::legendre;
use mahlerlab_core::linalg::{self, Mat};
use mahlerlab_core::polytope::{Rep, SymmetricPolytope, VolumeMethod};

/// Convex 1D grid values from nonnegative curvature increments.
fn convex_grid(half: f64, slope0: f64, v0: f64, curv: Vec<f64>) -> GridFunction {
    let count = curv.len();
    let axis = Axis::symmetric(half, count).unwrap();
    let h = axis.step();
    let mut vals = Vec::with_capacity(count);
    let mut v = v0;
    let mut s = slope0;
    for c in curv {
        vals.push(ExtReal::finite(v));
        s += c * h;
        v += s * h;
    }
    GridFunction::new(vec![axis], vals).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The fast transform computes the same sup as the oracle.
    #[test]
    fn fast_transform_equals_oracle(
        half in 1.0f64..6.0,
        slope0 in -2.0f64..2.0,
        v0 in -1.0f64..1.0,
        curv in prop::collection::vec(0.0f64..2.0, 51..401),
        dual_half in 0.5f64..4.0,
    ) {
        let f = convex_grid(half, slope0, v0, curv);
        let dual = Axis::symmetric(dual_half, 257).unwrap();
        let fast = legendre::conjugate_fast_1d(&f, dual).unwrap();
        let oracle = legendre::conjugate_bruteforce(&f, &[dual]).unwrap();
        for flat in 0..fast.len() {
            let d = (fast.value(flat).unwrap_finite() - oracle.value(flat).unwrap_finite()).abs();
            prop_assert!(d <= 1e-12, "deviation {d}");
        }
    }

    /// Fenchel–Young holds on every sampled primal/dual node pair.
    #[test]
    fn fenchel_young_on_grids(
        slope0 in -2.0f64..2.0,
        curv in prop::collection::vec(0.0f64..2.0, 51..200),
    ) {
        let f = convex_grid(3.0, slope0, 0.0, curv);
        let dual = legendre::default_dual_axes(&f, 101).unwrap();
        let fstar = legendre::conjugate_nd(&f, &dual, &Tolerances::default()).unwrap();
        for i in (0..f.len()).step_by(7) {
            let x = f.coords(i)[0];
            let fx = f.value(i).unwrap_finite();
            for j in (0..fstar.len()).step_by(11) {
                let xi = fstar.coords(j)[0];
                let fs = fstar.value(j).unwrap_finite();
                prop_assert!(fx + fs >= x * xi - 1e-9);
            }
        }
    }

    /// Pointwise order reversal: f ≤ g implies f* ≥ g*, exactly.
    #[test]
    fn order_reversal(
        curv in prop::collection::vec(0.0f64..2.0, 51..200),
        bumps in prop::collection::vec(0.0f64..1.0, 51..200),
    ) {
        let count = curv.len().min(bumps.len());
        let f = convex_grid(3.0, 0.4, -0.5, curv[..count].to_vec());
        let g = GridFunction::new(
            f.axes().to_vec(),
            f.values()
                .iter()
                .zip(&bumps[..count])
                .map(|(v, b)| *v + *b)
                .collect(),
        )
        .unwrap();
        let dual = vec![Axis::symmetric(2.5, 101).unwrap()];
        let fc = legendre::conjugate_bruteforce(&f, &dual).unwrap();
        let gc = legendre::conjugate_bruteforce(&g, &dual).unwrap();
        for flat in 0..fc.len() {
            prop_assert!(fc.value(flat).unwrap_finite() >= gc.value(flat).unwrap_finite());
        }
    }

    /// Even input on a symmetric grid conjugates to an exactly even output.
    #[test]
    fn evenness_is_exact(
        coeff in 0.2f64..2.0,
        power in 1.1f64..3.0,
        nodes in 51usize..301,
    ) {
        let axis = Axis::symmetric(2.0, nodes).unwrap();
        let f = GridFunction::from_fn(vec![axis], |x| {
            ExtReal::finite(coeff * x[0].abs().powf(power))
        })
        .unwrap();
        let dual = Axis::symmetric(3.0, 127).unwrap();
        let fc = legendre::conjugate_fast_1d(&f, dual).unwrap();
        prop_assert!(fc.is_even());
    }

    /// Volume scales by |det T| and the volume product is invariant.
    #[test]
    fn polytope_linear_invariance(
        seed in 0u64..500,
        t00 in 0.5f64..2.0,
        t01 in -0.5f64..0.5,
        t10 in -0.5f64..0.5,
        t11 in 0.5f64..2.0,
    ) {
        let t = Mat::from_rows(&[vec![t00, t01], vec![t10, t11]]);
        prop_assume!(linalg::det(&t).abs() > 0.05);
        let body = SymmetricPolytope::random(2, 4, Rep::Vertices, seed);
        let mapped = body.apply_linear(&t).unwrap();
        let v0 = body.volume_exact().unwrap();
        let v1 = mapped.volume_exact().unwrap();
        prop_assert!((v1 - linalg::det(&t).abs() * v0).abs() <= 1e-8 * v1.max(1.0));
        let tol = Tolerances::default();
        let m0 = body.mahler(&VolumeMethod::Exact, &tol).unwrap().product;
        let m1 = mapped.mahler(&VolumeMethod::Exact, &tol).unwrap().product;
        prop_assert!((m1 - m0).abs() <= 1e-6 * m0);
    }

    /// Every random symmetric polytope satisfies the dimension-free bound.
    #[test]
    fn mahler_bound_holds(seed in 0u64..2000, n in 1usize..4, pairs in 3usize..7) {
        let body = SymmetricPolytope::random(n, pairs, Rep::Halfspaces, seed);
        let tol = Tolerances::default();
        let m = body.mahler(&VolumeMethod::Exact, &tol).unwrap();
        prop_assert!(m.ratio_vs_pi >= 1.0 - 1e-9, "{:?}", m);
    }
}
