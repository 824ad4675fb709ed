use clifford_ins::lie::{skew, so3_exp, vee, Rot3, SE23, SEk3};
use clifford_ins::verify::series_expm;
use clifford_ins::{Quat, SE23d};
use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;

fn vec3(r: f64) -> impl Strategy<Value = Vector3<f64>> {
    prop::array::uniform3(-r..r).prop_map(Vector3::from)
}

proptest! {
    #[test]
    fn so3_exp_matches_series(th in vec3(2.0)) {
        prop_assert!((so3_exp(&th) - series_expm(&skew(&th))).amax() < 1e-12);
        prop_assert!((vee(&skew(&th)) - th).norm() == 0.0);
    }

    #[test]
    fn rotation_group_agrees_with_quaternions(a in vec3(1.5), b in vec3(1.5), x in vec3(5.0)) {
        let (ra, rb) = (Rot3::exp(&a), Rot3::exp(&b));
        let q = Quat::exp(&a) * Quat::exp(&b);
        prop_assert!(((ra * rb).matrix() - q.to_dcm()).amax() < 1e-12);
        prop_assert!(((ra * rb) * x - q.rotate(&x)).norm() < 1e-10);
        prop_assert!(((ra * ra.inverse()).matrix() - Matrix3::identity()).amax() < 1e-12);
        prop_assert!((ra.to_quaternion().to_dcm() - ra.matrix()).amax() < 1e-12);
    }

    #[test]
    fn se23_exp_matches_series(th in vec3(2.0), nu in vec3(10.0), rho in vec3(10.0)) {
        let g = SE23d::exp(&th, &nu, &rho);
        prop_assert!((g.matrix() - series_expm(&SE23::hat(&th, &nu, &rho))).amax() < 1e-9);
        let id = g * g.inverse();
        prop_assert!((id.matrix() - SE23d::identity().matrix()).amax() < 1e-10);
    }

    #[test]
    fn sek3_inverse_and_columns(th in vec3(2.0), c in prop::array::uniform5(vec3(10.0))) {
        let r = so3_exp(&th);
        let g = SEk3::from_columns(&r, &c);
        prop_assert!((g.rotation() - r).amax() == 0.0);
        for (k, v) in c.iter().enumerate() {
            prop_assert_eq!(g.column(k), *v);
        }
        let id = g * g.inverse();
        prop_assert!((id.matrix() - SEk3::identity().matrix()).amax() < 1e-10);
    }
}
