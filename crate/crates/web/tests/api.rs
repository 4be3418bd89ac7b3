use serde_json::Value;
use siegert_core::Complex64;
use siegert_web::{domain_trajectory_json, spectrum_json, speed_profile_json};

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

#[test]
fn spectrum_lists_k1_its_partner_and_the_bound_state() {
    let v: Value = serde_json::from_str(&spectrum_json(1.0, 6.0, 3.0).unwrap()).unwrap();
    let roots = v["roots"].as_array().unwrap();
    let has = |re: f64, im: f64| {
        roots.iter().any(|r| {
            let k = r["k"].as_array().unwrap();
            (k[0].as_f64().unwrap() - re).abs() < 1e-5 && (k[1].as_f64().unwrap() - im).abs() < 1e-5
        })
    };
    assert!(has(2.356988, -1.909078));
    assert!(has(-2.356988, -1.909078));
    assert!(has(0.0, 0.673612));
    assert!(roots.iter().any(|r| r["class"] == "bound"));
}

#[test]
fn speed_profile_dips_below_zero_in_the_well() {
    let v: Value =
        serde_json::from_str(&speed_profile_json(1.0, one(), one(), 0.0, 8.0, 401).unwrap())
            .unwrap();
    let x = v["x"].as_array().unwrap();
    let vb = v["vbar"].as_array().unwrap();
    assert_eq!(x.len(), 401);
    assert!(x
        .iter()
        .zip(vb)
        .any(|(x, v)| x.as_f64().unwrap().abs() < 1.0 && v.as_f64().unwrap() < 0.0));
}

#[test]
fn trajectory_reports_both_edge_rules() {
    let v: Value =
        serde_json::from_str(&domain_trajectory_json(1.0, one(), one(), 0.5, 1e-3).unwrap())
            .unwrap();
    let two = &v["two_edge"];
    assert!(two["max_drift"].as_f64().unwrap() < 1e-6);
    assert_eq!(
        two["t"].as_array().unwrap().len(),
        two["l"].as_array().unwrap().len()
    );
    assert!(v["single_edge"]["max_drift"].as_f64().is_some());
}

#[test]
fn bad_input_is_an_error_not_a_panic() {
    assert!(spectrum_json(-1.0, 6.0, 3.0).is_err());
    assert!(spectrum_json(1.0, -1.0, 3.0).is_err());
}
