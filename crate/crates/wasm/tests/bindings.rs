use nudgem_wasm::{mean_curve, tail_curve, window_curve};
use serde_json::Value;

fn parse(text: Result<String, String>) -> Value {
    serde_json::from_str(&text.expect("call succeeds")).unwrap()
}

fn column(v: &Value, name: &str) -> Vec<f64> {
    let i = v["columns"].as_array().unwrap().iter().position(|c| c == name).unwrap();
    v["data"][i].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn window_curve_peaks_at_the_reported_optimum() {
    let v = parse(window_curve(2.0 / 3.0, 4.0, 0.7, 1.0, 20));
    assert_eq!(v["m_opt"], 5);
    let atir: Vec<f64> = v["atir"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(atir.len(), 21);
    assert_eq!(atir[0], 0.0);
    let best = (0..atir.len()).max_by(|&a, &b| atir[a].total_cmp(&atir[b])).unwrap();
    assert_eq!(best, 5);
}

#[test]
fn tail_curve_uses_the_optimal_window_by_default() {
    let v = parse(tail_curve(2.0 / 3.0, 4.0, 0.7, 1.0, None, 20.0, 41));
    assert_eq!(v["m"], 5);
    let (t, r1, tir) = (column(&v, "t"), column(&v, "r1"), column(&v, "tir"));
    assert_eq!(t.len(), 41);
    assert!((t[40] - 20.0).abs() < 1e-12);
    assert!((r1[0] - 1.0).abs() < 1e-12);
    assert!(tir[0].abs() < 1e-12);
    assert!(r1.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn mean_curve_with_equal_sizes_is_mm1() {
    let v = parse(mean_curve(0.5, 1.0, 1.0, Some(3), 0.1, 0.9, 5));
    for (l, f) in column(&v, "lambda").iter().zip(column(&v, "mean_fcfs")) {
        assert!((f - 1.0 / (1.0 - l)).abs() < 1e-10);
    }
    assert!(column(&v, "mtir_nudge").iter().all(|x| x.abs() < 1e-10));
}

#[test]
fn bad_inputs_are_messages() {
    assert!(window_curve(2.0 / 3.0, 4.0, 1.2, 1.0, 20).unwrap_err().contains("unstable"));
    assert!(window_curve(2.0 / 3.0, 4.0, 0.7, 1.0, 1000).is_err());
    assert!(tail_curve(2.0 / 3.0, 4.0, 0.7, 1.0, Some(11), 20.0, 41).unwrap_err().contains("limit"));
    assert!(tail_curve(2.0 / 3.0, 4.0, 0.7, 1.0, None, 20.0, 1).is_err());
    assert!(mean_curve(2.0 / 3.0, 4.0, -1.0, None, 0.1, 0.9, 5).unwrap_err().contains("SCV"));
    assert!(mean_curve(2.0 / 3.0, 4.0, 1.0, None, 0.9, 0.1, 5).is_err());
}
