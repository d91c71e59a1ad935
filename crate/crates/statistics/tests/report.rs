use loggas_statistics::{StatReport, FINITE_N_CAVEAT};

#[test]
fn report_json_has_sorted_keys_and_round_trips() {
    let r = StatReport::new("ks", 0.03, 1200).param("n", 200).param("beta", 1.0).with_ci((0.0, 0.05)).with_seed(7);
    let text = r.to_json();
    let keys: Vec<usize> =
        ["CI", "caveat", "estimator", "params", "sample_size", "seed", "value"].iter().map(|k| text.find(&format!("\"{k}\"")).unwrap()).collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]), "{text}");
    assert!(text.find("\"beta\"").unwrap() < text.find("\"n\"").unwrap());
    let back: StatReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.caveat, FINITE_N_CAVEAT);
}
