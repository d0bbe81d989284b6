use stairlam_verify::*;

#[test]
fn slope_of_exact_power_law() {
    let xs: Vec<f64> = (1..20).map(|k| k as f64 * 3.0).collect();
    let ys: Vec<f64> = xs.iter().map(|x| 7.0 * x.powf(-2.5)).collect();
    assert!((loglog_slope(&xs, &ys) + 2.5).abs() < 1e-12);
}

#[test]
fn decreasing_tolerates_allowed_inversions() {
    assert!(decreasing(&[4.0, 3.0, 2.0], 0));
    assert!(!decreasing(&[4.0, 5.0, 2.0], 0));
    assert!(decreasing(&[4.0, 5.0, 2.0], 1));
}

#[test]
fn doubling_chain_doubles() {
    assert_eq!(doubling_chain(3, 4), vec![3, 6, 12, 24]);
}

#[test]
fn report_gates_and_csv() {
    let mut r = AsymptoticReport::new("q", (1, 8), 0.1);
    r.row("q", 1, 2, 0.05, 1.0, true);
    r.gate(0.05, true, "fine");
    assert!(r.pass);
    r.gate(0.3, false, "too large");
    assert!(!r.pass);
    assert_eq!(r.max_deviation, 0.3);
    assert_eq!(r.notes, vec!["too large".to_string()]);
    let mut buf = Vec::new();
    write_report_csv(&mut buf, &[r]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("quantity,i,l_or_q,deviation,fitted_constant,pass"));
    assert_eq!(text.lines().count(), 2);
}
