use std::io::Write;

fn run(id: u8) {
    let v = hamsim_repro::criterion(id).expect("known criterion");
    // Straight to stdout so the verdict shows whether or not the test passes.
    std::io::stdout().write_all(format!("{v}\n").as_bytes()).unwrap();
    assert!(v.pass, "{v}");
}

#[test]
fn criterion_01_worked_example() {
    run(1);
}

#[test]
fn criterion_02_single_flip_rates() {
    run(2);
}

#[test]
fn criterion_03_longest_code_multi_flip() {
    run(3);
}

#[test]
fn criterion_04_short_code_quad_flips() {
    run(4);
}

#[test]
fn criterion_05_cross_layout_means() {
    run(5);
}

#[test]
fn criterion_06_orderings() {
    run(6);
}

#[test]
fn criterion_07_redundancy_table() {
    run(7);
}

#[test]
fn criterion_08_reliability_model() {
    run(8);
}

#[test]
fn criterion_09_decoder_oracle() {
    run(9);
}

#[test]
fn criterion_10_job_count_determinism() {
    run(10);
}
