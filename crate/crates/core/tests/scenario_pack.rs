use anomalous_core::pack;
use anomalous_core::pipeline::{run_pipeline, run_reduce, verify_report};
use anomalous_core::scenario::to_pretty_json;
use anomalous_core::thresholds::Case;

#[test]
fn bundled_files_load_and_pass() {
    let files = pack::scenario_files(&pack::bundled_dir()).unwrap();
    assert!(files.len() >= 5);
    let mut cases = Vec::new();
    for f in &files {
        let sc = pack::load_file(f).unwrap();
        let rep = run_pipeline(&sc).unwrap();
        assert!(rep.pass, "{}", sc.name());
        let v = verify_report(&sc, &to_pretty_json(&rep)).unwrap();
        assert!(v.pass, "{}", sc.name());
        assert!(run_reduce(&sc).unwrap().pass, "{}", sc.name());
        cases.extend(rep.witnesses.iter().filter_map(|w| w.classification.as_ref().map(|c| c.case)));
    }
    // the pack covers both threshold cases
    assert!(cases.contains(&Case::Small));
    assert!(cases.contains(&Case::Large));
}

#[test]
fn bundled_files_match_the_builder() {
    let built = pack::default_pack();
    let on_disk = pack::load_bundled().unwrap();
    assert_eq!(built.len(), on_disk.len());
    for sc in built {
        let found = on_disk.iter().find(|d| d.name() == sc.name()).unwrap();
        assert_eq!(found.data, sc.data);
    }
}
