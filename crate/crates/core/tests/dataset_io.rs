use std::collections::BTreeSet;

use proptest::prelude::*;
use rga_core::dataset::{dataset_stats, load_ternary, write_ternary, Delimiter, IdPolicy, LoadOptions};
use rga_core::TrustRecord;

fn canonical(records: &[TrustRecord]) -> Vec<TrustRecord> {
    let mut v = records.to_vec();
    v.sort_by_key(|r| (r.trustor, r.trustee));
    v
}

#[test]
fn write_then_load_preserving_ids() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("edges.tsv");
    let records = vec![
        TrustRecord::new(4, 1, 0.25),
        TrustRecord::new(0, 3, 1.0),
        TrustRecord::new(0, 2, 0.123456789012),
    ];
    write_ternary(&records, &path, Delimiter::default(), None).unwrap();
    let opts = LoadOptions { ids: IdPolicy::Preserve, ..LoadOptions::default() };
    let back = load_ternary(&path, &opts).unwrap();
    assert_eq!(back.records, canonical(&records));
    assert_eq!(back.m, 5);
}

#[test]
fn densified_ids_round_trip_through_raw_names() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("raw.csv");
    std::fs::write(&src, "# trustor,trustee,rating\nalice,bob,5\nbob,carol,3\ncarol,alice,4\nalice,carol,1\n").unwrap();
    let opts = LoadOptions { delimiter: Delimiter::Char(','), value_scale: 5.0, ..LoadOptions::default() };
    let first = load_ternary(&src, &opts).unwrap();
    assert_eq!(first.m, 3);
    assert_eq!(first.ids.dense("carol"), Some(2));

    let out = dir.path().join("out.csv");
    write_ternary(&first.records, &out, Delimiter::Char(','), Some(&first.ids)).unwrap();
    let second = load_ternary(&out, &LoadOptions { delimiter: Delimiter::Char(','), ..LoadOptions::default() }).unwrap();
    let named = |d: &rga_core::dataset::TernaryDataset| -> BTreeSet<(String, String, u64)> {
        d.records
            .iter()
            .map(|r| (d.ids.raw(r.trustor).unwrap().to_string(), d.ids.raw(r.trustee).unwrap().to_string(), r.value.to_bits()))
            .collect()
    };
    assert_eq!(named(&first), named(&second));
}

#[test]
fn unreadable_file() {
    let err = load_ternary("/nonexistent/definitely/missing.tsv", &LoadOptions::default()).unwrap_err();
    assert!(err.to_string().contains("missing.tsv"));
}

#[test]
fn stats_from_records() {
    let records: Vec<TrustRecord> = (0..30).map(|k| TrustRecord::new(k % 10, (k + 1) % 10, 1.0)).collect();
    let s = dataset_stats(&records, 10, None);
    assert_eq!(s.num_trust_edges, 10);
    assert!((s.sparsity_degree - 0.1).abs() < 1e-15);
    let recomputed = s.num_trust_edges as f64 / (s.num_users * s.num_users) as f64;
    assert!(((recomputed - s.sparsity_degree) / s.sparsity_degree).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn round_trip(cells in proptest::collection::btree_map((0usize..50, 0usize..50), 1u32..=1_000_000, 1..200)) {
        let records: Vec<TrustRecord> = cells
            .iter()
            .map(|(&(i, j), &v)| TrustRecord::new(i, j, v as f64 / 1e6))
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.tsv");
        write_ternary(&records, &path, Delimiter::default(), None).unwrap();
        let back = load_ternary(&path, &LoadOptions { ids: IdPolicy::Preserve, ..LoadOptions::default() }).unwrap();
        prop_assert_eq!(back.records, records);
    }

    #[test]
    fn densification_is_bijective(ids in proptest::collection::vec(0u32..1000, 2..100)) {
        let text: String = ids.windows(2).map(|w| format!("u{}\tu{}\t1\n", w[0], w[1])).collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ids.tsv");
        std::fs::write(&path, text).unwrap();
        let d = load_ternary(&path, &LoadOptions::default()).unwrap();
        let distinct: BTreeSet<u32> = ids.iter().copied().collect();
        prop_assert_eq!(d.m, distinct.len());
        for raw in &distinct {
            let name = format!("u{raw}");
            let dense = d.ids.dense(&name).unwrap();
            prop_assert_eq!(d.ids.raw(dense), Some(name.as_str()));
        }
    }
}
