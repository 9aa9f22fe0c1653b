use planted::io::{
    decode_observation, encode_observation, load_observation, read_class_table, read_edge_list, read_signal,
    save_observation, write_class_table, write_edge_list, write_signal,
};
use planted_core::hypertrees::build_class_table;
use planted_core::models::{
    sample_pds, sample_sparse_tpca, NoiseMode, Observation, PdsParams, PriorSpec, TpcaParams,
};

fn hypergraph_obs() -> Observation {
    let p = PdsParams::new(11, 3, 0.3, 0.2, 0.7).unwrap();
    Observation::Hypergraph(sample_pds(&p, 9).unwrap().1)
}

fn tensor_obs(mode: NoiseMode) -> Observation {
    let p = TpcaParams::new(6, 3, 0.8, PriorSpec::bernoulli(0.4), mode).unwrap();
    Observation::Tensor(sample_sparse_tpca(&p, 4).unwrap().1)
}

#[test]
fn binary_container_round_trips() {
    for obs in [hypergraph_obs(), tensor_obs(NoiseMode::NoiseReduced), tensor_obs(NoiseMode::Symmetrized)] {
        let bytes = encode_observation(&obs);
        assert_eq!(&bytes[..4], b"PLNT");
        assert_eq!(decode_observation(&bytes).unwrap(), obs);
    }
}

#[test]
fn corrupted_container_is_rejected() {
    let bytes = encode_observation(&hypergraph_obs());
    for pos in [5, 30, bytes.len() - 1] {
        let mut bad = bytes.clone();
        bad[pos] ^= 0x10;
        assert!(decode_observation(&bad).is_err(), "flip at {pos} accepted");
    }
    assert!(decode_observation(&bytes[..bytes.len() - 3]).is_err());
    assert!(decode_observation(b"NOPE").is_err());
}

#[test]
fn edge_list_round_trips() {
    for obs in [hypergraph_obs(), tensor_obs(NoiseMode::Symmetrized)] {
        let mut buf = Vec::new();
        write_edge_list(&obs, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("# planted edge-list v1\n"));
        assert_eq!(read_edge_list(buf.as_slice()).unwrap(), obs);
    }
}

#[test]
fn edge_list_rejects_bad_lines() {
    let bad = "# planted edge-list v1\n# kind=hypergraph n=4 r=2\n0 4 1\n";
    assert!(read_edge_list(bad.as_bytes()).is_err());
    let unsorted = "# planted edge-list v1\n# kind=hypergraph n=4 r=2\n2 1 1\n";
    assert!(read_edge_list(unsorted.as_bytes()).is_err());
}

#[test]
fn signal_round_trips() {
    let p = PdsParams::new(13, 2, 0.4, 0.3, 0.6).unwrap();
    let (signal, _) = sample_pds(&p, 2).unwrap();
    let mut buf = Vec::new();
    write_signal(&signal, &mut buf).unwrap();
    assert_eq!(read_signal(buf.as_slice()).unwrap(), signal);
}

#[test]
fn class_table_round_trips() {
    for (ell, r) in [(0, 2), (1, 2), (2, 2), (1, 3)] {
        let table = build_class_table(ell, r).unwrap();
        let mut buf = Vec::new();
        write_class_table(&table, &mut buf).unwrap();
        assert_eq!(read_class_table(buf.as_slice()).unwrap(), table);
    }
}

#[test]
fn files_are_sniffed_by_content() {
    let dir = tempfile::tempdir().unwrap();
    let obs = hypergraph_obs();
    for name in ["obs.plnt", "obs.txt"] {
        let path = dir.path().join(name);
        save_observation(&obs, &path).unwrap();
        assert_eq!(load_observation(&path).unwrap(), obs);
    }
}
