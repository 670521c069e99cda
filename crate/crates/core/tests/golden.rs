use localmrf::experiments::{self, GridSpec};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

const DEFAULT_GRID_SHA256: &str = "b3acde977baed86943a9fa78aa6775e783ed4f71798582c7337ab9c3e7e73da9";

#[test]
fn default_grid_draws_follow_the_stream_layout() {
    let spec = GridSpec::default();
    let model = experiments::gen_grid(&spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(1 << 32);
    let mut next = |lo: f64, hi: f64| lo + (hi - lo) * ((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64);
    for u in 0..100 {
        assert_eq!(model.field(u).to_bits(), next(-1.0, 1.0).to_bits(), "field {u}");
    }
    let mut edges = Vec::new();
    for r in 0..10 {
        for c in 0..10 {
            let u = r * 10 + c;
            if c + 1 < 10 {
                edges.push((u, u + 1));
            }
            if r + 1 < 10 {
                edges.push((u, u + 10));
            }
        }
    }
    edges.sort_unstable();
    assert_eq!(model.num_edges(), 180);
    for (u, v) in edges {
        assert_eq!(model.coupling(u, v).unwrap().to_bits(), next(-0.25, 0.25).to_bits(), "edge ({u}, {v})");
    }
}

#[test]
fn default_grid_file_is_pinned() {
    let json = experiments::gen_grid(&GridSpec::default()).unwrap().to_json();
    let digest: String = Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(digest, DEFAULT_GRID_SHA256);
}
