//! Regenerates fixtures/vacuum_trace.csv: the `rabi` curve of
//! configs/fit_vacuum.json with seeded Gaussian noise.
//!
//! cargo run -p einstein-rabi-cli --example make_fixture

use std::path::Path;

use einstein_rabi::series::format_sci;
use rabi_cli::{commands, RunConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub const SEED: u64 = 20_240_611;
pub const NOISE: f64 = 0.02;

pub fn synthesize(config_path: &Path) -> String {
    let config = RunConfig::load(config_path).expect("fixture config");
    let series = commands::rabi(&config).expect("rabi curve");
    let p = series.channel("p21").expect("p21 channel");
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let noise = Normal::new(0.0, NOISE).expect("noise");
    let mut out =
        format!("# synthetic vacuum Rabi trace, seed {SEED}, noise sd {NOISE}\nt_s,value\n");
    for (&t, &v) in series.t().iter().zip(p) {
        let y = (v + noise.sample(&mut rng)).clamp(-0.1, 1.1);
        out.push_str(&format!("{},{}\n", format_sci(t), format_sci(y)));
    }
    out
}

#[allow(dead_code)]
fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let text = synthesize(&root.join("configs/fit_vacuum.json"));
    std::fs::write(root.join("fixtures/vacuum_trace.csv"), text).expect("write fixture");
}
