//! Regenerates data/golden_returns.txt, the bundled reference dataset
//! used by the integration tests: fixed-seed draws from the modulated
//! distribution at daily-return scale, so the known parameters
//! (K = 24, c = 0.5) fit the file far better than a plain normal.

use rlnd::dist::RlndParams;

fn main() {
    let n = 20_000usize;
    let seed = 77u64;
    let params = RlndParams::symmetric(0.0, 0.013_445_393_151_679_1, 24.0, 0.5).unwrap();
    let values = params.sample(n, seed).unwrap();

    let mut out = String::with_capacity(n * 26);
    out.push_str(&format!(
        "# source: golden draws (seed {seed}, {n} values, sigma 0.0134453931516791, K 24, c 0.5)\n"
    ));
    for v in &values {
        out.push_str(&format!("{v:.16e}\n"));
    }
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/golden_returns.txt");
    std::fs::write(&path, out).expect("write golden dataset");
    eprintln!("wrote {}", path.display());
}
