//! Regenerates the derivation-chain corpus under `tests/data/` by certified
//! search. Run with `cargo run --release --example regenerate_chains`.

use std::fs;
use std::path::Path;

use braidkernel::atlas::{pure_braid_rp2, rho_generator};
use braidkernel::rewrite::{check_derivation, search_equality};
use braidkernel::word::Word;

fn rho(n: usize, k: usize) -> Word {
    rho_generator(n, k).unwrap()
}

fn main() {
    let out = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    fs::create_dir_all(&out).unwrap();
    for n in [2usize, 3] {
        let p = pure_braid_rp2(n).unwrap();
        for i in 1..=n {
            for j in i + 1..=n {
                // rho_i rho_j rho_i rho_j = rho_j rho_i rho_j rho_i
                let (ri, rj) = (rho(n, i), rho(n, j));
                let lhs = ri.multiply(&rj).multiply(&ri).multiply(&rj);
                let rhs = rj.multiply(&ri).multiply(&rj).multiply(&ri);
                emit(&out, &format!("rho_square_commute_n{n}_{i}{j}"), &p, &lhs, &rhs);

                // B_ij^-1 rho_j B_ij = rho_i^-2 rho_j rho_i^2
                let b = braidkernel::atlas::b_generator(n, i, j).unwrap();
                let lhs = b.invert().multiply(&rj).multiply(&b);
                let rhs = ri.pow(-2).multiply(&rj).multiply(&ri.pow(2));
                emit(&out, &format!("b_conjugates_rho_n{n}_{i}{j}"), &p, &lhs, &rhs);
            }
        }
    }
}

fn emit(dir: &Path, name: &str, p: &braidkernel::Presentation, lhs: &Word, rhs: &Word) {
    let chain = search_equality(p, lhs, rhs, 16, 2_000_000).unwrap_or_else(|| panic!("{name}: no chain within budget"));
    assert!(check_derivation(&chain).unwrap().is_valid());
    // reference the atlas instead of repeating the presentation inline
    let n = braidkernel::atlas::recognize_rp2(p).expect("atlas presentation");
    let steps: String = chain
        .to_text()
        .lines()
        .filter(|l| l.starts_with("start") || l.starts_with("step"))
        .map(|l| format!("{l}\n"))
        .collect();
    let text = format!("# {} = {}\natlas rp2 {n}\n{steps}", p.format(lhs), p.format(rhs));
    fs::write(dir.join(format!("{name}.chain")), text).unwrap();
    println!("{name}: {} steps", chain.steps().len());
}
