//! Writes every texture primitive to PNG through the CLI entry point.
//!
//! cargo run --example dump_textures -- [out_dir]

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out_textures".into());
    let code = faultsim::cli::run(["faultsim", "--json", "dump-textures", "--kind", "all", "--out", &out]);
    std::process::exit(code);
}
