//! User-defined systems from TOML text: the same checks the `msym check`
//! subcommands run, driven through the library API.
//!
//! Run with `cargo run --example system_files`.

use multisymplectic::kernels::kernel_distribution_point;
use multisymplectic::solutions::kernel_related;
use multisymplectic::system::RunConfig;
use multisymplectic::systemfile::SystemFile;

const SRC: &str = r#"
[chart]
base = ["x", "y"]
fiber = ["q", "px", "py", "u", "v", "w"]

[[form.terms]]
coeff = "1"
covectors = ["q", "px", "y"]

[[form.terms]]
coeff = "-1"
covectors = ["q", "py", "x"]

[[form.terms]]
coeff = "1"
covectors = ["q", "u", "w"]

[distributions]
D1 = [["1","0","0","0","0","0","0","0"],
      ["0","1","0","0","0","0","0","0"],
      ["0","0","0","0","0","1","0","0"]]
D3 = [["1","0","0","0","0","0","0","0"],
      ["0","1","0","0","0","0","0","0"],
      ["0","0","0","0","0","0","0","1"]]

[quotient]
drop = ["v"]
beta = { v = 0.0 }
"#;

fn main() {
    let file = SystemFile::parse(SRC).expect("valid system file");
    let cfg = RunConfig::default();
    let points = cfg.sample_box(file.system.dim());

    let omega = file.system.omega().at(&points[0]);
    let report = kernel_distribution_point(&omega, file.system.chart(), 1e-9);
    println!(
        "kernel dimension from the file-defined form: {}",
        report.k_dim
    );

    let d1 = file.distribution("D1").unwrap();
    let d3 = file.distribution("D3").unwrap();
    let (related, witness) = kernel_related(d1, d3, &file.system, &points, 1e-10);
    println!("D1 ~ D3: {related}");
    if let Some(w) = witness {
        println!("  witness contraction: {}", w.contraction);
    }

    let (dropped, beta) = file.quotient.clone().unwrap();
    let emitted = file.emit_reduced(&dropped, &beta).unwrap();
    println!("\nreduced system file emitted by `check … reduce`:\n{emitted}");
}
