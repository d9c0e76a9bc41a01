use std::io::Write;

fn main() {
    let outcome = multisymplectic::cli::run(std::env::args());
    if !outcome.stdout.is_empty() {
        print!("{}", outcome.stdout);
    }
    if !outcome.stderr.is_empty() {
        let _ = write!(std::io::stderr(), "{}", outcome.stderr);
    }
    std::process::exit(outcome.exit_code);
}
