use std::io::Write;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let stdin = std::io::stdin();
    let code = hcif::cli::run_cli(
        &args,
        &mut stdout.lock(),
        &mut stderr.lock(),
        &mut stdin.lock(),
    );
    let _ = std::io::stdout().flush();
    std::process::exit(code);
}
