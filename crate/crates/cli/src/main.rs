use std::io;
use std::path::PathBuf;

fn main() {
    let code = jbtriple_cli::main_with(
        std::env::args().collect(),
        std::env::var_os(jbtriple_cli::OUT_DIR_ENV).map(PathBuf::from),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
