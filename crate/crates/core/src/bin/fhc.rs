use std::io;

fn main() {
    fhc_core::cli::init_threads();
    let code = fhc_core::cli::run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock());
    std::process::exit(code);
}
