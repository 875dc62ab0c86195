fn main() {
    if let Err(e) = bcgc_cli::run(std::env::args_os()) {
        eprintln!("error[{}]: {e}", e.category());
        std::process::exit(e.exit_code());
    }
}
