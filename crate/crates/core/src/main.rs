fn main() {
    let code = extremal_core::cli::run(std::env::args_os());
    std::process::exit(code);
}
