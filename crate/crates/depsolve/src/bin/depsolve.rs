fn main() {
    std::process::exit(depsolve::cli::main_with(std::env::args_os()));
}
