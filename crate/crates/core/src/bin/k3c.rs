fn main() {
    std::process::exit(k3c_core::cli::run(std::env::args_os()));
}
