fn main() {
    std::process::exit(kslant::cli::run(std::env::args_os()));
}
