fn main() {
    std::process::exit(cuebias::cli::run(std::env::args_os()));
}
