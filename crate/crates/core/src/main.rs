fn main() {
    std::process::exit(svperiod::cli::run(std::env::args_os()));
}
