fn main() {
    std::process::exit(switchnet::cli::run(std::env::args_os()));
}
