fn main() {
    std::process::exit(oiglab::cli::run());
}
