fn main() {
    std::process::exit(revoca_cli::run());
}
