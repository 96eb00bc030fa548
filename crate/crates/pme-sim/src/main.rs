fn main() {
    std::process::exit(pme_sim::cli::run());
}
