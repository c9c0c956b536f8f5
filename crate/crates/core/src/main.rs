fn main() {
    std::process::exit(scoutplan_core::cli::run());
}
