fn main() {
    std::process::exit(photonc::cli::main_entry());
}
