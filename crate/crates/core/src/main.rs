fn main() {
    std::process::exit(sgchrom::cli::main_entry());
}
