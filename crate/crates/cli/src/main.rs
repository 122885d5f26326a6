fn main() {
    std::process::exit(mfm_fol_cli::main_exit());
}
