fn main() {
    std::process::exit(dirac_gbdt::cli::main_with_args(std::env::args_os()));
}
