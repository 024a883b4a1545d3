fn main() {
    std::process::exit(dirac_ibc::cli::dispatch(std::env::args_os()));
}
