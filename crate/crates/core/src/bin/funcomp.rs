fn main() {
    std::process::exit(funcomp::cli::dispatch(std::env::args_os()));
}
