fn main() {
    std::process::exit(boxdelta::cli::dispatch(std::env::args_os()));
}
