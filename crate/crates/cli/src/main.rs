fn main() {
    std::process::exit(wdvdb_cli::run(std::env::args_os()));
}
