fn main() {
    std::process::exit(xy_discord::cli::run(std::env::args_os()));
}
