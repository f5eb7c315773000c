fn main() {
    std::process::exit(cwlab::cli::run(std::env::args()) as i32);
}
