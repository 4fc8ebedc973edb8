fn main() {
    std::process::exit(hsiem::run(std::env::args_os()));
}
