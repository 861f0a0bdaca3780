fn main() {
    std::process::exit(mkdv_similarity::report::run(std::env::args_os()));
}
