fn main() -> std::process::ExitCode {
    rpys::cli::main_with(std::env::args_os())
}
