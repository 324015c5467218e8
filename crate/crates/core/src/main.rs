fn main() -> std::process::ExitCode {
    lame_ball::cli::run()
}
