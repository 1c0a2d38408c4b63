use std::process::ExitCode;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let (report, json) = boundq_cli::run_command_with_format(&argv);
    if json {
        println!("{}", report.to_json());
    } else if report.command == "help" {
        print!("{}", report.details["text"].as_str().unwrap_or_default());
    } else if report.exit_code >= boundq_cli::EXIT_USAGE {
        eprint!("{}", report.to_human());
    } else {
        print!("{}", report.to_human());
    }
    ExitCode::from(report.exit_code as u8)
}
