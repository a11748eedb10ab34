// Command-line front end: parse program files, evaluate them exactly or by
// seeded sampling, rewrite them onto an error-correcting code, and run
// plain-vs-encoded noise trials.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qecw/qecw.hpp"

namespace {

struct CliError {
    int exit_code;
    std::string kind;
    std::string message;
    qecw::json details = nullptr;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError{1, "io", "cannot open '" + path + "'"};
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_output(const std::string& out_path, const std::string& payload) {
    if (out_path.empty() || out_path == "-") {
        std::cout << payload;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw CliError{1, "io", "cannot write '" + out_path + "'"};
    out << payload;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("QECW_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw CliError{1, "flags", "QECW_SEED is not an integer"};
        }
    }
    return 0;
}

qecw::Channel parse_channel(const std::string& s) {
    if (s == "none") return qecw::Channel::none;
    if (s == "bit_flip") return qecw::Channel::bit_flip;
    if (s == "phase_flip") return qecw::Channel::phase_flip;
    if (s == "depolarizing") return qecw::Channel::depolarizing;
    throw CliError{1, "flags", "unknown noise channel '" + s + "'"};
}

qecw::NoiseLocation parse_location(const std::string& s) {
    if (s == "per_gate") return qecw::NoiseLocation::per_gate;
    if (s == "per_fragment_boundary") return qecw::NoiseLocation::per_fragment_boundary;
    throw CliError{1, "flags", "unknown noise location '" + s + "'"};
}

void parse_policy(const std::string& s, qecw::TransformOptions& opts) {
    if (s == "after-each-op") {
        opts.policy = qecw::CorrectionPolicy::after_each_op;
        return;
    }
    if (s == "never") {
        opts.policy = qecw::CorrectionPolicy::never;
        return;
    }
    if (s.rfind("every-k:", 0) == 0) {
        opts.policy = qecw::CorrectionPolicy::every_k;
        try {
            opts.k = std::stoi(s.substr(8));
        } catch (...) {
            throw CliError{1, "flags", "bad correction period in '" + s + "'"};
        }
        if (opts.k < 1) throw CliError{1, "flags", "correction period must be >= 1"};
        return;
    }
    throw CliError{1, "flags", "unknown policy '" + s + "' (after-each-op | every-k:K | never)"};
}

CliError to_cli_error(const qecw::Error& e) {
    if (const auto* vf = dynamic_cast<const qecw::ValidationFailed*>(&e)) {
        qecw::json violations = qecw::json::array();
        for (const auto& v : vf->report.violations)
            violations.push_back({{"statement", v.stmt_index}, {"rule", v.rule}, {"detail", v.detail}});
        return CliError{1, "validation", e.what(), violations};
    }
    if (dynamic_cast<const qecw::SyntaxError*>(&e)) return CliError{1, "syntax", e.what()};
    if (dynamic_cast<const qecw::UnsupportedVersion*>(&e)) return CliError{1, "version", e.what()};
    return CliError{2, "simulation", e.what()};
}

void report_error(const CliError& e, bool json_errors) {
    if (json_errors) {
        qecw::json out;
        out["error"]["kind"] = e.kind;
        out["error"]["message"] = e.message;
        if (!e.details.is_null()) out["error"]["details"] = e.details;
        std::cerr << out.dump() << "\n";
    } else {
        std::cerr << "error: " << e.message << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qecw: quantum program simulator and error-correction rewriter"};
    app.require_subcommand(1);
    bool json_errors = false;
    app.add_flag("--json-errors", json_errors, "report errors as JSON on stderr");

    std::string program_path, out_path = "-", code_name, policy = "after-each-op";
    std::string channel_name = "none", location_name = "per_fragment_boundary", format = "json";
    double p = 0.0, tv_threshold = 0.05;
    std::uint64_t trials = 1000;
    std::optional<std::uint64_t> seed_flag;
    bool keep_syndromes = false;

    auto* sim = app.add_subcommand("sim", "print the exact outcome distribution");
    sim->add_option("program", program_path, "program file")->required();
    sim->add_option("--noise", channel_name, "noise channel (must be none for exact mode)");
    sim->add_option("--p", p, "noise probability");
    sim->add_option("--out", out_path, "output path (default stdout)");

    auto* run = app.add_subcommand("run", "print one seeded result");
    run->add_option("program", program_path, "program file")->required();
    run->add_option("--seed", seed_flag, "rng seed (default $QECW_SEED or 0)");
    run->add_option("--noise", channel_name, "noise channel");
    run->add_option("--p", p, "noise probability");
    run->add_option("--location", location_name, "noise location");
    run->add_option("--out", out_path, "output path (default stdout)");

    auto* tf = app.add_subcommand("transform", "rewrite onto an error-correcting code");
    tf->add_option("program", program_path, "program file")->required();
    tf->add_option("--code", code_name, "bitflip3 | phaseflip3 | steane7")->required();
    tf->add_option("--policy", policy, "after-each-op | every-k:K | never");
    tf->add_flag("--keep-syndromes", keep_syndromes,
                 "leave syndrome ancillas allocated (measurement-free rounds)");
    tf->add_option("--out", out_path, "output path (default stdout)");

    auto* tr = app.add_subcommand("trials", "compare plain vs encoded logical error rates");
    tr->add_option("program", program_path, "program file")->required();
    tr->add_option("--code", code_name, "bitflip3 | phaseflip3 | steane7")->required();
    tr->add_option("--noise", channel_name, "none | bit_flip | phase_flip | depolarizing")
        ->required();
    tr->add_option("--p", p, "noise probability")->check(CLI::Range(0.0, 1.0));
    tr->add_option("--location", location_name, "per_gate | per_fragment_boundary");
    tr->add_option("--trials", trials, "number of Monte Carlo trials");
    tr->add_option("--seed", seed_flag, "master seed (default $QECW_SEED or 0)");
    tr->add_option("--policy", policy, "correction policy for the encoded lane");
    tr->add_option("--format", format, "json | csv");
    tr->add_option("--tv-threshold", tv_threshold, "flag level for the distribution metric");
    tr->add_option("--out", out_path, "output path (default stdout)");

    auto* corpus_cmd = app.add_subcommand("corpus", "write the built-in example programs");
    std::string corpus_dir = ".";
    corpus_cmd->add_option("--dir", corpus_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 1;
    }

    try {
        const std::uint64_t seed = seed_flag ? *seed_flag : default_seed();

        if (sim->parsed()) {
            qecw::QProgram prog = qecw::parse_program(read_file(program_path));
            qecw::NoiseSpec noise{parse_channel(channel_name), p,
                                  qecw::NoiseLocation::per_fragment_boundary};
            auto dist = qecw::evaluate_exact(prog, noise);
            write_output(out_path, qecw::distribution_to_json(dist).dump() + "\n");
        } else if (run->parsed()) {
            qecw::QProgram prog = qecw::parse_program(read_file(program_path));
            qecw::NoiseSpec noise{parse_channel(channel_name), p, parse_location(location_name)};
            if (noise.stochastic() && noise.location == qecw::NoiseLocation::per_fragment_boundary)
                prog = qecw::insert_noise_sites(prog);
            qecw::RunOptions opts{noise};
            qecw::ResultValue result = qecw::evaluate_run(prog, seed, opts);
            qecw::json out;
            out["result"] = qecw::result_key(result);
            out["seed"] = seed;
            out["rng"] = qecw::Rng::kAlgorithm;
            write_output(out_path, out.dump() + "\n");
        } else if (tf->parsed()) {
            qecw::QProgram prog = qecw::parse_program(read_file(program_path));
            qecw::TransformOptions topts;
            parse_policy(policy, topts);
            topts.keep_syndrome_ancillas = keep_syndromes;
            qecw::QProgram out = qecw::transform(prog, qecw::get_code(code_name), topts);
            write_output(out_path, qecw::serialize_program(out));
        } else if (tr->parsed()) {
            if (format != "json" && format != "csv")
                throw CliError{1, "flags", "unknown format '" + format + "'"};
            qecw::QProgram prog = qecw::parse_program(read_file(program_path));
            qecw::TransformOptions topts;
            parse_policy(policy, topts);
            topts.keep_syndrome_ancillas = keep_syndromes;
            qecw::NoiseSpec noise{parse_channel(channel_name), p, parse_location(location_name)};
            const auto t0 = std::chrono::steady_clock::now();
            qecw::TrialReport report = qecw::estimate_logical_error_rate(
                prog, qecw::get_code(code_name), noise, trials, seed, topts, tv_threshold);
            const auto t1 = std::chrono::steady_clock::now();
            // Timing is metadata, kept out of the payload so reports are
            // byte-identical across runs.
            std::cerr << "elapsed_ms="
                      << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()
                      << "\n";
            write_output(out_path, format == "csv" ? qecw::report_to_csv(report)
                                                   : qecw::report_to_json(report).dump(2) + "\n");
        } else if (corpus_cmd->parsed()) {
            for (const auto& entry : qecw::extended_corpus()) {
                const std::string path = corpus_dir + "/" + entry.name + ".json";
                write_output(path, qecw::serialize_program(entry.program));
            }
        }
    } catch (const CliError& e) {
        report_error(e, json_errors);
        return e.exit_code;
    } catch (const qecw::Error& e) {
        const CliError ce = to_cli_error(e);
        report_error(ce, json_errors);
        return ce.exit_code;
    } catch (const std::exception& e) {
        report_error(CliError{2, "internal", e.what()}, json_errors);
        return 2;
    }
    return 0;
}
