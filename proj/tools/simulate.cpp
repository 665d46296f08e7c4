// simulate.cpp — CLI front end: `simulate <spec-file> [--out PATH] [--workers K]`.
// Exit codes: 0 success, 2 validation/parse error, 3 solver failure.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "cavsim/runner.hpp"
#include "cavsim/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"cavity-memory-sim: atoms in Lorentzian cavity reservoirs"};
    app.set_version_flag("--version", std::string("cavity-memory-sim v") + cavsim::kVersion);

    std::string spec_path;
    std::string out_override;
    int workers = -1;
    bool seedless = false;
    app.add_option("spec-file", spec_path, "run specification file")->required();
    app.add_option("--out", out_override, "output CSV path (overrides the spec)");
    app.add_option("--workers", workers, "sweep worker pool size");
    app.add_flag("--seedless", seedless,
                 "accepted for compatibility; every solver is deterministic and uses no RNG");

    CLI11_PARSE(app, argc, argv);

    cavsim::cli::RunSpec spec;
    try {
        spec = cavsim::cli::parse_run_spec_file(spec_path);
        if (!out_override.empty()) spec.output_path = out_override;
        if (workers >= 0) spec.workers = workers;
    } catch (const cavsim::ParseError& err) {
        std::fprintf(stderr, "simulate: %s: parse error: %s\n", spec_path.c_str(), err.what());
        return 2;
    } catch (const cavsim::ValidationError& err) {
        std::fprintf(stderr, "simulate: %s: validation error: %s\n", spec_path.c_str(),
                     err.what());
        return 2;
    }

    try {
        const auto bundle = cavsim::cli::run(spec);
        const auto files = cavsim::cli::emit_csv(bundle, spec.output_path);
        for (const auto& file : files) std::printf("%s\n", file.c_str());
    } catch (const cavsim::ValidationError& err) {
        std::fprintf(stderr, "simulate: validation error: %s\n", err.what());
        return 2;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "simulate: solver failure: %s\n", err.what());
        return 3;
    }
    return 0;
}
