// runner.cpp — RunSpec dispatch, sweep worker pool, CSV writers.

#include "cavsim/runner.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "cavsim/heom.hpp"
#include "cavsim/version.hpp"

namespace cavsim::cli {

namespace {

RealVector sample_times(const TimeGrid& grid) {
    RealVector times = RealVector::LinSpaced(grid.n_samples, 0.0, grid.t_end);
    times[0] = 0.0;
    times[grid.n_samples - 1] = grid.t_end;
    return times;
}

heom::Truncation truncation_from(const SolverOverrides& solver) {
    heom::Truncation trunc;
    trunc.scheme = solver.truncation_scheme == TruncationScheme::TotalDepth
                       ? heom::Truncation::Scheme::TotalDepth
                       : heom::Truncation::Scheme::PerIndexCap;
    trunc.depth = solver.truncation_depth;
    return trunc;
}

Payload run_single(const RunSpec& spec, Mode mode, const std::string& label) {
    Payload payload;
    payload.label = label;
    const RealVector times = sample_times(spec.grid);

    OdeControl control;
    control.rel_tol = spec.solver.rel_tol;
    control.abs_tol = spec.solver.abs_tol;

    heom::PropagateOptions heom_options;
    heom_options.rel_tol = spec.solver.heom_rel_tol;
    heom_options.abs_tol = spec.solver.heom_abs_tol;
    heom_options.rescaled = spec.solver.heom_rescaled;

    switch (mode) {
        case Mode::Analytic:
            payload.series = rwa::solve_symmetric_analytic(spec.system, spec.amplitudes, times);
            break;
        case Mode::Numeric:
            payload.series = rwa::solve_numeric(spec.system, memory_kernel_from(spec.system),
                                                spec.amplitudes, times, control);
            break;
        case Mode::Heom: {
            const auto ops = heom::build_system_operators(spec.system);
            const auto bath = heom::decompose_bath(spec.system);
            auto state = heom::make_initial_state(ops, spec.amplitudes,
                                                  truncation_from(spec.solver));
            const double dt = times[1] - times[0];
            payload.series =
                heom::propagate(state, ops, bath, dt, spec.grid.t_end, heom_options);
            break;
        }
        case Mode::Compare: {
            const auto result = heom::compare_rwa_heom(spec.system, spec.amplitudes, times,
                                                       truncation_from(spec.solver),
                                                       heom_options);
            payload.kind = Payload::Kind::Pair;
            payload.series = result.reference;
            payload.series_b = result.heom;
            payload.difference = result.difference;
            break;
        }
        case Mode::DiscriminantMap:
            payload.kind = Payload::Kind::Map;
            payload.map = spectral::discriminant_map({spec.delta_min, spec.delta_max},
                                                     {spec.gamma_min, spec.gamma_max},
                                                     spec.system.lambda, spec.resolution);
            break;
        case Mode::Sweep:
            throw ValidationError("mode", "nested sweeps are not supported");
    }
    return payload;
}

std::string format_value_label(SweepParam param, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return sweep_param_token(param) + "=" + buf;
}

RunSpec spec_for_value(const RunSpec& spec, double value) {
    RunSpec sub = spec;
    sub.mode = spec.sweep_mode;
    sub.sweep_param.reset();
    sub.sweep_values.clear();
    switch (*spec.sweep_param) {
        case SweepParam::Gamma: sub.system.gamma = value; break;
        case SweepParam::Lambda: sub.system.lambda = value; break;
        case SweepParam::LambdaDd: sub.system.lambda_dd = value; break;
        case SweepParam::Delta: sub.system.detuning = value; break;
        case SweepParam::NAtoms:
            sub.system.n_atoms = static_cast<int>(std::lround(value));
            if (sub.preset) sub.amplitudes = expand_preset(*sub.preset, sub.system.n_atoms);
            break;
    }
    return sub;
}

}  // namespace

ResultBundle run(const RunSpec& spec) {
    ResultBundle bundle;
    bundle.resolved = spec;
    bundle.version = kVersion;

    if (spec.mode != Mode::Sweep) {
        bundle.payloads.push_back(run_single(spec, spec.mode, ""));
        return bundle;
    }

    const std::size_t n_runs = spec.sweep_values.size();
    bundle.payloads.resize(n_runs);
    std::vector<std::exception_ptr> errors(n_runs);

    unsigned pool = spec.workers > 0 ? static_cast<unsigned>(spec.workers)
                                     : std::max(1u, std::thread::hardware_concurrency());
    pool = std::min<unsigned>(pool, static_cast<unsigned>(n_runs));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < n_runs; i = next.fetch_add(1)) {
            try {
                const double value = spec.sweep_values[i];
                const RunSpec sub = spec_for_value(spec, value);
                bundle.payloads[i] = run_single(sub, spec.sweep_mode,
                                                format_value_label(*spec.sweep_param, value));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (unsigned k = 0; k < pool; ++k) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
    for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }
    return bundle;
}

// ----------------------------------- output ----------------------------------

namespace {

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_metadata(std::ostream& out, const ResultBundle& bundle, const Payload& payload) {
    out << "# cavity-memory-sim v" << bundle.version << '\n';
    std::istringstream spec_lines(emit_run_spec(bundle.resolved));
    std::string line;
    while (std::getline(spec_lines, line)) out << "# " << line << '\n';
    if (!payload.label.empty()) out << "# sweep_point = " << payload.label << '\n';
}

void write_series(std::ostream& out, const rwa::TimeSeries& series) {
    const Eigen::Index n = series.n_atoms();
    out << "t";
    for (Eigen::Index i = 0; i < n; ++i) out << ",P_" << (i + 1);
    out << ",abs_c_plus\n";
    for (Eigen::Index k = 0; k < series.n_samples(); ++k) {
        out << fmt12(series.times[k]);
        for (Eigen::Index i = 0; i < n; ++i) out << ',' << fmt12(series.populations(k, i));
        out << ',' << fmt12(series.total_polarisation[k]) << '\n';
    }
}

void write_pair(std::ostream& out, const Payload& payload) {
    const Eigen::Index n = payload.series.n_atoms();
    out << "# series a: single-excitation solver, series b: hierarchy\n";
    out << "t";
    for (Eigen::Index i = 0; i < n; ++i) out << ",P_" << (i + 1) << "_a";
    for (Eigen::Index i = 0; i < n; ++i) out << ",P_" << (i + 1) << "_b";
    out << ",max_abs_diff\n";
    for (Eigen::Index k = 0; k < payload.series.n_samples(); ++k) {
        out << fmt12(payload.series.times[k]);
        for (Eigen::Index i = 0; i < n; ++i) {
            out << ',' << fmt12(payload.series.populations(k, i));
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            out << ',' << fmt12(payload.series_b.populations(k, i));
        }
        out << ',' << fmt12(payload.difference[k]) << '\n';
    }
}

std::string payload_path(const std::string& base, const Payload& payload, bool single) {
    if (single || payload.label.empty()) return base;
    const auto dot = base.rfind('.');
    const auto slash = base.rfind('/');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    if (!has_ext) return base + "_" + payload.label;
    return base.substr(0, dot) + "_" + payload.label + base.substr(dot);
}

}  // namespace

std::vector<std::string> emit_csv(const ResultBundle& bundle, const std::string& path) {
    std::vector<std::string> written;
    const bool single = bundle.payloads.size() == 1;
    for (const auto& payload : bundle.payloads) {
        const std::string file = payload_path(path, payload, single);
        std::ofstream out(file, std::ios::trunc);
        if (!out) throw SolverError("emit_csv: cannot open '" + file + "' for writing");
        write_metadata(out, bundle, payload);
        switch (payload.kind) {
            case Payload::Kind::Series: write_series(out, payload.series); break;
            case Payload::Kind::Pair: write_pair(out, payload); break;
            case Payload::Kind::Map: spectral::write_csv(*payload.map, out); break;
        }
        out.flush();
        if (!out) throw SolverError("emit_csv: write to '" + file + "' failed");
        written.push_back(file);
    }
    return written;
}

}  // namespace cavsim::cli
