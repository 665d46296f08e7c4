// run_spec.cpp — Run-spec parsing, preset expansion, canonical emission.

#include "cavsim/run_spec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace cavsim::cli {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, "expected a number, got '" + value + "'");
    }
}

int parse_int(const std::string& value, int line) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, "expected an integer, got '" + value + "'");
    }
}

bool parse_bool(const std::string& value, int line) {
    if (value == "1" || value == "true" || value == "on") return true;
    if (value == "0" || value == "false" || value == "off") return false;
    throw ParseError(line, "expected a boolean, got '" + value + "'");
}

std::vector<double> parse_number_list(const std::string& value, int line) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ParseError(line, "empty entry in list");
        out.push_back(parse_double(item, line));
    }
    if (out.empty()) throw ParseError(line, "expected a comma-separated list");
    return out;
}

// Amplitude list: whitespace-separated complex pairs "(re,im)".
ComplexVector parse_amplitudes(const std::string& value, int line) {
    std::vector<Complex> parsed;
    std::stringstream ss(value);
    std::string tok;
    while (ss >> tok) {
        if (tok.size() < 5 || tok.front() != '(' || tok.back() != ')') {
            throw ParseError(line, "amplitude entries look like (re,im); got '" + tok + "'");
        }
        const std::string inner = tok.substr(1, tok.size() - 2);
        const auto comma = inner.find(',');
        if (comma == std::string::npos) {
            throw ParseError(line, "amplitude entries look like (re,im); got '" + tok + "'");
        }
        parsed.emplace_back(parse_double(trim(inner.substr(0, comma)), line),
                            parse_double(trim(inner.substr(comma + 1)), line));
    }
    if (parsed.empty()) throw ParseError(line, "amplitudes must not be empty");
    ComplexVector out(static_cast<Eigen::Index>(parsed.size()));
    for (std::size_t i = 0; i < parsed.size(); ++i) out[static_cast<Eigen::Index>(i)] = parsed[i];
    return out;
}

Mode parse_mode(const std::string& value, int line) {
    if (value == "analytic") return Mode::Analytic;
    if (value == "numeric") return Mode::Numeric;
    if (value == "heom") return Mode::Heom;
    if (value == "compare") return Mode::Compare;
    if (value == "discriminant_map") return Mode::DiscriminantMap;
    if (value == "sweep") return Mode::Sweep;
    throw ParseError(line, "unknown mode '" + value + "'");
}

SweepParam parse_sweep_param(const std::string& value, int line) {
    if (value == "gamma") return SweepParam::Gamma;
    if (value == "lambda") return SweepParam::Lambda;
    if (value == "lambda_dd") return SweepParam::LambdaDd;
    if (value == "delta") return SweepParam::Delta;
    if (value == "n_atoms") return SweepParam::NAtoms;
    throw ParseError(line, "unknown sweep_param '" + value + "'");
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void apply_to_config(RunSpec& spec, double value, SweepParam param);

void validate(RunSpec& spec) {
    spec.system.validate();

    if (spec.preset) {
        spec.amplitudes = expand_preset(*spec.preset, spec.system.n_atoms);
    }
    if (spec.amplitudes.size() == 0) {
        spec.preset = "excite:1";
        spec.amplitudes = expand_preset("excite:1", spec.system.n_atoms);
    }
    if (spec.amplitudes.size() != spec.system.n_atoms) {
        throw ValidationError("amplitudes", "expected " + std::to_string(spec.system.n_atoms) +
                                                " entries, got " +
                                                std::to_string(spec.amplitudes.size()));
    }
    if (spec.amplitudes.squaredNorm() > 1.0 + 1e-12) {
        throw ValidationError("amplitudes", "norm must not exceed 1");
    }

    if (spec.grid.t_end <= 0.0) throw ValidationError("t_end", "must be > 0");
    if (spec.grid.n_samples < 2) throw ValidationError("n_samples", "must be >= 2");
    if (spec.workers < 0) throw ValidationError("workers", "must be >= 0");

    if (spec.system.topology == Topology::Chain && spec.system.n_atoms != 3) {
        throw ValidationError("n_atoms", "chain topology supports exactly 3 atoms");
    }

    const Mode effective = spec.mode == Mode::Sweep ? spec.sweep_mode : spec.mode;
    if (effective == Mode::Analytic && spec.system.topology != Topology::AllToAll) {
        throw ValidationError("topology", "analytic mode requires all-to-all coupling");
    }
    if (effective == Mode::Analytic && spec.system.cavity != Cavity::SingleLorentzian) {
        throw ValidationError("cavity", "analytic mode requires the resonant cavity");
    }
    if (effective == Mode::Heom || effective == Mode::Compare) {
        if (spec.system.cavity != Cavity::SingleLorentzian) {
            throw ValidationError("cavity", "hierarchy modes require the resonant cavity");
        }
        if (spec.system.n_atoms > 4) {
            throw ValidationError("n_atoms", "hierarchy modes support at most 4 atoms");
        }
        if (spec.solver.truncation_depth < 0) {
            throw ValidationError("truncation", "depth must be >= 0");
        }
    }

    if (spec.mode == Mode::Sweep) {
        if (!spec.sweep_param) throw ValidationError("sweep_param", "required in sweep mode");
        if (spec.sweep_values.empty()) {
            throw ValidationError("sweep_values", "required in sweep mode");
        }
        if (spec.sweep_mode == Mode::Sweep || spec.sweep_mode == Mode::DiscriminantMap) {
            throw ValidationError("sweep_mode", "must be analytic, numeric, heom or compare");
        }
        // every swept value must itself produce a valid configuration
        for (double value : spec.sweep_values) {
            RunSpec probe = spec;
            probe.mode = spec.sweep_mode;
            probe.sweep_param.reset();
            probe.sweep_values.clear();
            apply_to_config(probe, value, *spec.sweep_param);
            validate(probe);
        }
    }

    if (spec.mode == Mode::DiscriminantMap) {
        if (!(spec.delta_min > 0.0) || !(spec.delta_max > spec.delta_min)) {
            throw ValidationError("delta_range", "must be positive and increasing");
        }
        if (!(spec.gamma_min > 0.0) || !(spec.gamma_max > spec.gamma_min)) {
            throw ValidationError("gamma_range", "must be positive and increasing");
        }
        if (spec.resolution < 2) throw ValidationError("resolution", "must be >= 2");
    }
}

void apply_to_config(RunSpec& spec, double value, SweepParam param) {
    switch (param) {
        case SweepParam::Gamma: spec.system.gamma = value; break;
        case SweepParam::Lambda: spec.system.lambda = value; break;
        case SweepParam::LambdaDd: spec.system.lambda_dd = value; break;
        case SweepParam::Delta: spec.system.detuning = value; break;
        case SweepParam::NAtoms: {
            const int n = static_cast<int>(std::lround(value));
            if (std::abs(value - n) > 1e-9) {
                throw ValidationError("sweep_values", "n_atoms sweep needs integer values");
            }
            spec.system.n_atoms = n;
            // re-expand the preset for the new size
            if (spec.preset) spec.amplitudes = expand_preset(*spec.preset, n);
            break;
        }
    }
}

}  // namespace

ComplexVector expand_preset(const std::string& preset, int n_atoms) {
    if (n_atoms < 1) throw ValidationError("n_atoms", "must be >= 1");
    ComplexVector c = ComplexVector::Zero(n_atoms);
    if (preset.rfind("excite:", 0) == 0) {
        int k = 0;
        try {
            k = std::stoi(preset.substr(7));
        } catch (const std::exception&) {
            throw ValidationError("preset", "malformed excite:k preset '" + preset + "'");
        }
        if (k < 1 || k > n_atoms) {
            throw ValidationError("preset", "excite:" + std::to_string(k) +
                                                " out of range for " +
                                                std::to_string(n_atoms) + " atoms");
        }
        c[k - 1] = 1.0;
        return c;
    }
    if (preset == "uniform") {
        c.setConstant(1.0 / std::sqrt(static_cast<double>(n_atoms)));
        return c;
    }
    if (preset == "dark13" || preset == "dark12") {
        if (n_atoms != 3) {
            throw ValidationError("preset", preset + " requires exactly 3 atoms");
        }
        const double a = 1.0 / std::sqrt(2.0);
        c[0] = a;
        c[preset == "dark13" ? 2 : 1] = -a;
        return c;
    }
    throw ValidationError("preset", "unknown preset '" + preset + "'");
}

RunSpec parse_run_spec(std::istream& in) {
    RunSpec spec;
    bool preset_seen = false;
    bool amplitudes_seen = false;

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(line_no, "expected `key = value`");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "missing key");
        if (value.empty()) throw ParseError(line_no, "missing value for '" + key + "'");

        if (key == "mode") {
            spec.mode = parse_mode(value, line_no);
        } else if (key == "n_atoms") {
            spec.system.n_atoms = parse_int(value, line_no);
        } else if (key == "omega0") {
            spec.system.omega0 = parse_double(value, line_no);
        } else if (key == "lambda") {
            spec.system.lambda = parse_double(value, line_no);
        } else if (key == "gamma") {
            spec.system.gamma = parse_double(value, line_no);
        } else if (key == "lambda_dd") {
            spec.system.lambda_dd = parse_double(value, line_no);
        } else if (key == "delta") {
            spec.system.detuning = parse_double(value, line_no);
        } else if (key == "topology") {
            if (value == "all_to_all") {
                spec.system.topology = Topology::AllToAll;
            } else if (value == "chain") {
                spec.system.topology = Topology::Chain;
            } else {
                throw ParseError(line_no, "unknown topology '" + value + "'");
            }
        } else if (key == "cavity") {
            if (value == "single") {
                spec.system.cavity = Cavity::SingleLorentzian;
            } else if (value == "double") {
                spec.system.cavity = Cavity::DoubleDetuned;
            } else {
                throw ParseError(line_no, "unknown cavity '" + value + "'");
            }
        } else if (key == "preset") {
            spec.preset = value;
            preset_seen = true;
        } else if (key == "amplitudes") {
            spec.amplitudes = parse_amplitudes(value, line_no);
            amplitudes_seen = true;
        } else if (key == "t_end") {
            spec.grid.t_end = parse_double(value, line_no);
        } else if (key == "n_samples") {
            spec.grid.n_samples = parse_int(value, line_no);
        } else if (key == "out") {
            spec.output_path = value;
        } else if (key == "workers") {
            spec.workers = parse_int(value, line_no);
        } else if (key == "rel_tol") {
            spec.solver.rel_tol = parse_double(value, line_no);
        } else if (key == "abs_tol") {
            spec.solver.abs_tol = parse_double(value, line_no);
        } else if (key == "heom_rel_tol") {
            spec.solver.heom_rel_tol = parse_double(value, line_no);
        } else if (key == "heom_abs_tol") {
            spec.solver.heom_abs_tol = parse_double(value, line_no);
        } else if (key == "truncation") {
            if (value.rfind("depth:", 0) == 0) {
                spec.solver.truncation_scheme = TruncationScheme::TotalDepth;
                spec.solver.truncation_depth = parse_int(value.substr(6), line_no);
            } else if (value.rfind("percap:", 0) == 0) {
                spec.solver.truncation_scheme = TruncationScheme::PerIndexCap;
                spec.solver.truncation_depth = parse_int(value.substr(7), line_no);
            } else {
                throw ParseError(line_no, "truncation is depth:<L> or percap:<Nc>");
            }
        } else if (key == "heom_rescaled") {
            spec.solver.heom_rescaled = parse_bool(value, line_no);
        } else if (key == "sweep_param") {
            spec.sweep_param = parse_sweep_param(value, line_no);
        } else if (key == "sweep_values") {
            spec.sweep_values = parse_number_list(value, line_no);
        } else if (key == "sweep_mode") {
            spec.sweep_mode = parse_mode(value, line_no);
        } else if (key == "delta_min") {
            spec.delta_min = parse_double(value, line_no);
        } else if (key == "delta_max") {
            spec.delta_max = parse_double(value, line_no);
        } else if (key == "gamma_min") {
            spec.gamma_min = parse_double(value, line_no);
        } else if (key == "gamma_max") {
            spec.gamma_max = parse_double(value, line_no);
        } else if (key == "resolution") {
            spec.resolution = parse_int(value, line_no);
        } else {
            throw ParseError(line_no, "unknown key '" + key + "'");
        }
    }

    if (preset_seen && amplitudes_seen) {
        throw ValidationError("preset", "give either a preset or explicit amplitudes, not both");
    }
    validate(spec);
    return spec;
}

RunSpec parse_run_spec_text(const std::string& text) {
    std::istringstream in(text);
    return parse_run_spec(in);
}

RunSpec parse_run_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("spec-file", "cannot open '" + path + "'");
    return parse_run_spec(in);
}

std::string mode_token(Mode mode) {
    switch (mode) {
        case Mode::Analytic: return "analytic";
        case Mode::Numeric: return "numeric";
        case Mode::Heom: return "heom";
        case Mode::Compare: return "compare";
        case Mode::DiscriminantMap: return "discriminant_map";
        case Mode::Sweep: return "sweep";
    }
    return "?";
}

std::string sweep_param_token(SweepParam param) {
    switch (param) {
        case SweepParam::Gamma: return "gamma";
        case SweepParam::Lambda: return "lambda";
        case SweepParam::LambdaDd: return "lambda_dd";
        case SweepParam::Delta: return "delta";
        case SweepParam::NAtoms: return "n_atoms";
    }
    return "?";
}

std::string emit_run_spec(const RunSpec& spec) {
    std::ostringstream out;
    out << "mode = " << mode_token(spec.mode) << '\n';
    out << "n_atoms = " << spec.system.n_atoms << '\n';
    out << "omega0 = " << fmt17(spec.system.omega0) << '\n';
    out << "lambda = " << fmt17(spec.system.lambda) << '\n';
    out << "gamma = " << fmt17(spec.system.gamma) << '\n';
    out << "lambda_dd = " << fmt17(spec.system.lambda_dd) << '\n';
    out << "delta = " << fmt17(spec.system.detuning) << '\n';
    out << "topology = "
        << (spec.system.topology == Topology::AllToAll ? "all_to_all" : "chain") << '\n';
    out << "cavity = "
        << (spec.system.cavity == Cavity::SingleLorentzian ? "single" : "double") << '\n';
    if (spec.preset) {
        out << "preset = " << *spec.preset << '\n';
    } else {
        out << "amplitudes =";
        for (Eigen::Index i = 0; i < spec.amplitudes.size(); ++i) {
            out << " (" << fmt17(spec.amplitudes[i].real()) << ','
                << fmt17(spec.amplitudes[i].imag()) << ')';
        }
        out << '\n';
    }
    out << "t_end = " << fmt17(spec.grid.t_end) << '\n';
    out << "n_samples = " << spec.grid.n_samples << '\n';
    out << "out = " << spec.output_path << '\n';
    out << "workers = " << spec.workers << '\n';
    out << "rel_tol = " << fmt17(spec.solver.rel_tol) << '\n';
    out << "abs_tol = " << fmt17(spec.solver.abs_tol) << '\n';
    out << "heom_rel_tol = " << fmt17(spec.solver.heom_rel_tol) << '\n';
    out << "heom_abs_tol = " << fmt17(spec.solver.heom_abs_tol) << '\n';
    out << "truncation = "
        << (spec.solver.truncation_scheme == TruncationScheme::TotalDepth ? "depth:" : "percap:")
        << spec.solver.truncation_depth << '\n';
    out << "heom_rescaled = " << (spec.solver.heom_rescaled ? "1" : "0") << '\n';
    if (spec.mode == Mode::Sweep) {
        out << "sweep_param = " << sweep_param_token(*spec.sweep_param) << '\n';
        out << "sweep_values = ";
        for (std::size_t i = 0; i < spec.sweep_values.size(); ++i) {
            if (i) out << ", ";
            out << fmt17(spec.sweep_values[i]);
        }
        out << '\n';
        out << "sweep_mode = " << mode_token(spec.sweep_mode) << '\n';
    }
    if (spec.mode == Mode::DiscriminantMap) {
        out << "delta_min = " << fmt17(spec.delta_min) << '\n';
        out << "delta_max = " << fmt17(spec.delta_max) << '\n';
        out << "gamma_min = " << fmt17(spec.gamma_min) << '\n';
        out << "gamma_max = " << fmt17(spec.gamma_max) << '\n';
        out << "resolution = " << spec.resolution << '\n';
    }
    return out.str();
}

bool RunSpec::operator==(const RunSpec& other) const {
    auto config_equal = [](const SystemConfig& a, const SystemConfig& b) {
        return a.n_atoms == b.n_atoms && a.omega0 == b.omega0 && a.lambda == b.lambda &&
               a.gamma == b.gamma && a.lambda_dd == b.lambda_dd && a.detuning == b.detuning &&
               a.topology == b.topology && a.cavity == b.cavity;
    };
    if (!config_equal(system, other.system)) return false;
    if (mode != other.mode || preset != other.preset) return false;
    if (amplitudes.size() != other.amplitudes.size()) return false;
    for (Eigen::Index i = 0; i < amplitudes.size(); ++i) {
        if (amplitudes[i] != other.amplitudes[i]) return false;
    }
    if (grid.t_end != other.grid.t_end || grid.n_samples != other.grid.n_samples) return false;
    if (output_path != other.output_path || workers != other.workers) return false;
    const auto& s = solver;
    const auto& o = other.solver;
    if (s.rel_tol != o.rel_tol || s.abs_tol != o.abs_tol || s.heom_rel_tol != o.heom_rel_tol ||
        s.heom_abs_tol != o.heom_abs_tol || s.truncation_scheme != o.truncation_scheme ||
        s.truncation_depth != o.truncation_depth || s.heom_rescaled != o.heom_rescaled) {
        return false;
    }
    if (sweep_param != other.sweep_param || sweep_values != other.sweep_values ||
        sweep_mode != other.sweep_mode) {
        return false;
    }
    return delta_min == other.delta_min && delta_max == other.delta_max &&
           gamma_min == other.gamma_min && gamma_max == other.gamma_max &&
           resolution == other.resolution;
}

}  // namespace cavsim::cli
