// heom.cpp — Hierarchy construction, right-hand side, and propagation.

#include "cavsim/heom.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <unordered_map>

#include "cavsim/ode.hpp"

namespace cavsim::heom {

namespace {

std::uint64_t pack_index(const std::array<int, 4>& idx) {
    std::uint64_t key = 0;
    for (int slot = 0; slot < 4; ++slot) {
        key = (key << 16) | static_cast<std::uint64_t>(idx[slot] & 0xffff);
    }
    return key;
}

bool admissible(const std::array<int, 4>& idx, const Truncation& trunc) {
    int total = 0;
    for (int v : idx) {
        if (v < 0) return false;
        if (trunc.scheme == Truncation::Scheme::PerIndexCap && v > trunc.depth) return false;
        total += v;
    }
    if (trunc.scheme == Truncation::Scheme::TotalDepth && total > trunc.depth) return false;
    return true;
}

}  // namespace

BathDecomposition decompose_bath(const SystemConfig& cfg) {
    cfg.validate();
    if (cfg.cavity != Cavity::SingleLorentzian) {
        throw ValidationError("cavity",
                              "bath decomposition covers the single resonant cavity only");
    }
    const double half = 0.5 * cfg.lambda;
    BathDecomposition bath;
    bath.c_real = {Complex(half, 0.0), Complex(half, 0.0)};
    bath.g_real = {Complex(cfg.gamma, cfg.omega0), Complex(cfg.gamma, -cfg.omega0)};
    bath.c_imag = {Complex(0.0, -half), Complex(0.0, half)};  // +/- lambda/(2i)
    bath.g_imag = bath.g_real;
    return bath;
}

Complex correlation_real_part(const BathDecomposition& bath, double t) {
    return bath.c_real[0] * std::exp(-bath.g_real[0] * t) +
           bath.c_real[1] * std::exp(-bath.g_real[1] * t);
}

Complex correlation_imag_part(const BathDecomposition& bath, double t) {
    return bath.c_imag[0] * std::exp(-bath.g_imag[0] * t) +
           bath.c_imag[1] * std::exp(-bath.g_imag[1] * t);
}

Complex correlation(const BathDecomposition& bath, double t) {
    return correlation_real_part(bath, t) + kImag * correlation_imag_part(bath, t);
}

SystemOperators build_system_operators(const SystemConfig& cfg, int max_atoms) {
    cfg.validate();
    if (cfg.n_atoms > max_atoms) {
        throw ValidationError("n_atoms", "hierarchy state space overflows beyond " +
                                             std::to_string(max_atoms) + " atoms");
    }
    const int n = cfg.n_atoms;
    const Eigen::Index dim = Eigen::Index{1} << n;

    SystemOperators ops;
    ops.n_atoms = n;
    ops.h_system = ComplexMatrix::Zero(dim, dim);
    ops.sigma_x_total = ComplexMatrix::Zero(dim, dim);

    for (Eigen::Index b = 0; b < dim; ++b) {
        ops.h_system(b, b) =
            cfg.omega0 * static_cast<double>(std::popcount(static_cast<unsigned>(b)));
        for (int i = 0; i < n; ++i) {
            ops.sigma_x_total(b ^ (Eigen::Index{1} << i), b) += 1.0;
        }
    }
    auto add_xx = [&](int i, int j) {
        const Eigen::Index flip = (Eigen::Index{1} << i) | (Eigen::Index{1} << j);
        for (Eigen::Index b = 0; b < dim; ++b) ops.h_system(b ^ flip, b) += cfg.lambda_dd;
    };
    if (cfg.topology == Topology::AllToAll) {
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) add_xx(i, j);
        }
    } else {
        for (int i = 0; i + 1 < n; ++i) add_xx(i, i + 1);
    }
    return ops;
}

ComplexMatrix build_total_raising(int n_atoms) {
    const Eigen::Index dim = Eigen::Index{1} << n_atoms;
    ComplexMatrix sp = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        for (int i = 0; i < n_atoms; ++i) {
            const Eigen::Index bit = Eigen::Index{1} << i;
            if (!(b & bit)) sp(b | bit, b) += 1.0;
        }
    }
    return sp;
}

// ----------------------------- hierarchy indexing ----------------------------

HierarchyTable HierarchyTable::build(const Truncation& truncation) {
    if (truncation.depth < 0) throw ValidationError("truncation", "depth must be >= 0");
    HierarchyTable table;
    table.truncation_ = truncation;

    const int cap = truncation.depth;
    std::array<int, 4> idx{};
    for (idx[0] = 0; idx[0] <= cap; ++idx[0]) {
        for (idx[1] = 0; idx[1] <= cap; ++idx[1]) {
            for (idx[2] = 0; idx[2] <= cap; ++idx[2]) {
                for (idx[3] = 0; idx[3] <= cap; ++idx[3]) {
                    if (admissible(idx, truncation)) table.index_.push_back(idx);
                }
            }
        }
    }

    std::unordered_map<std::uint64_t, int> rank_of;
    rank_of.reserve(table.index_.size() * 2);
    for (int r = 0; r < static_cast<int>(table.index_.size()); ++r) {
        rank_of.emplace(pack_index(table.index_[r]), r);
    }

    table.raised_.resize(table.index_.size());
    table.lowered_.resize(table.index_.size());
    for (int r = 0; r < static_cast<int>(table.index_.size()); ++r) {
        for (int slot = 0; slot < 4; ++slot) {
            std::array<int, 4> up = table.index_[r];
            ++up[slot];
            if (admissible(up, truncation)) {
                table.raised_[r][slot] = rank_of.at(pack_index(up));
            } else {
                table.raised_[r][slot] = -1;
            }
            std::array<int, 4> down = table.index_[r];
            --down[slot];
            table.lowered_[r][slot] =
                down[slot] >= 0 ? rank_of.at(pack_index(down)) : -1;
        }
    }
    return table;
}

int HierarchyTable::find(const std::array<int, 4>& idx) const {
    for (int r = 0; r < size(); ++r) {
        if (index_[r] == idx) return r;
    }
    return -1;
}

HierarchyState make_initial_state(const SystemOperators& ops, const ComplexVector& amplitudes,
                                  const Truncation& truncation) {
    if (amplitudes.size() != ops.n_atoms) {
        throw ValidationError("amplitudes", "size must match the atom count");
    }
    const double norm2 = amplitudes.squaredNorm();
    if (norm2 > 1.0 + 1e-12) throw ValidationError("amplitudes", "norm must not exceed 1");

    const Eigen::Index dim = ops.dim();
    ComplexVector psi = ComplexVector::Zero(dim);
    psi[0] = std::sqrt(std::max(0.0, 1.0 - norm2));
    for (int i = 0; i < ops.n_atoms; ++i) psi[Eigen::Index{1} << i] = amplitudes[i];

    HierarchyState state;
    state.table = HierarchyTable::build(truncation);
    state.dim = dim;
    state.data = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(state.table.size()) * dim * dim);
    state.time = 0.0;
    state.ado(0) = psi * psi.adjoint();
    return state;
}

// --------------------------------- propagation -------------------------------

namespace {

// Right-hand side of the hierarchy. For multi-index n (slots 0,1 real-part
// terms, slots 2,3 imaginary-part terms):
//   d rho^n = -i[H, rho^n] - (sum_j n_j g_j) rho^n
//             - i sum_{j<2} c_j n_j [S, rho^{n_j-}]
//             + sum_{j>=2} c_j n_j {S, rho^{n_j-}}
//             - i sum_j [S, rho^{n_j+}],
// with S the total sigma_x. Commutator contributions are accumulated first so
// each rank costs a fixed number of dim x dim products.
class HierarchyRhs {
public:
    HierarchyRhs(const HierarchyTable& table, const SystemOperators& ops,
                 const BathDecomposition& bath, bool rescaled)
        : table_(table),
          h_(ops.h_system),
          s_(ops.sigma_x_total),
          dim_(ops.dim()),
          rescaled_(rescaled) {
        gamma_[0] = bath.g_real[0];
        gamma_[1] = bath.g_real[1];
        gamma_[2] = bath.g_imag[0];
        gamma_[3] = bath.g_imag[1];
        coeff_[0] = bath.c_real[0];
        coeff_[1] = bath.c_real[1];
        coeff_[2] = bath.c_imag[0];
        coeff_[3] = bath.c_imag[1];
        for (int slot = 0; slot < 4; ++slot) {
            weight_[slot] = std::max(std::abs(coeff_[slot]), 1e-300);
        }
        gamma_sum_.resize(table_.size());
        for (int r = 0; r < table_.size(); ++r) {
            Complex g{0.0, 0.0};
            const auto& idx = table_.multi_index(r);
            for (int slot = 0; slot < 4; ++slot) {
                g += static_cast<double>(idx[slot]) * gamma_[slot];
            }
            gamma_sum_[r] = g;
        }
        acc_comm_.resize(dim_, dim_);
        acc_anti_.resize(dim_, dim_);
        tmp_.resize(dim_, dim_);
    }

    void operator()(double /*t*/, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
        const Eigen::Index block = dim_ * dim_;
        for (int r = 0; r < table_.size(); ++r) {
            Eigen::Map<const ComplexMatrix> rho(y.data() + r * block, dim_, dim_);
            Eigen::Map<ComplexMatrix> out(dy.data() + r * block, dim_, dim_);

            tmp_.noalias() = h_ * rho;
            tmp_.noalias() -= rho * h_;
            out = Complex(0.0, -1.0) * tmp_ - gamma_sum_[r] * rho;

            const auto& idx = table_.multi_index(r);
            bool has_comm = false;
            bool has_anti = false;
            for (int slot = 0; slot < 4; ++slot) {
                const int up = table_.raised(r, slot);
                if (up >= 0) {
                    const double cu =
                        rescaled_ ? std::sqrt(weight_[slot] * (idx[slot] + 1.0)) : 1.0;
                    Eigen::Map<const ComplexMatrix> nb(y.data() + up * block, dim_, dim_);
                    if (!has_comm) {
                        acc_comm_ = cu * nb;
                        has_comm = true;
                    } else {
                        acc_comm_.noalias() += cu * nb;
                    }
                }
                if (idx[slot] > 0) {
                    const int down = table_.lowered(r, slot);
                    const double occupation =
                        rescaled_ ? std::sqrt(idx[slot] / weight_[slot])
                                  : static_cast<double>(idx[slot]);
                    const Complex cl = coeff_[slot] * occupation;
                    Eigen::Map<const ComplexMatrix> nb(y.data() + down * block, dim_, dim_);
                    if (slot < 2) {
                        if (!has_comm) {
                            acc_comm_ = cl * nb;
                            has_comm = true;
                        } else {
                            acc_comm_.noalias() += cl * nb;
                        }
                    } else {
                        if (!has_anti) {
                            acc_anti_ = cl * nb;
                            has_anti = true;
                        } else {
                            acc_anti_.noalias() += cl * nb;
                        }
                    }
                }
            }
            if (has_comm) {
                tmp_.noalias() = s_ * acc_comm_;
                tmp_.noalias() -= acc_comm_ * s_;
                out += Complex(0.0, -1.0) * tmp_;
            }
            if (has_anti) {
                tmp_.noalias() = s_ * acc_anti_;
                tmp_.noalias() += acc_anti_ * s_;
                out += tmp_;
            }
        }
    }

private:
    const HierarchyTable& table_;
    const ComplexMatrix& h_;
    const ComplexMatrix& s_;
    Eigen::Index dim_;
    bool rescaled_;
    std::array<Complex, 4> gamma_{};
    std::array<Complex, 4> coeff_{};
    std::array<double, 4> weight_{};
    std::vector<Complex> gamma_sum_;
    ComplexMatrix acc_comm_, acc_anti_, tmp_;
};

std::string format_multi_index(const std::array<int, 4>& idx) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "(%d,%d,%d,%d)", idx[0], idx[1], idx[2], idx[3]);
    return buf;
}

}  // namespace

rwa::TimeSeries propagate(HierarchyState& state, const SystemOperators& ops,
                          const BathDecomposition& bath, double dt, double t_end,
                          const PropagateOptions& options) {
    if (dt <= 0.0) throw ValidationError("dt", "must be > 0");
    if (t_end <= 0.0) throw ValidationError("t_end", "must be > 0");
    if (state.dim != ops.dim()) {
        throw ValidationError("state", "dimension does not match the operators");
    }
    const auto n_steps = static_cast<Eigen::Index>(std::llround(t_end / dt));
    if (n_steps < 1 || std::abs(n_steps * dt - t_end) > 1e-9 * std::max(1.0, t_end)) {
        throw ValidationError("dt", "t_end must be an integer multiple of dt");
    }

    RealVector times(n_steps + 1);
    for (Eigen::Index i = 0; i <= n_steps; ++i) times[i] = static_cast<double>(i) * dt;
    times[n_steps] = t_end;

    const int n = ops.n_atoms;
    const Eigen::Index dim = state.dim;
    const ComplexMatrix sp = build_total_raising(n);
    const ComplexMatrix sp_sm = sp * sp.adjoint();

    rwa::TimeSeries series;
    series.times = times;
    series.populations.resize(times.size(), n);
    series.total_polarisation.resize(times.size());
    rwa::Diagnostics diag;

    const double trace0 = state.physical().trace().real();

    HierarchyRhs rhs(state.table, ops, bath, options.rescaled);
    OdeControl ctl;
    ctl.rel_tol = options.rel_tol;
    ctl.abs_tol = options.abs_tol;

    auto observe = [&](Eigen::Index sample, double t, const Eigen::VectorXcd& y) {
        Eigen::Map<const ComplexMatrix> rho(y.data(), dim, dim);
        for (int i = 0; i < n; ++i) {
            double p = 0.0;
            for (Eigen::Index b = 0; b < dim; ++b) {
                if (b & (Eigen::Index{1} << i)) p += rho(b, b).real();
            }
            series.populations(sample, i) = p;
        }
        series.total_polarisation[sample] =
            std::sqrt(std::max(0.0, (rho * sp_sm).trace().real()));
        diag.max_trace_drift =
            std::max(diag.max_trace_drift, std::abs(rho.trace() - Complex(trace0, 0.0)));
        diag.max_hermiticity_error = std::max(
            diag.max_hermiticity_error, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
        state.time = t;
    };

    try {
        integrate_rk45(rhs, state.data, times, ctl, observe);
    } catch (const SolverError& err) {
        for (int r = 0; r < state.table.size(); ++r) {
            if (!state.ado(r).allFinite()) {
                throw SolverError(std::string(err.what()) + "; non-finite ADO at index " +
                                  format_multi_index(state.table.multi_index(r)));
            }
        }
        throw;
    }

    series.diagnostics = diag;
    return series;
}

ConvergenceReport convergence_study(const SystemConfig& cfg, const ComplexVector& amplitudes,
                                    const std::vector<Truncation>& truncations, double dt,
                                    double t_end, const PropagateOptions& options) {
    if (truncations.size() < 2) {
        throw ValidationError("truncations", "need at least two truncation levels");
    }
    const SystemOperators ops = build_system_operators(cfg);
    const BathDecomposition bath = decompose_bath(cfg);

    ConvergenceReport report;
    report.truncations = truncations;
    std::vector<RealMatrix> populations;
    populations.reserve(truncations.size());
    for (const auto& trunc : truncations) {
        HierarchyState state = make_initial_state(ops, amplitudes, trunc);
        populations.push_back(propagate(state, ops, bath, dt, t_end, options).populations);
    }
    for (std::size_t k = 0; k + 1 < populations.size(); ++k) {
        report.deviations.push_back(
            (populations[k + 1] - populations[k]).cwiseAbs().maxCoeff());
    }
    return report;
}

CompareResult compare_rwa_heom(const SystemConfig& cfg, const ComplexVector& amplitudes,
                               const RealVector& times, const Truncation& truncation,
                               const PropagateOptions& options) {
    if (times.size() < 2 || times[0] != 0.0) {
        throw ValidationError("times", "must start at 0 with at least two samples");
    }
    const double dt = times[1] - times[0];
    for (Eigen::Index i = 1; i < times.size(); ++i) {
        if (std::abs(times[i] - times[i - 1] - dt) > 1e-9 * std::max(1.0, dt)) {
            throw ValidationError("times", "hierarchy comparison needs a uniform grid");
        }
    }

    CompareResult result;
    if (cfg.topology == Topology::AllToAll) {
        result.reference = rwa::solve_symmetric_analytic(cfg, amplitudes, times);
    } else {
        result.reference = rwa::solve_numeric(cfg, memory_kernel_from(cfg), amplitudes, times);
    }

    const SystemOperators ops = build_system_operators(cfg);
    const BathDecomposition bath = decompose_bath(cfg);
    HierarchyState state = make_initial_state(ops, amplitudes, truncation);
    result.heom = propagate(state, ops, bath, dt, times[times.size() - 1], options);

    result.difference =
        (result.heom.populations - result.reference.populations).cwiseAbs().rowwise().maxCoeff();
    result.max_difference = result.difference.size() ? result.difference.maxCoeff() : 0.0;
    return result;
}

// ------------------------------- checkpointing -------------------------------

std::uint64_t config_hash(const SystemConfig& cfg) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%d|%.17g|%.17g|%.17g|%.17g|%.17g|%d|%d", cfg.n_atoms,
                  cfg.omega0, cfg.lambda, cfg.gamma, cfg.lambda_dd, cfg.detuning,
                  static_cast<int>(cfg.topology), static_cast<int>(cfg.cavity));
    std::uint64_t hash = 1469598103934665603ull;  // FNV-1a
    for (const char* p = buf; *p; ++p) {
        hash ^= static_cast<unsigned char>(*p);
        hash *= 1099511628211ull;
    }
    return hash;
}

namespace {

constexpr char kCheckpointMagic[8] = {'C', 'A', 'V', 'H', 'E', 'O', 'M', '1'};
constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
void write_raw(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_raw(std::ifstream& in, T& value) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
}

}  // namespace

void save_checkpoint(const std::string& path, const HierarchyState& state,
                     const SystemConfig& cfg) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SolverError("checkpoint: cannot open " + path + " for writing");

    out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    write_raw(out, kCheckpointVersion);
    write_raw(out, config_hash(cfg));
    write_raw(out, static_cast<std::int32_t>(state.dim));
    write_raw(out, static_cast<std::int32_t>(state.table.truncation().scheme));
    write_raw(out, static_cast<std::int32_t>(state.table.truncation().depth));
    write_raw(out, static_cast<std::uint64_t>(state.table.size()));
    write_raw(out, state.time);
    for (int r = 0; r < state.table.size(); ++r) {
        for (int v : state.table.multi_index(r)) write_raw(out, static_cast<std::int32_t>(v));
    }
    out.write(reinterpret_cast<const char*>(state.data.data()),
              static_cast<std::streamsize>(sizeof(Complex) * state.data.size()));
    if (!out) throw SolverError("checkpoint: write to " + path + " failed");
}

HierarchyState load_checkpoint(const std::string& path, const SystemConfig& cfg) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SolverError("checkpoint: cannot open " + path);

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
        throw ValidationError("checkpoint", "bad magic in " + path);
    }
    std::uint32_t version = 0;
    read_raw(in, version);
    if (version != kCheckpointVersion) {
        throw ValidationError("checkpoint", "unsupported version " + std::to_string(version));
    }
    std::uint64_t hash = 0;
    read_raw(in, hash);
    if (hash != config_hash(cfg)) {
        throw ValidationError("checkpoint", "configuration hash mismatch");
    }
    std::int32_t dim = 0, scheme = 0, depth = 0;
    read_raw(in, dim);
    read_raw(in, scheme);
    read_raw(in, depth);
    std::uint64_t n_ados = 0;
    read_raw(in, n_ados);

    HierarchyState state;
    read_raw(in, state.time);
    state.dim = dim;
    Truncation trunc;
    trunc.scheme = static_cast<Truncation::Scheme>(scheme);
    trunc.depth = depth;
    state.table = HierarchyTable::build(trunc);
    if (static_cast<std::uint64_t>(state.table.size()) != n_ados) {
        throw ValidationError("checkpoint", "index table size mismatch");
    }
    for (int r = 0; r < state.table.size(); ++r) {
        for (int v : state.table.multi_index(r)) {
            std::int32_t stored = 0;
            read_raw(in, stored);
            if (stored != v) throw ValidationError("checkpoint", "index table mismatch");
        }
    }
    state.data.resize(static_cast<Eigen::Index>(n_ados) * dim * dim);
    in.read(reinterpret_cast<char*>(state.data.data()),
            static_cast<std::streamsize>(sizeof(Complex) * state.data.size()));
    if (!in) throw ValidationError("checkpoint", "truncated data section in " + path);
    return state;
}

}  // namespace cavsim::heom
