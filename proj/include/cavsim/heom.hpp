// heom.hpp — Numerically exact hierarchical-equations-of-motion propagation of
// the full (non-rotating-wave) N-atom density matrix coupled to the resonant
// Lorentzian reservoir. Used to validate the single-excitation solvers and to
// reach coupling regimes they cannot.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cavsim/core.hpp"
#include "cavsim/rwa.hpp"

namespace cavsim::heom {

// Zero-temperature bath correlation C(t) = lambda e^{-(gamma + i omega0) t},
// split into exponential sums for its real and imaginary parts:
//   C_R(t) = sum_k c_real[k] e^{-g_real[k] t},  C_I(t) likewise,
// with c_real = {l/2, l/2}, c_imag = {l/2i, -l/2i} and exponents
// gamma +/- i omega0 in both groups.
struct BathDecomposition {
    std::array<Complex, 2> c_real{};
    std::array<Complex, 2> g_real{};
    std::array<Complex, 2> c_imag{};
    std::array<Complex, 2> g_imag{};
};

BathDecomposition decompose_bath(const SystemConfig& cfg);

// Exponential-sum reconstructions (their imaginary parts vanish identically).
Complex correlation_real_part(const BathDecomposition& bath, double t);
Complex correlation_imag_part(const BathDecomposition& bath, double t);
Complex correlation(const BathDecomposition& bath, double t);

// Dense operators in the 2^N computational product basis: atom i occupies
// bit i of the basis index, bit value 1 = excited.
struct SystemOperators {
    ComplexMatrix h_system;       // sum_i omega0 n_i + dipole sum sx_i sx_j
    ComplexMatrix sigma_x_total;  // sum_i sx_i
    int n_atoms = 0;

    Eigen::Index dim() const { return h_system.rows(); }
};

SystemOperators build_system_operators(const SystemConfig& cfg, int max_atoms = 4);

// Total raising/lowering combinations, used for polarisation diagnostics.
ComplexMatrix build_total_raising(int n_atoms);

// ----------------------------- hierarchy indexing ----------------------------

struct Truncation {
    enum class Scheme {
        TotalDepth,   // sum_j n_j <= depth
        PerIndexCap,  // each n_j <= depth
    };
    Scheme scheme = Scheme::TotalDepth;
    int depth = 6;
};

// Ranked enumeration of admissible 4-component multi-indices
// n = (n_R1, n_R2, n_I1, n_I2), with precomputed raise/lower neighbor tables.
// Rank 0 is always (0,0,0,0), the physical density matrix.
class HierarchyTable {
public:
    static HierarchyTable build(const Truncation& truncation);

    int size() const { return static_cast<int>(index_.size()); }
    const std::array<int, 4>& multi_index(int rank) const { return index_[rank]; }
    // -1 when the neighbor falls outside the truncation (absent ADO = zero).
    int raised(int rank, int slot) const { return raised_[rank][slot]; }
    int lowered(int rank, int slot) const { return lowered_[rank][slot]; }
    int find(const std::array<int, 4>& idx) const;
    const Truncation& truncation() const { return truncation_; }

private:
    std::vector<std::array<int, 4>> index_;
    std::vector<std::array<int, 4>> raised_;
    std::vector<std::array<int, 4>> lowered_;
    Truncation truncation_;
};

// Full hierarchy state: the stacked auxiliary density operators, rank r
// occupying the column-major block [r*dim^2, (r+1)*dim^2).
struct HierarchyState {
    HierarchyTable table;
    Eigen::Index dim = 0;
    Eigen::VectorXcd data;
    double time = 0.0;

    Eigen::Map<ComplexMatrix> ado(int rank) {
        return {data.data() + static_cast<Eigen::Index>(rank) * dim * dim, dim, dim};
    }
    Eigen::Map<const ComplexMatrix> ado(int rank) const {
        return {data.data() + static_cast<Eigen::Index>(rank) * dim * dim, dim, dim};
    }
    ComplexMatrix physical() const { return ado(0); }
};

// Factorized initial condition: the atomic pure state built from the given
// single-excitation amplitudes (plus ground amplitude making up the norm),
// reservoir in vacuum, every auxiliary operator zero.
HierarchyState make_initial_state(const SystemOperators& ops, const ComplexVector& amplitudes,
                                  const Truncation& truncation);

struct PropagateOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-11;
    // Rescaled hierarchy keeps deep auxiliary operators O(1); the plain form
    // integrates the equations verbatim. Both agree on the physical matrix.
    bool rescaled = false;
};

// Advances all ADOs to t_end, sampling every dt (t_end must be an integer
// multiple of dt). Populations, polarisation and trace/Hermiticity
// diagnostics are taken from the physical matrix. Aborts with a diagnostic
// naming the offending multi-index if any ADO stops being finite.
rwa::TimeSeries propagate(HierarchyState& state, const SystemOperators& ops,
                          const BathDecomposition& bath, double dt, double t_end,
                          const PropagateOptions& options = {});

// ------------------------------ study utilities ------------------------------

struct ConvergenceReport {
    std::vector<Truncation> truncations;
    // deviations[k] = max |P(level k+1) - P(level k)| over samples and atoms
    std::vector<double> deviations;
    double threshold = 1e-6;

    bool converged() const {
        return !deviations.empty() && deviations.back() < threshold;
    }
};

ConvergenceReport convergence_study(const SystemConfig& cfg, const ComplexVector& amplitudes,
                                    const std::vector<Truncation>& truncations, double dt,
                                    double t_end, const PropagateOptions& options = {});

struct CompareResult {
    rwa::TimeSeries reference;  // single-excitation solver
    rwa::TimeSeries heom;
    RealVector difference;  // per-sample max over atoms of |delta P|
    double max_difference = 0.0;
};

// Runs the closed-form (all-to-all) or chain Volterra solver next to the
// hierarchy on the same uniform time grid.
CompareResult compare_rwa_heom(const SystemConfig& cfg, const ComplexVector& amplitudes,
                               const RealVector& times, const Truncation& truncation,
                               const PropagateOptions& options = {});

// ------------------------------- checkpointing -------------------------------

std::uint64_t config_hash(const SystemConfig& cfg);

// Binary dump: versioned header, config hash, time, index table, ADO array.
void save_checkpoint(const std::string& path, const HierarchyState& state,
                     const SystemConfig& cfg);
HierarchyState load_checkpoint(const std::string& path, const SystemConfig& cfg);

}  // namespace cavsim::heom
