// rwa.hpp — Single-excitation dynamics: closed-form solution for the fully
// symmetric ensemble, a general Volterra solver via exponential-kernel ODE
// reduction, short-time collective-decay expansion, and steady states.

#pragma once

#include <optional>

#include "cavsim/core.hpp"
#include "cavsim/ode.hpp"

namespace cavsim::rwa {

// Per-sample solver health, filled by solvers that track it (HEOM).
struct Diagnostics {
    double max_trace_drift = 0.0;
    double max_hermiticity_error = 0.0;
};

struct TimeSeries {
    RealVector times;
    RealMatrix populations;         // one row per sample, one column per atom
    RealVector total_polarisation;  // |c_+|
    std::optional<ComplexMatrix> amplitudes;
    std::optional<Diagnostics> diagnostics;

    Eigen::Index n_samples() const { return times.size(); }
    Eigen::Index n_atoms() const { return populations.cols(); }
};

// Closed-form evaluator context for the symmetric (all-to-all, resonant
// cavity) ensemble:
//   c_i(t) = (c_i(0) - c_+(0)/N) e^{i L t}
//          + (c_+(0)/N) e^{-mu* t} (cosh(G t) + (mu/G) sinh(G t)),
// with mu = (gamma - i L (N-1))/2 and G = sqrt(mu^2 - lambda N).
struct SymmetricSolution {
    Complex mu;
    Complex gamma_rate;  // G above, principal square root
    int n_atoms = 1;
    double dipole = 0.0;
    ComplexVector c0;
    Complex c_plus0;

    // Evaluates all amplitudes at time t (valid for any real t).
    ComplexVector amplitudes_at(double t) const;
    // The collective factor e^{-mu* t}(cosh G t + (mu/G) sinh G t).
    Complex collective_factor(double t) const;
};

SymmetricSolution make_symmetric_solution(const SystemConfig& cfg, const ComplexVector& c0);

TimeSeries solve_symmetric_analytic(const SystemConfig& cfg, const ComplexVector& c0,
                                    const RealVector& times);

// Long-time populations |c_i(0) - c_+(0)/N|^2. Requires gamma > 0 and
// lambda > 0 so a decay channel exists.
RealVector steady_state(const SystemConfig& cfg, const ComplexVector& c0);

// Volterra integro-differential solver: each exponential kernel term becomes
// one linear auxiliary ODE, then the coupled system is integrated with an
// adaptive RK5(4). Supports all-to-all (any N) and the three-atom chain.
TimeSeries solve_numeric(const SystemConfig& cfg, const MemoryKernel& kernel,
                         const ComplexVector& c0, const RealVector& times,
                         const OdeControl& control = {});

// Fourth-order short-time expansion of P_i(t) for the uniform initial
// condition c_i(0) = 1/sqrt(N).
double superradiant_expansion(const SystemConfig& cfg, double t);
// Same, but validates that c0 is the uniform initial condition.
double superradiant_expansion(const SystemConfig& cfg, const ComplexVector& c0, double t);

// gamma -> 0 limit of the collective rate: i sqrt(L^2 (N-1)^2 / 4 + lambda N).
Complex gamma_rate_limit(const SystemConfig& cfg);

// With no dipole-dipole coupling the populations oscillate iff
// gamma^2 < 4 lambda N. Rejects configurations with lambda_dd != 0.
bool oscillation_predicate(const SystemConfig& cfg);

}  // namespace cavsim::rwa
