// rwa.cpp — Closed-form and numerical single-excitation solvers.

#include "cavsim/rwa.hpp"

#include <cmath>

namespace cavsim::rwa {

namespace {

void check_amplitudes(const SystemConfig& cfg, const ComplexVector& c0) {
    if (c0.size() != cfg.n_atoms) {
        throw ValidationError("amplitudes", "expected " + std::to_string(cfg.n_atoms) +
                                                " entries, got " + std::to_string(c0.size()));
    }
    if (c0.squaredNorm() > 1.0 + 1e-12) {
        throw ValidationError("amplitudes", "norm must not exceed 1");
    }
}

TimeSeries series_from_amplitudes(const RealVector& times, const ComplexMatrix& amps) {
    TimeSeries ts;
    ts.times = times;
    ts.populations = amps.cwiseAbs2();
    ts.total_polarisation = amps.rowwise().sum().cwiseAbs();
    ts.amplitudes = amps;
    return ts;
}

}  // namespace

Complex SymmetricSolution::collective_factor(double t) const {
    const Complex mu_conj = std::conj(mu);
    if (std::abs(gamma_rate) < 1e-10) {
        // degenerate point: cosh -> 1, (mu/G) sinh(G t) -> mu t
        return std::exp(-mu_conj * t) * (1.0 + mu * t);
    }
    // Combine the envelope with cosh/sinh so no intermediate overflows:
    //   e^{-mu* t} cosh(G t) + (mu/G) e^{-mu* t} sinh(G t)
    // = ((1 + mu/G) e^{(G - mu*) t} + (1 - mu/G) e^{-(G + mu*) t}) / 2
    const Complex ratio = mu / gamma_rate;
    const Complex ep = std::exp((gamma_rate - mu_conj) * t);
    const Complex em = std::exp(-(gamma_rate + mu_conj) * t);
    return 0.5 * ((1.0 + ratio) * ep + (1.0 - ratio) * em);
}

ComplexVector SymmetricSolution::amplitudes_at(double t) const {
    const double n = static_cast<double>(n_atoms);
    const Complex mean = c_plus0 / n;
    const Complex free_phase = std::exp(kImag * dipole * t);
    const Complex collective = mean * collective_factor(t);
    ComplexVector out(n_atoms);
    for (int i = 0; i < n_atoms; ++i) out[i] = (c0[i] - mean) * free_phase + collective;
    return out;
}

SymmetricSolution make_symmetric_solution(const SystemConfig& cfg, const ComplexVector& c0) {
    cfg.validate();
    if (cfg.topology != Topology::AllToAll) {
        throw ValidationError("topology", "closed-form solution requires all-to-all coupling");
    }
    if (cfg.cavity != Cavity::SingleLorentzian) {
        throw ValidationError("cavity", "closed-form solution requires the resonant cavity");
    }
    check_amplitudes(cfg, c0);

    SymmetricSolution sol;
    sol.n_atoms = cfg.n_atoms;
    sol.dipole = cfg.lambda_dd;
    sol.c0 = c0;
    sol.c_plus0 = c0.sum();
    const double n = static_cast<double>(cfg.n_atoms);
    sol.mu = 0.5 * Complex(cfg.gamma, -cfg.lambda_dd * (n - 1.0));
    sol.gamma_rate = std::sqrt(sol.mu * sol.mu - Complex(cfg.lambda * n, 0.0));
    return sol;
}

TimeSeries solve_symmetric_analytic(const SystemConfig& cfg, const ComplexVector& c0,
                                    const RealVector& times) {
    const SymmetricSolution sol = make_symmetric_solution(cfg, c0);
    ComplexMatrix amps(times.size(), cfg.n_atoms);
    for (Eigen::Index k = 0; k < times.size(); ++k) {
        amps.row(k) = sol.amplitudes_at(times[k]).transpose();
    }
    return series_from_amplitudes(times, amps);
}

RealVector steady_state(const SystemConfig& cfg, const ComplexVector& c0) {
    cfg.validate();
    if (cfg.topology != Topology::AllToAll) {
        throw ValidationError("topology", "steady-state formula requires all-to-all coupling");
    }
    if (cfg.gamma <= 0.0) {
        throw ValidationError("gamma", "no relaxation at gamma = 0; the limit is undefined");
    }
    if (cfg.lambda <= 0.0) {
        throw ValidationError("lambda", "no decay channel at lambda = 0");
    }
    check_amplitudes(cfg, c0);
    const Complex mean = c0.sum() / static_cast<double>(cfg.n_atoms);
    RealVector out(cfg.n_atoms);
    for (int i = 0; i < cfg.n_atoms; ++i) out[i] = std::norm(c0[i] - mean);
    return out;
}

TimeSeries solve_numeric(const SystemConfig& cfg, const MemoryKernel& kernel,
                         const ComplexVector& c0, const RealVector& times,
                         const OdeControl& control) {
    cfg.validate();
    check_amplitudes(cfg, c0);
    if (kernel.terms.empty()) throw ValidationError("kernel", "needs at least one term");
    for (const auto& term : kernel.terms) {
        if (term.exponent.real() <= 0.0) {
            throw ValidationError("kernel", "exponents must have positive real part");
        }
    }
    if (times.size() < 1 || times[0] != 0.0) {
        throw ValidationError("times", "must start at 0");
    }
    if (cfg.topology == Topology::Chain && cfg.n_atoms != 3) {
        throw ValidationError("n_atoms",
                              "chain solver supports exactly 3 atoms; size unsupported");
    }

    const int n = cfg.n_atoms;
    const int n_terms = static_cast<int>(kernel.terms.size());
    const double dipole = cfg.lambda_dd;
    const bool chain = cfg.topology == Topology::Chain;

    // State layout: [c_0 .. c_{N-1}, z_0 .. z_{K-1}]
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n + n_terms);
    y.head(n) = c0;

    auto rhs = [&](double /*t*/, const Eigen::VectorXcd& s, Eigen::VectorXcd& ds) {
        const Complex c_plus = s.head(n).sum();
        Complex conv{0.0, 0.0};
        for (int k = 0; k < n_terms; ++k) conv += s[n + k];
        if (chain) {
            ds[0] = -kImag * dipole * s[1] - conv;
            ds[1] = -kImag * dipole * (s[0] + s[2]) - conv;
            ds[2] = -kImag * dipole * s[1] - conv;
        } else {
            for (int i = 0; i < n; ++i) {
                ds[i] = -kImag * dipole * (c_plus - s[i]) - conv;
            }
        }
        for (int k = 0; k < n_terms; ++k) {
            ds[n + k] = kernel.terms[k].coeff * c_plus - kernel.terms[k].exponent * s[n + k];
        }
    };

    ComplexMatrix amps(times.size(), n);
    integrate_rk45(rhs, y, times, control,
                   [&](Eigen::Index sample, double /*t*/, const Eigen::VectorXcd& state) {
                       amps.row(sample) = state.head(n).transpose();
                   });
    return series_from_amplitudes(times, amps);
}

double superradiant_expansion(const SystemConfig& cfg, double t) {
    cfg.validate();
    const double n = static_cast<double>(cfg.n_atoms);
    const double big_l = cfg.lambda * n;
    const Complex mu = 0.5 * Complex(cfg.gamma, -cfg.lambda_dd * (n - 1.0));
    const Complex bracket = 1.0 - big_l * t * t + (2.0 / 3.0) * big_l * mu * t * t * t -
                            (1.0 / 3.0) * big_l * (mu * mu - big_l) * t * t * t * t;
    // Populations are real; the odd-order coefficients carry the complex mu.
    return bracket.real() / n;
}

double superradiant_expansion(const SystemConfig& cfg, const ComplexVector& c0, double t) {
    cfg.validate();
    check_amplitudes(cfg, c0);
    const double uniform = 1.0 / std::sqrt(static_cast<double>(cfg.n_atoms));
    for (Eigen::Index i = 0; i < c0.size(); ++i) {
        if (std::abs(c0[i] - Complex(uniform, 0.0)) > 1e-12) {
            throw ValidationError("amplitudes",
                                  "expansion requires the uniform initial condition 1/sqrt(N)");
        }
    }
    return superradiant_expansion(cfg, t);
}

Complex gamma_rate_limit(const SystemConfig& cfg) {
    const double n = static_cast<double>(cfg.n_atoms);
    const double x = 0.5 * cfg.lambda_dd * (n - 1.0);
    return Complex(0.0, std::sqrt(x * x + cfg.lambda * n));
}

bool oscillation_predicate(const SystemConfig& cfg) {
    cfg.validate();
    if (cfg.lambda_dd != 0.0) {
        throw ValidationError("lambda_dd",
                              "predicate defined for lambda_dd = 0; use the imaginary part "
                              "of the collective rate instead");
    }
    if (cfg.cavity != Cavity::SingleLorentzian) {
        throw ValidationError("cavity", "predicate defined for the single resonant cavity");
    }
    const double n = static_cast<double>(cfg.n_atoms);
    return cfg.gamma * cfg.gamma < 4.0 * cfg.lambda * n;
}

}  // namespace cavsim::rwa
