// core.cpp — Validation and the spectral-density / memory-kernel relations.

#include "cavsim/core.hpp"

#include <cmath>

namespace cavsim {

void SystemConfig::validate() const {
    if (n_atoms < 1) throw ValidationError("n_atoms", "must be >= 1");
    if (omega0 <= 0.0) throw ValidationError("omega0", "must be > 0");
    if (lambda < 0.0) throw ValidationError("lambda", "must be >= 0");
    if (gamma <= 0.0) throw ValidationError("gamma", "must be > 0");
    if (detuning < 0.0) throw ValidationError("detuning", "must be >= 0");
    if (cavity == Cavity::SingleLorentzian && detuning != 0.0) {
        throw ValidationError("detuning", "must be 0 for the single resonant cavity");
    }
    if (!std::isfinite(lambda) || !std::isfinite(gamma) || !std::isfinite(lambda_dd) ||
        !std::isfinite(detuning) || !std::isfinite(omega0)) {
        throw ValidationError("config", "parameters must be finite");
    }
}

SpectralDensity spectral_density_from(const SystemConfig& cfg) {
    cfg.validate();
    SpectralDensity sd;
    sd.kind = cfg.cavity == Cavity::SingleLorentzian ? SpectralDensity::Kind::Lorentzian
                                                     : SpectralDensity::Kind::DoubleLorentzian;
    sd.lambda = cfg.lambda;
    sd.gamma = cfg.gamma;
    sd.omega0 = cfg.omega0;
    sd.detuning = cfg.detuning;
    return sd;
}

double spectral_density_value(const SpectralDensity& sd, double omega) {
    const double g2 = sd.gamma * sd.gamma;
    auto lorentzian = [&](double center) {
        const double d = omega - center;
        return sd.lambda * sd.gamma / (g2 + d * d);
    };
    if (sd.kind == SpectralDensity::Kind::Lorentzian) {
        return lorentzian(sd.omega0);
    }
    return lorentzian(sd.omega0 + sd.detuning) + lorentzian(sd.omega0 - sd.detuning);
}

MemoryKernel memory_kernel_from(const SpectralDensity& sd) {
    if (sd.gamma <= 0.0) throw ValidationError("gamma", "must be > 0");
    MemoryKernel kernel;
    if (sd.kind == SpectralDensity::Kind::Lorentzian) {
        kernel.terms.push_back({Complex(sd.lambda, 0.0), Complex(sd.gamma, 0.0)});
    } else {
        // 2*lambda*exp(-gamma t)*cos(detuning t) as a conjugate pair
        kernel.terms.push_back({Complex(sd.lambda, 0.0), Complex(sd.gamma, sd.detuning)});
        kernel.terms.push_back({Complex(sd.lambda, 0.0), Complex(sd.gamma, -sd.detuning)});
    }
    return kernel;
}

MemoryKernel memory_kernel_from(const SystemConfig& cfg) {
    return memory_kernel_from(spectral_density_from(cfg));
}

Complex kernel_value(const MemoryKernel& kernel, double t) {
    Complex g{0.0, 0.0};
    for (const auto& term : kernel.terms) g += term.coeff * std::exp(-term.exponent * t);
    return g;
}

Complex kernel_laplace(const MemoryKernel& kernel, Complex s) {
    Complex out{0.0, 0.0};
    for (const auto& term : kernel.terms) {
        const Complex den = s + term.exponent;
        const double scale = std::max({1.0, std::abs(s), std::abs(term.exponent)});
        if (std::abs(den) < 1e-14 * scale) {
            throw std::domain_error("kernel_laplace: s coincides with a kernel pole");
        }
        out += term.coeff / den;
    }
    return out;
}

AmplitudeState make_amplitude_state(const ComplexVector& c0, const MemoryKernel& kernel) {
    if (c0.size() < 1) throw ValidationError("amplitudes", "need at least one atom");
    if (c0.squaredNorm() > 1.0 + 1e-12) {
        throw ValidationError("amplitudes", "norm must not exceed 1");
    }
    AmplitudeState state;
    state.c = c0;
    state.z = ComplexVector::Zero(static_cast<Eigen::Index>(kernel.terms.size()));
    return state;
}

}  // namespace cavsim
