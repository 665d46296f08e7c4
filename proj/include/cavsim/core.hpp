// core.hpp — System configuration, spectral densities, and exponential memory
// kernels shared by every solver. Units: omega0 defines the frequency scale,
// all rates are dimensionless multiples of it.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "cavsim/errors.hpp"

namespace cavsim {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr Complex kImag{0.0, 1.0};

enum class Topology { AllToAll, Chain };
enum class Cavity { SingleLorentzian, DoubleDetuned };

// Atom-ensemble plus reservoir parameters. Immutable by convention once
// validated; solvers take it by const reference.
struct SystemConfig {
    int n_atoms = 1;
    double omega0 = 1.0;     // transition frequency, the unit of all rates
    double lambda = 0.1;     // cavity coupling strength
    double gamma = 0.1;      // Lorentzian spectral width
    double lambda_dd = 0.1;  // direct dipole-dipole coupling between atoms
    double detuning = 0.0;   // cavity detuning (double-cavity configurations)
    Topology topology = Topology::AllToAll;
    Cavity cavity = Cavity::SingleLorentzian;

    void validate() const;
};

// ------------------------------ spectral density -----------------------------

struct SpectralDensity {
    enum class Kind { Lorentzian, DoubleLorentzian };
    Kind kind = Kind::Lorentzian;
    double lambda = 0.1;
    double gamma = 0.1;
    double omega0 = 1.0;
    double detuning = 0.0;
};

SpectralDensity spectral_density_from(const SystemConfig& cfg);

// J(omega): one Lorentzian centered on omega0, or two centered on
// omega0 +/- detuning. Total on real omega, nonnegative.
double spectral_density_value(const SpectralDensity& sd, double omega);

// ------------------------------- memory kernel -------------------------------

// G(t) = sum_k coeff_k * exp(-exponent_k * t). Exponents always have positive
// real part so every kernel decays.
struct MemoryKernel {
    struct Term {
        Complex coeff;
        Complex exponent;
    };
    std::vector<Term> terms;
};

// Lorentzian -> one term (lambda, gamma). Double cavity -> the cosine kernel
// split into its two conjugate exponentials (lambda, gamma +/- i*detuning).
MemoryKernel memory_kernel_from(const SpectralDensity& sd);
MemoryKernel memory_kernel_from(const SystemConfig& cfg);

Complex kernel_value(const MemoryKernel& kernel, double t);

// Laplace transform sum_k coeff_k / (s + exponent_k). Throws std::domain_error
// when s sits on a kernel pole.
Complex kernel_laplace(const MemoryKernel& kernel, Complex s);

// ------------------------------ amplitude state ------------------------------

// Single-excitation sector state: excited-state amplitudes c_i plus one
// convolution auxiliary per kernel term,
//   z_k(t) = coeff_k * int_0^t exp(-exponent_k (t - t1)) c_+(t1) dt1.
// The total polarisation c_+ is always derived, never stored.
struct AmplitudeState {
    ComplexVector c;
    ComplexVector z;
    Complex ground = 0.0;  // ground-manifold amplitude, constant in time

    Complex c_plus() const { return c.sum(); }
    double excited_norm() const { return c.squaredNorm(); }
};

AmplitudeState make_amplitude_state(const ComplexVector& c0, const MemoryKernel& kernel);

}  // namespace cavsim
