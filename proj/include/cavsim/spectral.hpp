// spectral.hpp — Laplace-domain rate analysis for the double detuned cavity:
// characteristic cubic, Cardano discriminant, and Markovianity region maps.

#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "cavsim/core.hpp"

namespace cavsim::spectral {

// Monic characteristic cubic s^3 + a2 s^2 + a1 s + a0 of the single-atom
// double-cavity dynamics, with its three (possibly complex) roots.
struct CubicRates {
    double a0 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    std::array<Complex, 3> roots{};

    bool has_conjugate_pair(double tol = 1e-9) const;
};

// Roots of s^3 + 2 gamma s^2 + (delta^2 + gamma^2 + 2 lambda) s + 2 lambda gamma
// via the closed-form Cardano solution, each polished by one Newton step.
// Roots are sorted by (real, imaginary) and exact conjugate pairing is
// enforced for the complex pair.
CubicRates cubic_rates(double delta, double gamma, double lambda);

// Cardano discriminant combination
//   D0 = (3 d^2 - g^2 + 6 l)^3 + (9 d^2 g + g^3 - 9 g l)^2.
// Negative: all rates real (Markovian relaxation). Positive: a conjugate pair
// exists and the population oscillates (non-Markovian).
double cardano_discriminant(double delta, double gamma, double lambda);

enum class Regime : unsigned char { Markovian, NonMarkovian, Boundary };

// Classification with an epsilon band around zero, relative to the local
// magnitude of the two discriminant terms.
Regime classify_discriminant(double delta, double gamma, double lambda);

struct DiscriminantMap {
    RealVector delta_axis;
    RealVector gamma_axis;
    RealMatrix values;  // values(i, j) at (delta_axis[i], gamma_axis[j])
    Eigen::Matrix<unsigned char, Eigen::Dynamic, Eigen::Dynamic> classification;
    double lambda = 0.0;

    Regime regime_at(Eigen::Index i, Eigen::Index j) const {
        return static_cast<Regime>(classification(i, j));
    }
};

struct AxisRange {
    double lo = 0.0;
    double hi = 0.0;
};

DiscriminantMap discriminant_map(AxisRange delta_range, AxisRange gamma_range, double lambda,
                                 int resolution);

// CSV heatmap export: `# delta,gamma,discriminant,class` with one row per
// cell, class in {M, NM, B}, delta outer / gamma inner.
void write_csv(const DiscriminantMap& map, std::ostream& out);
std::string regime_token(Regime regime);

}  // namespace cavsim::spectral
