// spectral.cpp — Cardano cubic roots and discriminant maps.

#include "cavsim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace cavsim::spectral {

namespace {

// All three roots of the monic cubic s^3 + a2 s^2 + a1 s + a0 (real
// coefficients) in complex arithmetic.
std::array<Complex, 3> cardano_roots(double a2, double a1, double a0) {
    const double p = a1 - a2 * a2 / 3.0;
    const double q = (2.0 * a2 * a2 * a2 - 9.0 * a2 * a1 + 27.0 * a0) / 27.0;
    const double disc = 0.25 * q * q + p * p * p / 27.0;

    std::array<Complex, 3> roots;
    const Complex sq = std::sqrt(Complex(disc, 0.0));
    // Pick the larger-magnitude cube-root argument to dodge cancellation.
    Complex u3 = -0.5 * q + sq;
    if (std::abs(-0.5 * q - sq) > std::abs(u3)) u3 = -0.5 * q - sq;

    if (std::abs(u3) == 0.0) {
        roots.fill(Complex(-a2 / 3.0, 0.0));
        return roots;
    }
    const Complex u = std::pow(u3, 1.0 / 3.0);
    const Complex omega(-0.5, 0.5 * std::sqrt(3.0));
    Complex w = u;
    for (int k = 0; k < 3; ++k) {
        roots[k] = w - p / (3.0 * w) - a2 / 3.0;
        w *= omega;
    }

    // One Newton polish per root on the original cubic.
    for (auto& s : roots) {
        for (int it = 0; it < 2; ++it) {
            const Complex f = ((s + a2) * s + a1) * s + a0;
            const Complex df = (3.0 * s + 2.0 * a2) * s + a1;
            if (std::abs(df) < 1e-300) break;
            s -= f / df;
        }
    }
    return roots;
}

void canonicalize(std::array<Complex, 3>& roots) {
    double scale = 1.0;
    for (const auto& r : roots) scale = std::max(scale, std::abs(r));
    const double tol = 1e-9 * scale;

    int n_complex = 0;
    for (const auto& r : roots) {
        if (std::abs(r.imag()) > tol) ++n_complex;
    }
    if (n_complex < 2) {
        for (auto& r : roots) r = Complex(r.real(), 0.0);
    } else {
        // Real coefficients: snap the most-real root and pair the others as
        // exact conjugates.
        std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
            return std::abs(a.imag()) < std::abs(b.imag());
        });
        roots[0] = Complex(roots[0].real(), 0.0);
        const Complex pair = 0.5 * (roots[1] + std::conj(roots[2]));
        roots[1] = pair;
        roots[2] = std::conj(pair);
    }
    std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

}  // namespace

bool CubicRates::has_conjugate_pair(double tol) const {
    double scale = 1.0;
    for (const auto& r : roots) scale = std::max(scale, std::abs(r));
    for (const auto& r : roots) {
        if (std::abs(r.imag()) > tol * scale) return true;
    }
    return false;
}

CubicRates cubic_rates(double delta, double gamma, double lambda) {
    if (gamma <= 0.0) throw ValidationError("gamma", "must be > 0");
    if (lambda < 0.0) throw ValidationError("lambda", "must be >= 0");

    CubicRates rates;
    rates.a2 = 2.0 * gamma;
    rates.a1 = delta * delta + gamma * gamma + 2.0 * lambda;
    rates.a0 = 2.0 * lambda * gamma;
    rates.roots = cardano_roots(rates.a2, rates.a1, rates.a0);
    canonicalize(rates.roots);
    return rates;
}

double cardano_discriminant(double delta, double gamma, double lambda) {
    const double d2 = delta * delta;
    const double cube = 3.0 * d2 - gamma * gamma + 6.0 * lambda;
    const double square = 9.0 * d2 * gamma + gamma * gamma * gamma - 9.0 * gamma * lambda;
    return cube * cube * cube + square * square;
}

Regime classify_discriminant(double delta, double gamma, double lambda) {
    const double d2 = delta * delta;
    const double cube = 3.0 * d2 - gamma * gamma + 6.0 * lambda;
    const double square = 9.0 * d2 * gamma + gamma * gamma * gamma - 9.0 * gamma * lambda;
    const double value = cube * cube * cube + square * square;
    const double local = std::abs(cube * cube * cube) + square * square;
    const double eps = 1e-12 * local;
    if (value > eps) return Regime::NonMarkovian;
    if (value < -eps) return Regime::Markovian;
    return Regime::Boundary;
}

DiscriminantMap discriminant_map(AxisRange delta_range, AxisRange gamma_range, double lambda,
                                 int resolution) {
    auto check_range = [](const char* name, const AxisRange& r) {
        if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) {
            throw ValidationError(name, "range must be finite");
        }
        if (r.lo <= 0.0 || r.hi <= r.lo) {
            throw ValidationError(name, "range must be positive and increasing");
        }
    };
    check_range("delta_range", delta_range);
    check_range("gamma_range", gamma_range);
    if (resolution < 2) throw ValidationError("resolution", "must be >= 2 per axis");
    if (!std::isfinite(lambda) || lambda < 0.0) {
        throw ValidationError("lambda", "must be finite and >= 0");
    }

    DiscriminantMap map;
    map.lambda = lambda;
    map.delta_axis = RealVector::LinSpaced(resolution, delta_range.lo, delta_range.hi);
    map.gamma_axis = RealVector::LinSpaced(resolution, gamma_range.lo, gamma_range.hi);
    map.values.resize(resolution, resolution);
    map.classification.resize(resolution, resolution);
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            const double d = map.delta_axis[i];
            const double g = map.gamma_axis[j];
            map.values(i, j) = cardano_discriminant(d, g, lambda);
            map.classification(i, j) =
                static_cast<unsigned char>(classify_discriminant(d, g, lambda));
        }
    }
    return map;
}

std::string regime_token(Regime regime) {
    switch (regime) {
        case Regime::Markovian: return "M";
        case Regime::NonMarkovian: return "NM";
        case Regime::Boundary: return "B";
    }
    return "?";
}

void write_csv(const DiscriminantMap& map, std::ostream& out) {
    out << "# delta,gamma,discriminant,class\n";
    out << "# row-major: delta outer, gamma inner\n";
    char buf[128];
    for (Eigen::Index i = 0; i < map.delta_axis.size(); ++i) {
        for (Eigen::Index j = 0; j < map.gamma_axis.size(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,", map.delta_axis[i],
                          map.gamma_axis[j], map.values(i, j));
            out << buf << regime_token(map.regime_at(i, j)) << '\n';
        }
    }
}

}  // namespace cavsim::spectral
