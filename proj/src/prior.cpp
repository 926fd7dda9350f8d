#include "iccv/prior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "iccv/normal.hpp"
#include "iccv/quadrature.hpp"

namespace iccv {

std::string to_string(Tail tail) {
    return tail == Tail::two_sided ? "two-sided" : "upper-one-sided";
}

Prior Prior::point_mass(double theta) {
    if (!std::isfinite(theta)) throw std::invalid_argument("Prior::point_mass: non-finite theta");
    return Prior(Kind::point_mass, theta, 0.0);
}

Prior Prior::uniform(double a, double b) {
    if (!(std::isfinite(a) && std::isfinite(b) && a < b)) {
        throw std::invalid_argument("Prior::uniform: requires finite a < b");
    }
    return Prior(Kind::uniform, a, b);
}

Prior Prior::normal(double mu, double sigma) {
    if (!(std::isfinite(mu) && std::isfinite(sigma) && sigma > 0.0)) {
        throw std::invalid_argument("Prior::normal: requires finite mu and sigma > 0");
    }
    return Prior(Kind::normal, mu, sigma);
}

double Prior::theta() const {
    if (kind_ != Kind::point_mass) throw std::logic_error("Prior::theta: not a point mass");
    return p0_;
}

double Prior::lower() const {
    if (kind_ != Kind::uniform) throw std::logic_error("Prior::lower: not uniform");
    return p0_;
}

double Prior::upper() const {
    if (kind_ != Kind::uniform) throw std::logic_error("Prior::upper: not uniform");
    return p1_;
}

double Prior::mu() const {
    if (kind_ != Kind::normal) throw std::logic_error("Prior::mu: not normal");
    return p0_;
}

double Prior::sigma() const {
    if (kind_ != Kind::normal) throw std::logic_error("Prior::sigma: not normal");
    return p1_;
}

std::string Prior::describe() const {
    switch (kind_) {
        case Kind::point_mass: return "point_mass(" + std::to_string(p0_) + ")";
        case Kind::uniform: return "uniform(" + std::to_string(p0_) + "," + std::to_string(p1_) + ")";
        case Kind::normal: return "normal(" + std::to_string(p0_) + "," + std::to_string(p1_) + ")";
    }
    return "?";
}

namespace {

void check_z(double z, const char* where) {
    if (!(std::isfinite(z) && z >= 0.0)) {
        throw std::invalid_argument(std::string(where) + ": z must be finite and >= 0, got " +
                                    std::to_string(z));
    }
}

// Antiderivative of Phi: integral of Phi(u) du = u Phi(u) + phi(u).
double big_g(double u) {
    return u * std_normal_cdf(u) + std_normal_pdf(u);
}

// Rejection probability of one study at CV z when theta is known.
double reject_given_theta(double theta, double z, Tail tail) {
    double p = 1.0 - std_normal_cdf(z - theta);
    if (tail == Tail::two_sided) p += std_normal_cdf(-z - theta);
    return p;
}

} // namespace

double rejection_prob(const Prior& prior, double z, Tail tail) {
    check_z(z, "rejection_prob");
    switch (prior.kind()) {
        case Prior::Kind::point_mass:
            return reject_given_theta(prior.theta(), z, tail);
        case Prior::Kind::uniform: {
            // Averaging Phi(z - theta) over theta in [a, b] integrates the cdf,
            // which the antiderivative big_g handles exactly.
            const double a = prior.lower();
            const double b = prior.upper();
            const double width = b - a;
            double mass = big_g(z - a) - big_g(z - b);
            if (tail == Tail::two_sided) mass -= big_g(-z - a) - big_g(-z - b);
            return 1.0 - mass / width;
        }
        case Prior::Kind::normal: {
            // Gaussian mixing inflates the variance: theta + Z ~ N(mu, 1 + sigma^2).
            const double s = std::sqrt(1.0 + prior.sigma() * prior.sigma());
            double p = 1.0 - std_normal_cdf((z - prior.mu()) / s);
            if (tail == Tail::two_sided) p += std_normal_cdf((-z - prior.mu()) / s);
            return p;
        }
    }
    throw std::logic_error("rejection_prob: unreachable");
}

double rejection_prob_quadrature(const Prior& prior, double z, Tail tail) {
    check_z(z, "rejection_prob_quadrature");
    const auto integrand = [&](double theta) { return reject_given_theta(theta, z, tail); };
    switch (prior.kind()) {
        case Prior::Kind::point_mass:
            return integrand(prior.theta());
        case Prior::Kind::uniform: {
            const double a = prior.lower();
            const double b = prior.upper();
            return adaptive_simpson(integrand, a, b, 1e-12) / (b - a);
        }
        case Prior::Kind::normal: {
            const double mu = prior.mu();
            const double sd = prior.sigma();
            const auto weighted = [&](double theta) {
                return integrand(theta) * std_normal_pdf((theta - mu) / sd) / sd;
            };
            // Truncation at 10 sigma leaves less than 1e-12 of prior mass outside.
            return adaptive_simpson(weighted, mu - 10.0 * sd, mu + 10.0 * sd, 1e-12);
        }
    }
    throw std::logic_error("rejection_prob_quadrature: unreachable");
}

double subjective_mixture(double prior_term, double posterior_term, double alpha_s) {
    const auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
    if (!in_unit(alpha_s)) {
        throw std::invalid_argument("subjective_mixture: alpha_s must lie in [0,1]");
    }
    if (!in_unit(prior_term) || !in_unit(posterior_term)) {
        throw std::invalid_argument("subjective_mixture: probabilities must lie in [0,1]");
    }
    return alpha_s * prior_term + (1.0 - alpha_s) * posterior_term;
}

} // namespace iccv
