#pragma once

#include <string>

namespace iccv {

// Alternative hypothesis shape. Two-sided tests reject on |X| >= z, upper
// one-sided tests on X >= z.
enum class Tail { two_sided, upper_one_sided };

std::string to_string(Tail tail);

// Researcher's belief over the standardized effect theta: a point mass, a
// uniform on [a, b], or a normal with mean mu and sd sigma > 0.
class Prior {
public:
    enum class Kind { point_mass, uniform, normal };

    static Prior point_mass(double theta);
    static Prior uniform(double a, double b);
    static Prior normal(double mu, double sigma);

    Kind kind() const { return kind_; }
    bool is_normal() const { return kind_ == Kind::normal; }

    double theta() const;  // point mass location
    double lower() const;  // uniform a
    double upper() const;  // uniform b
    double mu() const;     // normal mean
    double sigma() const;  // normal sd

    std::string describe() const;

private:
    Prior(Kind kind, double p0, double p1) : kind_(kind), p0_(p0), p1_(p1) {}

    Kind kind_;
    double p0_;
    double p1_;
};

// Prior-integrated probability that the next latent statistic rejects at
// critical value z: the integral of 1 - Phi(z - theta) + Phi(-z - theta)
// (two-sided; the last term drops for the one-sided tail) against the prior,
// evaluated in closed form per prior kind. Strictly decreasing in z.
// Throws std::invalid_argument when z < 0.
double rejection_prob(const Prior& prior, double z, Tail tail);

// Same integral by adaptive quadrature (normal priors truncated at 10 sigma,
// absolute tolerance 1e-10). Independent oracle for the closed forms above;
// point-mass priors reduce to evaluating the integrand at the mass point.
double rejection_prob_quadrature(const Prior& prior, double z, Tail tail);

// Convex combination alpha_s * prior_term + (1 - alpha_s) * posterior_term of
// two probabilities; alpha_s indexes researcher sophistication (1 = never
// updates, 0 = fully Bayesian). All three arguments must lie in [0, 1].
double subjective_mixture(double prior_term, double posterior_term, double alpha_s);

} // namespace iccv
