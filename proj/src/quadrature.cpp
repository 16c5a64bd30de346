#include "mfgpdi/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "mfgpdi/errors.hpp"

namespace mfgpdi {

namespace {

void add_orbit3(QuadratureRule& rule, double a, double b, double w)
{
    // permutations of (a, b, b)
    rule.points.push_back({a, b, b});
    rule.points.push_back({b, a, b});
    rule.points.push_back({b, b, a});
    rule.weights.insert(rule.weights.end(), 3, w);
}

QuadratureRule conical_product(int degree)
{
    // Duffy map (s, t) -> (s, (1-s) t) carries the Jacobian (1-s), a degree
    // one factor in s, hence n points must integrate degree + 1 exactly.
    const int n = (degree + 2) / 2 + 1;
    std::vector<double> xs;
    std::vector<double> ws;
    gauss_legendre_unit(n, xs, ws);
    QuadratureRule rule;
    rule.degree = degree;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double s = xs[static_cast<std::size_t>(i)];
            const double t = xs[static_cast<std::size_t>(j)];
            const double l1 = s;
            const double l2 = (1.0 - s) * t;
            rule.points.push_back({1.0 - l1 - l2, l1, l2});
            // reference area 1/2 normalised away
            rule.weights.push_back(2.0 * ws[static_cast<std::size_t>(i)] *
                                   ws[static_cast<std::size_t>(j)] * (1.0 - s));
        }
    }
    return rule;
}

} // namespace

void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    if (n < 1) {
        throw InvalidArgument("gauss_legendre_unit: need at least one point");
    }
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // recompute derivative at the converged root
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
        weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
}

QuadratureRule triangle_rule(int degree)
{
    if (degree < 0) {
        throw InvalidArgument("triangle_rule: degree must be non-negative");
    }
    QuadratureRule rule;
    if (degree <= 1) {
        rule.degree = 1;
        rule.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        rule.weights.push_back(1.0);
        return rule;
    }
    if (degree == 2) {
        rule.degree = 2;
        add_orbit3(rule, 2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0);
        return rule;
    }
    if (degree <= 4) {
        rule.degree = 4;
        add_orbit3(rule, 0.10810301816807022736, 0.44594849091596488632, 0.22338158967801146570);
        add_orbit3(rule, 0.81684757298045851308, 0.091576213509770743460, 0.10995174365532186764);
        return rule;
    }
    if (degree == 5) {
        rule.degree = 5;
        rule.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        rule.weights.push_back(0.225);
        add_orbit3(rule, 0.059715871789769820459, 0.47014206410511508977, 0.13239415278850618074);
        add_orbit3(rule, 0.79742698535308732240, 0.10128650732345633880, 0.12593918054482715260);
        return rule;
    }
    return conical_product(degree);
}

} // namespace mfgpdi
