#include "mfgpdi/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfgpdi/errors.hpp"

namespace mfgpdi {

double EikonalHamiltonian::eval(const Point&, const Vec2& p) const
{
    return p.norm();
}

SubgradientChoice EikonalHamiltonian::select(const Point&, const Vec2& p) const
{
    SubgradientChoice choice;
    const double norm = p.norm();
    choice.hamiltonian_value = norm;
    if (norm >= zero_threshold) {
        choice.drift = p / norm;
    }
    return choice;
}

FiniteControlHamiltonian::FiniteControlHamiltonian(std::vector<Vec2> controls, DriftFn drift,
                                                   CostFn cost, double drift_bound,
                                                   double cost_bound)
    : controls_(std::move(controls)),
      drift_(std::move(drift)),
      cost_(std::move(cost)),
      drift_bound_(drift_bound),
      cost_bound_(cost_bound)
{
    if (controls_.empty()) {
        throw InvalidArgument("FiniteControlHamiltonian: control list is empty");
    }
    if (!drift_ || !cost_) {
        throw InvalidArgument("FiniteControlHamiltonian: drift and cost functions are required");
    }
}

FiniteControlHamiltonian FiniteControlHamiltonian::linear(std::vector<Vec2> controls)
{
    double bound = 0.0;
    for (const auto& c : controls) {
        bound = std::max(bound, c.norm());
    }
    return FiniteControlHamiltonian(
        std::move(controls), [](const Point&, const Vec2& a) { return a; },
        [](const Point&, const Vec2&) { return 0.0; }, bound, 0.0);
}

Vec2 FiniteControlHamiltonian::drift(const Point& x, std::size_t control) const
{
    return drift_(x, controls_[control]);
}

double FiniteControlHamiltonian::cost(const Point& x, std::size_t control) const
{
    return cost_(x, controls_[control]);
}

double FiniteControlHamiltonian::eval(const Point& x, const Vec2& p) const
{
    return select(x, p).hamiltonian_value;
}

SubgradientChoice FiniteControlHamiltonian::select(const Point& x, const Vec2& p) const
{
    SubgradientChoice best;
    best.hamiltonian_value = -std::numeric_limits<double>::infinity();
    for (const auto& alpha : controls_) {
        const Vec2 b = drift_(x, alpha);
        const double f = cost_(x, alpha);
        const double value = b.dot(p) - f;
        // strict comparison keeps the lowest index among ties
        if (value > best.hamiltonian_value) {
            best.drift = b;
            best.cost = f;
            best.hamiltonian_value = value;
        }
    }
    return best;
}

bool verify_subgradient(const ControlHamiltonian& h, const Point& x, const Vec2& p,
                        const SubgradientChoice& choice, std::span<const Vec2> probes)
{
    constexpr double tol = 1e-10;
    const double value = h.eval(x, p);
    if (std::abs(value - choice.hamiltonian_value) > tol) {
        return false;
    }
    for (const auto& q : probes) {
        if (h.eval(x, q) < value + choice.drift.dot(q - p) - tol) {
            return false;
        }
    }
    return true;
}

} // namespace mfgpdi
