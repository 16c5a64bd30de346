#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mfgpdi/types.hpp"

namespace mfgpdi {

/// A subgradient of H(x, .) at p together with the control data that produced it.
struct SubgradientChoice {
    Vec2 drift = Vec2::Zero();  // element of the subdifferential of H(x, .) at p
    double cost = 0.0;          // running cost f(x, alpha*) of a maximising control
    double hamiltonian_value = 0.0;
};

/// H(x, p) = sup over controls alpha of b(x, alpha) . p - f(x, alpha).
///
/// Implementations are convex and Lipschitz in p:
///   |H(x,p)| <= c3 (|p| + 1),  c3 = max(drift_bound, cost_bound)
///   |H(x,p) - H(x,q)| <= drift_bound |p - q|
/// and select() always returns a drift of norm at most drift_bound.
class ControlHamiltonian {
public:
    virtual ~ControlHamiltonian() = default;

    [[nodiscard]] virtual double eval(const Point& x, const Vec2& p) const = 0;
    [[nodiscard]] virtual SubgradientChoice select(const Point& x, const Vec2& p) const = 0;
    /// sup |b(x, alpha)|
    [[nodiscard]] virtual double drift_bound() const = 0;
    /// sup |f(x, alpha)|
    [[nodiscard]] virtual double cost_bound() const = 0;
};

/// H(x, p) = |p|, controls in the closed unit ball, no running cost.
class EikonalHamiltonian final : public ControlHamiltonian {
public:
    /// Gradients shorter than this are treated as zero by select().
    static constexpr double zero_threshold = 1e-14;

    [[nodiscard]] double eval(const Point& x, const Vec2& p) const override;
    /// p/|p| for p != 0, the zero vector otherwise.
    [[nodiscard]] SubgradientChoice select(const Point& x, const Vec2& p) const override;
    [[nodiscard]] double drift_bound() const override { return 1.0; }
    [[nodiscard]] double cost_bound() const override { return 0.0; }
};

/// Maximum over a finite list of controls. Ties go to the lowest index.
class FiniteControlHamiltonian final : public ControlHamiltonian {
public:
    using DriftFn = std::function<Vec2(const Point& x, const Vec2& control)>;
    using CostFn = std::function<double(const Point& x, const Vec2& control)>;

    /// drift_bound and cost_bound must bound |b| and |f| over the domain.
    FiniteControlHamiltonian(std::vector<Vec2> controls, DriftFn drift, CostFn cost,
                             double drift_bound, double cost_bound);

    /// b(x, alpha) = alpha, f = 0; bounds computed from the control list.
    static FiniteControlHamiltonian linear(std::vector<Vec2> controls);

    [[nodiscard]] double eval(const Point& x, const Vec2& p) const override;
    [[nodiscard]] SubgradientChoice select(const Point& x, const Vec2& p) const override;
    [[nodiscard]] double drift_bound() const override { return drift_bound_; }
    [[nodiscard]] double cost_bound() const override { return cost_bound_; }

    [[nodiscard]] const std::vector<Vec2>& controls() const { return controls_; }
    [[nodiscard]] Vec2 drift(const Point& x, std::size_t control) const;
    [[nodiscard]] double cost(const Point& x, std::size_t control) const;

private:
    std::vector<Vec2> controls_;
    DriftFn drift_;
    CostFn cost_;
    double drift_bound_;
    double cost_bound_;
};

/// True iff choice.hamiltonian_value matches H(x, p) and
/// H(x, q) >= H(x, p) + drift . (q - p) - 1e-10 for every probe q.
[[nodiscard]] bool verify_subgradient(const ControlHamiltonian& h, const Point& x, const Vec2& p,
                                      const SubgradientChoice& choice, std::span<const Vec2> probes);

} // namespace mfgpdi
