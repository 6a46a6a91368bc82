#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "oco/body.hpp"

namespace oco {

// Outcome of a separation query: either the point is inside, or a hyperplane
// c with <c, query> >= <c, y> for all y in the queried set (up to tol).
struct SeparationResult {
    bool inside;
    std::optional<Vec> hyperplane;  // present iff not inside
};

// Wraps a Body and counts oracle traffic. One instance per experiment run,
// confined to that run's thread; counters are plain integers.
class CountingOracle {
  public:
    explicit CountingOracle(std::shared_ptr<const Body> body) : body_(std::move(body)) {}

    const Body& body() const { return *body_; }
    std::uint64_t loo_calls() const { return loo_calls_; }
    std::uint64_t sep_calls() const { return sep_calls_; }

    Vec lin_min(const Vec& g) {
        ++loo_calls_;
        return body_->lin_min(g);
    }

    SupportResult support(const Vec& w) {
        ++loo_calls_;
        return oco::support(*body_, w);
    }

    // Separation for the polar set: y is in the polar iff the support of the
    // body at y is <= 1; the separating direction is the support argmax,
    // obtained from a single lin_min call.
    SeparationResult separate_polar(const Vec& y, double tol) {
        ++sep_calls_;
        auto s = support(y);
        if (s.value <= 1.0 + tol) return {true, std::nullopt};
        return {false, std::move(s.argmax)};
    }

    // Same for scale * polar (scale > 0): inside iff support(y) <= scale + tol.
    SeparationResult separate_scaled_polar(const Vec& y, double scale, double tol) {
        ++sep_calls_;
        auto s = support(y);
        if (s.value <= scale + tol) return {true, std::nullopt};
        return {false, std::move(s.argmax)};
    }

  private:
    std::shared_ptr<const Body> body_;
    std::uint64_t loo_calls_ = 0;
    std::uint64_t sep_calls_ = 0;
};

}  // namespace oco
