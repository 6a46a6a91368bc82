#pragma once

#include "oco/oracle.hpp"

namespace oco {

struct ProjectionStats {
    int iterations = 0;
    bool closed_form = false;
    std::vector<double> best_trace;  // running best objective per solver iteration
};

// Approximate Euclidean projection in the scaled-polar geometry: returns
// u_hat in sqrt(1-eps) * polar(C) with
//   ||gamma u_hat - w||^2 - inf_u ||gamma u - w||^2 <= delta.
// Closed form when the polar admits one, otherwise the ellipsoid method
// driven by scaled polar separation (one LOO call per separation query).
// The solver is deterministic, so the guarantee holds surely.
Vec project_scaled_polar(CountingOracle& oracle, const Vec& w, double gamma, double eps,
                         double delta, double gamma_bound = -1.0,
                         ProjectionStats* stats = nullptr);

// Approximate maximizer of <u, y> over polar(C), via the same machinery.
SupportResult polar_lin_max(CountingOracle& oracle, const Vec& y, double gap_tol);

// Euclidean projection onto C itself: closed form for balls, otherwise a
// cutting-plane solve whose separation oracle for C is built from linear
// optimization on the polar (itself driven by the LOO for C).
Vec euclidean_project(CountingOracle& oracle, const Vec& w, double tol);

}  // namespace oco
