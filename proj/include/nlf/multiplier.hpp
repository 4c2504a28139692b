#pragma once

#include <optional>

#include "nlf/kernels.hpp"
#include "nlf/types.hpp"

namespace nlf {

/// m_L(xi) = int 4 sin^2(xi.z/2) L(z) dz. The oscillatory part is integrated
/// up to |z| = cutoff_phase / |xi|; beyond that sin^2 is replaced by its mean
/// 1/2 and the neglected cosine term goes into the error estimate.
FormValue multiplier(const Profile& L, const Vec& xi, const QuadratureBudget& budget = {},
                     double cutoff_phase = 256.0);

/// 2 (||L||_1 - int cos(xi.z) L(z) dz) when the profile carries both pieces.
std::optional<double> multiplier_closed_form(const Profile& L, const Vec& xi);

}  // namespace nlf
