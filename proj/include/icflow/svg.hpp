#pragma once

#include <array>
#include <string>
#include <vector>

#include "icflow/curve.hpp"

namespace icflow {

/// Planar picture of a point at radius r and angle theta: the identity polar
/// map for K = 0, the Poincare disk (Euclidean radius tanh(r/2)) for K = -1,
/// and orthographic projection from the pole (radius sin r) for K = +1.
std::array<double, 2> project(const SpaceForm& sf, double r, double theta);

struct SvgCurve {
    const RadialCurve* curve;
    std::string label;
};

/// SVG 1.1 overlay of curves sharing one space form. Colours run from the
/// first to the last curve; the model boundary is drawn for K != 0.
std::string overlay_svg(const std::vector<SvgCurve>& curves, const std::string& title);

}  // namespace icflow
