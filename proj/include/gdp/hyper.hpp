#pragma once

#include <cmath>

#include "gdp/errors.hpp"

namespace gdp {

// Hyper-parameters of the generalized double Pareto family: shape alpha and
// rate eta, both strictly positive. The scale is derived, xi = eta/alpha,
// never stored. alpha = eta = 0 (the improper Normal-Jeffreys limit) is
// rejected here and nowhere evaluated.
struct GdpHyper {
    double alpha;
    double eta;

    GdpHyper(double alpha_, double eta_) : alpha(alpha_), eta(eta_) {
        if (!(alpha > 0.0) || !std::isfinite(alpha))
            throw DataError("GdpHyper: alpha must be finite and > 0");
        if (!(eta > 0.0) || !std::isfinite(eta))
            throw DataError("GdpHyper: eta must be finite and > 0");
    }

    double xi() const { return eta / alpha; }

    static GdpHyper from_scale(double alpha_, double xi_) {
        return GdpHyper(alpha_, xi_ * alpha_);
    }
};

}  // namespace gdp
