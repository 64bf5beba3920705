#pragma once

#include "kobayashi/analytic_disc.hpp"
#include "kobayashi/domain.hpp"

// Closed-form Kobayashi geometry of the unit ball and of balanced convex
// domains. These are reference oracles: the solver never calls them.

namespace kobayashi {

struct BallGeodesicSpec {
    AnalyticDisc disc;  ///< affine slice, precomposed so that disc(0) = z, disc(alpha) = w
    double alpha = 0.0;
};

double ball_distance(const ComplexPoint& z, const ComplexPoint& w);

BallGeodesicSpec ball_geodesic(const ComplexPoint& z, const ComplexPoint& w);

double ball_metric(const ComplexPoint& z, const ComplexVector& x);

/// Minkowski functional of a ball or ellipsoid.
double minkowski(const DomainSpec& domain, const ComplexVector& w);

/// k_D(0, w) = atanh(mu(w)) for balanced convex domains.
double balanced_distance_from_origin(const DomainSpec& domain, const ComplexPoint& w);

/// kappa_D(0; X) = mu(X) for balanced convex domains.
double balanced_metric_at_origin(const DomainSpec& domain, const ComplexVector& x);

}  // namespace kobayashi
