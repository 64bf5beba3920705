#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kobayashi/analytic_disc.hpp"
#include "kobayashi/domain.hpp"
#include "kobayashi/lempert.hpp"

namespace kobayashi {

enum class BoundId { NA, NT, BB_LOWER, BB_UPPER, C2, C3, COMBINED, THGEN, D1, D2, CRU };

std::string bound_name(BoundId id);

/// Geometry of a pair: depths, chord length and its normal parts in the frame of z
/// (xN_w is the complex normal part in the frame of w). Geodesic fields are zero
/// until filled from a solved disc; residual is NaN when not computed.
struct PairMeta {
    double delta_z = 0.0, delta_w = 0.0;
    double dist = 0.0;
    double xn = 0.0, xN = 0.0, xN_w = 0.0;
    double eps = 0.0;  ///< xN / dist
    double diam = 0.0;
    double residual = std::numeric_limits<double>::quiet_NaN();
    double depth = 0.0;  ///< max of delta_D over the geodesic
};

PairMeta pair_meta(const DomainSpec& domain, const ComplexPoint& z, const ComplexPoint& w);

/// One inequality instance. margin >= 0 exactly when the bound holds:
/// lhs - rhs for lower bounds on lhs, rhs - lhs for upper bounds.
/// CRU rows are evidence only and carry margin = lhs / rhs.
struct BoundReport {
    BoundId id = BoundId::NA;
    ComplexPoint z, w;
    double lhs = 0.0, rhs = 0.0, margin = 0.0, constant_used = 0.0;
    PairMeta meta;
    bool applicable = true;
    bool converged = true;

    bool holds(double slack = 1e-12) const { return !applicable || margin >= -slack; }
};

/// Values along a solved disc, sampled at P(0) and the interior grid of the
/// polynomial parameter.
struct GeodesicProfile {
    double diam = 0.0;
    double max_sqrt_delta = 0.0;  ///< max (delta_D o phi)^{1/2}
    double max_s = 0.0;           ///< max s(delta_D o phi), s(x) = -sqrt(x) log x
    double d1_q = 0.0;            ///< max (delta_D o phi)^{1/2} + |phi'|_N / |phi'|
    double max_derivative = 0.0;  ///< max |phi'|
};
GeodesicProfile geodesic_profile(const DomainSpec& domain, const AnalyticDisc& disc);

/// s(x) = -sqrt(x) log x.
double s_function(double x);

/// max(log(1 + x1), log(1 + x2)) - log(1 + (x1 + x2) / 2), nonnegative for x1, x2 >= 0.
double max_average_gap(double x1, double x2);

// Single-pair bounds. k is the distance estimate (solver or oracle) for (z, w).
BoundReport bound_upper_na(const PairMeta& m, const ComplexPoint& z, const ComplexPoint& w, double k);
BoundReport bound_lower_nt(const PairMeta& m, const ComplexPoint& z, const ComplexPoint& w, double k, double c);
std::pair<BoundReport, BoundReport> bound_band_bb(const PairMeta& m, const ComplexPoint& z, const ComplexPoint& w,
                                                  double k, double big_c);
BoundReport bound_lower_c2(const PairMeta& m, const ComplexPoint& z, const ComplexPoint& w, double k, double c);
/// Applicable when |(z-w)_N| >= eps |z-w|.
BoundReport bound_lower_c3(const PairMeta& m, const ComplexPoint& z, const ComplexPoint& w, double k, double c,
                           double eps);
BoundReport combined_lower(const PairMeta& m, const ComplexPoint& z, const ComplexPoint& w, double k, double c);
/// |(z-w)_N| <= C |z-w| diam(phi); lhs = |(z-w)_N|, rhs = C |z-w| diam.
BoundReport thmgen_ratio(const PairMeta& m, const ComplexPoint& z, const ComplexPoint& w, double big_c);
/// First: c (delta^{1/2} + |phi'|_N / |phi'|) <= diam on the grid.
/// Second: diam <= C max s(delta_D o phi).
std::pair<BoundReport, BoundReport> diam_bounds(const PairMeta& m, const GeodesicProfile& g, const ComplexPoint& z,
                                                const ComplexPoint& w, double c, double big_c);
/// diam, max (delta_D o phi)^{1/2}, max |phi'| and their ratios. Never asserted.
struct ConjectureProbe {
    double diam = 0.0, sqrt_depth = 0.0, max_derivative = 0.0;
    double diam_over_depth = 0.0, diam_over_derivative = 0.0, depth_over_derivative = 0.0;
};
ConjectureProbe conjecture_probe(const GeodesicProfile& g);

/// Closed-form distance for the ball and for ellipsoids (linear image of the ball).
std::optional<double> oracle_distance(const DomainSpec& domain, const ComplexPoint& z, const ComplexPoint& w);
/// Closed-form geodesic for the ball and ellipsoids.
std::optional<AnalyticDisc> oracle_geodesic(const DomainSpec& domain, const ComplexPoint& z, const ComplexPoint& w);

struct CampaignConfig {
    DomainSpec domain = DomainSpec::ball(2);
    ComplexPoint base;  ///< boundary point p; empty means e_1
    std::vector<double> decades{1e-2, 1e-3, 1e-4};
    double eps = 0.5;
    int pairs = 30;
    std::uint64_t seed = 1;
    SolverConfig solver;
    bool use_oracle = false;  ///< closed-form distances and geodesics replace the solver
    int threads = 0;          ///< 0: LEMPERT_THREADS, else hardware concurrency

    void validate() const;
    nlohmann::json to_json() const;
};

struct Sample {
    int decade = 0, index = 0;
    double delta_target = 0.0;
    ComplexPoint z, w;
    bool ok = false;        ///< usable for fits
    std::string error;
    bool converged = false;
    bool from_seed = false;
    double k = 0.0;
    std::string provenance;  ///< "solver" or "oracle"
    double lower = 0.0;      ///< half-plane lower bound
    double upper = 0.0;      ///< affine-disc upper bound
    PairMeta meta;
    GeodesicProfile profile;
};

/// Empirical extremum with the position of the witness sample.
struct Fitted {
    double value = 0.0;
    int witness = -1;
};

/// Lower-bound constants are infima of the admissible constant, upper-bound
/// constants suprema of the ratio, over usable samples.
struct Constants {
    Fitted nt_c, bb_C, c2_c, c3_c, combined_c, thgen_C, d1_c, d2_c, d2_C, depth;
    int used = 0;
    nlohmann::json to_json() const;
};

Constants fit_constants(const std::vector<Sample>& samples, double eps);

/// Every bound evaluated on every usable sample with the given constants.
std::vector<BoundReport> bound_reports(const std::vector<Sample>& samples, const Constants& c, double eps);

struct CampaignReport {
    CampaignConfig cfg;
    std::vector<Sample> samples;
    Constants fitted;
    std::vector<Constants> per_decade;
    std::vector<BoundReport> reports;
    int failures = 0;
    int sandwich_violations = 0;  ///< lower <= k <= upper and k <= NA rhs, over converged samples

    double failure_fraction() const;
    /// No sandwich violations and failure fraction <= 10%.
    bool passed() const;
    nlohmann::json summary() const;
    std::string csv() const;
};

CampaignReport run_campaign(const CampaignConfig& cfg);

/// Header of the campaign CSV for dimension d.
std::string csv_header(int d);

/// Writes through a temporary file in the same directory and renames it into place.
void write_atomic(const std::string& path, const std::string& contents);

}  // namespace kobayashi
