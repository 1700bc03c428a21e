#include "pivotfuse/soil.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "pivotfuse/errors.hpp"

namespace pivotfuse {

void SoilParams::validate() const {
    if (!(theta_r >= 0.0 && theta_r < theta_s && theta_s <= 1.0))
        throw DomainError("soil parameters require 0 <= theta_r < theta_s <= 1");
    if (!(K_s > 0.0)) throw DomainError("soil parameter K_s must be > 0");
    if (!(alpha > 0.0)) throw DomainError("soil parameter alpha must be > 0");
    if (!(n > 1.0)) throw DomainError("soil parameter n must be > 1");
}

SoilParams loam_soil() { return {0.430, 0.0780, 2.889e-6, 3.60, 1.56}; }

SoilParams sandy_clay_loam_soil() { return {0.410, 0.090, 7.222e-7, 1.90, 1.31}; }

void FeddesParams::validate() const {
    const std::array<double, 4> v{h1, h2, h3, h_w};
    const bool ascending = std::is_sorted(v.begin(), v.end());
    const bool descending = std::is_sorted(v.rbegin(), v.rend());
    if (!(ascending || descending))
        throw DomainError("Feddes heads must form a monotone bracket");
    if (!(L > 0.0)) throw DomainError("rooting depth L must be > 0");
}

void CropWeather::validate() const {
    if (!(K_c >= 0.0 && PET >= 0.0 && LAI >= 0.0))
        throw DomainError("crop/weather values must be nonnegative");
}

double water_content(double h, const SoilParams& p) {
    p.validate();
    if (h >= 0.0) return p.theta_s;
    const double m = 1.0 - 1.0 / p.n;
    const double an = std::pow(-p.alpha * h, p.n);
    return p.theta_r + (p.theta_s - p.theta_r) * std::pow(1.0 / (1.0 + an), m);
}

double hydraulic_conductivity(double h, const SoilParams& p) {
    p.validate();
    if (h >= 0.0) return p.K_s;
    const double m = (p.n - 1.0) / p.n;
    const double an = std::pow(-p.alpha * h, p.n);
    const double se = std::pow(1.0 + an, -m);      // effective saturation
    const double inner = std::pow(se, p.n / (p.n - 1.0));  // Se^(1/m)
    const double bracket = 1.0 - std::pow(1.0 - inner, m);
    const double k = p.K_s * std::sqrt(se) * bracket * bracket;
    // keep K strictly positive even when the dry-limit bracket underflows
    return std::max(k, std::numeric_limits<double>::min());
}

double capillary_capacity(double h, const SoilParams& p) {
    p.validate();
    if (h >= 0.0) return kSaturatedCapacityFloor;
    const double an1 = std::pow(-p.alpha * h, p.n - 1.0);
    const double an = an1 * (-p.alpha * h);
    return (p.theta_s - p.theta_r) * p.alpha * p.n * (1.0 - 1.0 / p.n) * an1 *
           std::pow(1.0 + an, -(2.0 - 1.0 / p.n));
}

double stress_factor(double h, const FeddesParams& f) {
    f.validate();
    // canonicalize to ascending heads: uptake zero outside [lo0, hi0],
    // optimal between the inner pair, linear on the two ramps
    std::array<double, 4> b{f.h1, f.h2, f.h3, f.h_w};
    std::sort(b.begin(), b.end());
    if (h <= b[0] || h >= b[3]) return 0.0;
    if (h >= b[1] && h <= b[2]) return 1.0;
    if (h < b[1]) return (h - b[0]) / (b[1] - b[0]);
    return (b[3] - h) / (b[3] - b[2]);
}

double sink_rate(double h, double depth_below_surface, const FeddesParams& f,
                 const CropWeather& cw, bool optimum_uptake) {
    f.validate();
    cw.validate();
    if (depth_below_surface > f.L) return 0.0;
    const double etp = cw.K_c * cw.PET;                 // potential evapotranspiration
    const double ev = etp * std::exp(-0.623 * cw.LAI);  // potential evaporation
    const double tp = etp - ev;                         // potential transpiration
    const double s_max = tp / f.L;
    return (optimum_uptake ? 1.0 : stress_factor(h, f)) * s_max;
}

double pressure_head_from_content(double theta, const SoilParams& p) {
    p.validate();
    if (!(theta > p.theta_r && theta < p.theta_s))
        throw DomainError("water content outside the open interval (theta_r, theta_s)");
    const double m = 1.0 - 1.0 / p.n;
    const double se = (theta - p.theta_r) / (p.theta_s - p.theta_r);
    return -std::pow(std::pow(se, -1.0 / m) - 1.0, 1.0 / p.n) / p.alpha;
}

}  // namespace pivotfuse
