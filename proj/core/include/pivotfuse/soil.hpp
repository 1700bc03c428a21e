#pragma once

#include <string>

namespace pivotfuse {

/// Mualem-van Genuchten hydraulic parameter set for one soil layer.
/// Units are SI throughout: heads in m, conductivity in m/s.
struct SoilParams {
    double theta_s = 0.0;  ///< saturated volumetric content (m3/m3)
    double theta_r = 0.0;  ///< residual volumetric content (m3/m3)
    double K_s = 0.0;      ///< saturated hydraulic conductivity (m/s)
    double alpha = 0.0;    ///< retention shape parameter (1/m)
    double n = 0.0;        ///< retention shape parameter (-), n > 1

    /// Throws DomainError unless 0 <= theta_r < theta_s <= 1, K_s > 0,
    /// alpha > 0 and n > 1.
    void validate() const;
};

/// Loam, Table-1 values of the simulated case study.
SoilParams loam_soil();
/// Sandy clay loam, Table-2 values.
SoilParams sandy_clay_loam_soil();

/// Feddes root-water-uptake breakpoints plus rooting depth.
///
/// The four heads must form a monotone bracket (all negative, sorted in
/// either direction); stress_factor() canonicalizes the orientation, so both
/// the wet-side-first and dry-side-first conventions are accepted.
struct FeddesParams {
    double h1 = -0.10;
    double h2 = -0.25;
    double h3 = -5.0;
    double h_w = -150.0;
    double L = 0.30;  ///< rooting depth (m)

    void validate() const;
};

/// Crop/weather forcing entering the sink term.
struct CropWeather {
    double K_c = 0.0;  ///< crop coefficient (-)
    double PET = 0.0;  ///< reference evapotranspiration (m/s)
    double LAI = 0.0;  ///< leaf area index (m2/m2)

    void validate() const;
};

/// Floor for the capillary capacity on the saturated branch (h >= 0), so the
/// head-form equation stays well posed when dividing by C.
inline constexpr double kSaturatedCapacityFloor = 1e-7;  // 1/m

/// Retention curve theta(h). Saturated branch returns theta_s.
double water_content(double h, const SoilParams& p);

/// Unsaturated conductivity K(h). Saturated branch returns K_s.
/// Always strictly positive and <= K_s.
double hydraulic_conductivity(double h, const SoilParams& p);

/// Capillary capacity C(h) = dtheta/dh. Saturated branch returns the
/// configured floor kSaturatedCapacityFloor.
double capillary_capacity(double h, const SoilParams& p);

/// Feddes water stress reduction factor, in [0,1], total on all of R.
double stress_factor(double h, const FeddesParams& f);

/// Root water extraction rate S (1/s) at depth `depth_below_surface` (m).
/// Zero below the rooting depth. When `optimum_uptake` is set the stress
/// factor is pinned to 1.
double sink_rate(double h, double depth_below_surface, const FeddesParams& f,
                 const CropWeather& cw, bool optimum_uptake = true);

/// Analytic inverse of the retention curve: the (negative) head with
/// water_content(h, p) == theta. Requires theta strictly inside
/// (theta_r, theta_s); throws DomainError otherwise.
double pressure_head_from_content(double theta, const SoilParams& p);

}  // namespace pivotfuse
