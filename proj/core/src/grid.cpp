#include "pivotfuse/grid.hpp"

#include <cmath>
#include <numbers>

#include "pivotfuse/errors.hpp"

namespace pivotfuse {

CylGrid CylGrid::build(const GridConfig& cfg) {
    if (cfg.nr < 2 || cfg.ntheta < 2 || cfg.nz < 2)
        throw ConfigError("grid needs at least 2 compartments per direction");
    if (!(cfg.radius_m > 0.0) || !(cfg.depth_m > 0.0))
        throw ConfigError("grid extents must be positive");
    if (!(cfg.z_grading_ratio > 0.0))
        throw ConfigError("z grading ratio must be positive");
    if (cfg.topology == Topology::sector) {
        if (!(cfg.theta2 > cfg.theta1))
            throw ConfigError("sector requires theta2 > theta1");
        if (cfg.theta2 - cfg.theta1 > 2.0 * std::numbers::pi)
            throw ConfigError("sector span exceeds a full circle");
        if (cfg.axis_column)
            throw ConfigError("axis column is only meaningful on the full circle");
    }

    CylGrid g;
    g.cfg_ = cfg;
    g.n_regular_ = cfg.nr * cfg.ntheta * cfg.nz;
    g.dr_ = cfg.radius_m / cfg.nr;

    g.r_.resize(static_cast<size_t>(cfg.nr));
    for (int e = 0; e < cfg.nr; ++e) g.r_[static_cast<size_t>(e)] = (e + 0.5) * g.dr_;

    const double span = cfg.topology == Topology::full_circle
                            ? 2.0 * std::numbers::pi
                            : cfg.theta2 - cfg.theta1;
    const double t0 = cfg.topology == Topology::full_circle ? 0.0 : cfg.theta1;
    g.dtheta_ = span / cfg.ntheta;
    g.theta_.resize(static_cast<size_t>(cfg.ntheta));
    for (int j = 0; j < cfg.ntheta; ++j)
        g.theta_[static_cast<size_t>(j)] = t0 + (j + 0.5) * g.dtheta_;

    // Geometric layer grading: thinnest compartment at the surface, each one
    // below it thicker by the ratio. k = 0 is the bottom compartment.
    const double q = cfg.z_grading_ratio;
    double sum = 0.0;
    for (int j = 0; j < cfg.nz; ++j) sum += std::pow(q, j);
    const double t_surface = cfg.depth_m / sum;
    g.zthick_.resize(static_cast<size_t>(cfg.nz));
    for (int k = 0; k < cfg.nz; ++k)
        g.zthick_[static_cast<size_t>(k)] = t_surface * std::pow(q, cfg.nz - 1 - k);

    g.z_.resize(static_cast<size_t>(cfg.nz));
    double base = 0.0;
    for (int k = 0; k < cfg.nz; ++k) {
        g.z_[static_cast<size_t>(k)] = base + 0.5 * g.zthick_[static_cast<size_t>(k)];
        base += g.zthick_[static_cast<size_t>(k)];
    }
    return g;
}

int CylGrid::index(int e_r, int e_theta, int k) const {
    if (e_r < 0 || e_r >= cfg_.nr || e_theta < 0 || e_theta >= cfg_.ntheta || k < 0 ||
        k >= cfg_.nz)
        throw IndexError("grid index out of bounds");
    return (e_r * cfg_.ntheta + e_theta) * cfg_.nz + k;
}

int CylGrid::axis_index(int k) const {
    if (!cfg_.axis_column) throw IndexError("grid has no axis column");
    if (k < 0 || k >= cfg_.nz) throw IndexError("axis index out of bounds");
    return n_regular_ + k;
}

NodeIndex CylGrid::node_of(int flat) const {
    if (flat < 0 || flat >= num_nodes()) throw IndexError("flat index out of bounds");
    if (is_axis(flat)) return {-1, 0, flat - n_regular_};
    const int k = flat % cfg_.nz;
    const int rest = flat / cfg_.nz;
    return {rest / cfg_.ntheta, rest % cfg_.ntheta, k};
}

NodeCoordinates CylGrid::coordinates(int flat) const {
    const NodeIndex n = node_of(flat);
    if (n.e_r < 0) return {0.0, 0.0, z_[static_cast<size_t>(n.k)]};
    return {r_[static_cast<size_t>(n.e_r)], theta_[static_cast<size_t>(n.e_theta)],
            z_[static_cast<size_t>(n.k)]};
}

int CylGrid::theta_neighbor(int e_theta, int dir) const {
    const int j = e_theta + dir;
    if (cfg_.topology == Topology::full_circle)
        return (j % cfg_.ntheta + cfg_.ntheta) % cfg_.ntheta;
    return (j < 0 || j >= cfg_.ntheta) ? -1 : j;
}

double CylGrid::dr_east(int e_r) const {
    (void)e_r;
    return dr_;  // uniform radial compartments
}

double CylGrid::dr_west(int e_r) const {
    (void)e_r;
    return dr_;
}

double CylGrid::dz_north(int k) const {
    if (k + 1 < cfg_.nz) return z_[static_cast<size_t>(k + 1)] - z_[static_cast<size_t>(k)];
    return dz_south(k);  // mirror at the surface
}

double CylGrid::dz_south(int k) const {
    if (k > 0) return z_[static_cast<size_t>(k)] - z_[static_cast<size_t>(k - 1)];
    return cfg_.nz > 1 ? z_[1] - z_[0] : zthick_[0];  // mirror at the bottom
}

double CylGrid::depth_below_surface(int k) const {
    return cfg_.depth_m - z_[static_cast<size_t>(k)];
}

double CylGrid::compartment_volume(int flat) const {
    const NodeIndex n = node_of(flat);
    if (n.e_r < 0) return 0.0;
    // exact annular-sector volume: 0.5 (rE^2 - rW^2) == r_center * dr
    return r_[static_cast<size_t>(n.e_r)] * dr_ * dtheta_ *
           zthick_[static_cast<size_t>(n.k)];
}

int CylGrid::nearest_surface_node(double x, double y) const {
    const double rp = std::hypot(x, y);
    if (rp > cfg_.radius_m)
        throw DomainError("point lies beyond the field radius (out of track)");
    const int k_surf = cfg_.nz - 1;
    int best = -1;
    double best_d2 = 0.0;
    auto consider = [&](int flat, double nx, double ny) {
        const double dx = nx - x;
        const double dy = ny - y;
        const double d2 = dx * dx + dy * dy;
        if (best < 0 || d2 < best_d2 || (d2 == best_d2 && flat < best)) {
            best = flat;
            best_d2 = d2;
        }
    };
    for (int e = 0; e < cfg_.nr; ++e) {
        const double rn = r_[static_cast<size_t>(e)];
        for (int j = 0; j < cfg_.ntheta; ++j) {
            const double th = theta_[static_cast<size_t>(j)];
            consider(index(e, j, k_surf), rn * std::cos(th), rn * std::sin(th));
        }
    }
    if (cfg_.axis_column) consider(axis_index(k_surf), 0.0, 0.0);
    return best;
}

}  // namespace pivotfuse
