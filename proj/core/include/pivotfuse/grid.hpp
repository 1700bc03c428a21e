#pragma once

#include <cstdint>
#include <vector>

namespace pivotfuse {

enum class Topology { full_circle, sector };

/// Build description for a cylindrical grid. Angles in radians, lengths in m.
struct GridConfig {
    Topology topology = Topology::full_circle;
    double radius_m = 0.0;  ///< field radius H_r
    double depth_m = 0.0;   ///< soil column length H_z
    int nr = 0;
    int ntheta = 0;
    int nz = 0;
    double theta1 = 0.0;  ///< sector start angle (sector topology only)
    double theta2 = 0.0;  ///< sector end angle
    /// Compartment-thickness ratio between vertically adjacent compartments,
    /// coarsening downward from the surface. 1.0 gives uniform layers.
    double z_grading_ratio = 1.0;
    /// Add a shared axis column of nz nodes at r = 0 (full circle only).
    bool axis_column = false;
};

struct NodeIndex {
    int e_r = 0;
    int e_theta = 0;
    int k = 0;
};

struct NodeCoordinates {
    double r = 0.0;
    double theta = 0.0;
    double z = 0.0;
};

/// Cylindrical discretization with nodes at compartment centers.
///
/// z increases upward: k = 0 is the bottom layer (z near 0), k = nz-1 the
/// surface layer (z near H_z). Regular nodes are flat-indexed as
/// (e_r * ntheta + e_theta) * nz + k; the optional axis column occupies the
/// trailing nz indices.
class CylGrid {
public:
    static CylGrid build(const GridConfig& cfg);

    Topology topology() const { return cfg_.topology; }
    const GridConfig& config() const { return cfg_; }

    int nr() const { return cfg_.nr; }
    int ntheta() const { return cfg_.ntheta; }
    int nz() const { return cfg_.nz; }
    bool has_axis_column() const { return cfg_.axis_column; }
    int num_nodes() const { return n_regular_ + (cfg_.axis_column ? cfg_.nz : 0); }
    int num_regular_nodes() const { return n_regular_; }

    double radius() const { return cfg_.radius_m; }
    double depth() const { return cfg_.depth_m; }

    const std::vector<double>& r_nodes() const { return r_; }
    const std::vector<double>& theta_nodes() const { return theta_; }
    const std::vector<double>& z_nodes() const { return z_; }

    /// Flat index of a regular node; throws IndexError when out of bounds.
    int index(int e_r, int e_theta, int k) const;
    int index(const NodeIndex& n) const { return index(n.e_r, n.e_theta, n.k); }
    /// Flat index of an axis node (requires the axis column).
    int axis_index(int k) const;
    bool is_axis(int flat) const { return flat >= n_regular_ && flat < num_nodes(); }

    /// Inverse of index(); axis nodes report e_r = -1, e_theta = 0.
    NodeIndex node_of(int flat) const;
    NodeCoordinates coordinates(int flat) const;

    /// Azimuthal neighbor with wraparound on the full circle; -1 past a
    /// sector edge.
    int theta_neighbor(int e_theta, int dir) const;

    // Paper-convention spacings. Boundary nodes mirror the interior spacing;
    // the corresponding face flux is dropped by the stencil anyway.
    double dr_east(int e_r) const;
    double dr_west(int e_r) const;
    double dr_center(int e_r) const { return 0.5 * (dr_east(e_r) + dr_west(e_r)); }
    double dtheta() const { return dtheta_; }
    double dz_north(int k) const;
    double dz_south(int k) const;
    double dz_center(int k) const { return 0.5 * (dz_north(k) + dz_south(k)); }

    /// Thickness of vertical compartment k.
    double layer_thickness(int k) const { return zthick_[static_cast<size_t>(k)]; }
    /// Depth of the node center below the surface.
    double depth_below_surface(int k) const;
    /// Compartment volume (m3). Axis nodes carry zero volume: the axis column
    /// is a degenerate extra ring, not a compartment.
    double compartment_volume(int flat) const;

    /// Surface-layer node (k = nz-1, axis included) closest in the horizontal
    /// plane to the point (x, y) relative to the pivot center. Ties break to
    /// the lowest flat index. Throws DomainError when the point lies beyond
    /// the field radius.
    int nearest_surface_node(double x, double y) const;

private:
    GridConfig cfg_;
    int n_regular_ = 0;
    double dr_ = 0.0;
    double dtheta_ = 0.0;
    std::vector<double> r_, theta_, z_;
    std::vector<double> zthick_;
};

}  // namespace pivotfuse
