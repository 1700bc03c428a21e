#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <vector>

namespace pivotfuse {

/// Symmetric sparsity pattern of a vector-valued map, as sorted per-row
/// neighbor lists (diagonal always included).
struct SparsityPattern {
    int n = 0;
    std::vector<std::vector<int>> rows;

    /// Column support; equals rows for the structurally symmetric patterns
    /// produced here, but computed explicitly so asymmetric patterns work too.
    std::vector<std::vector<int>> columns() const;

    /// Pattern of the `radius`-th graph power: node pairs reachable within
    /// `radius` hops. Used to widen the EKF transition-matrix support.
    SparsityPattern power(int radius) const;
};

/// Curtis-Powell-Reid style column grouping: columns in one group have
/// disjoint row supports, so one perturbed evaluation recovers them all.
struct ColumnColoring {
    std::vector<std::vector<int>> groups;
    int num_colors() const { return static_cast<int>(groups.size()); }
};

ColumnColoring color_columns(const SparsityPattern& pattern);

enum class FdScheme { forward, central };

/// Finite-difference Jacobian of `f` at `x0`, restricted to `pattern`.
/// `f0` must be f(x0) (reused to avoid a redundant evaluation; ignored for
/// the central scheme). One f evaluation per color (two for central).
Eigen::SparseMatrix<double> fd_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, const Eigen::VectorXd& f0,
    const SparsityPattern& pattern, const ColumnColoring& coloring, double delta,
    FdScheme scheme = FdScheme::forward);

}  // namespace pivotfuse
