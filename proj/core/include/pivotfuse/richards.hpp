#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <memory>
#include <vector>

#include "pivotfuse/grid.hpp"
#include "pivotfuse/soil.hpp"
#include "pivotfuse/sparsity.hpp"

namespace pivotfuse {

/// Pressure-head state over all grid nodes at one instant.
struct StateField {
    Eigen::VectorXd h;  ///< pressure heads (m), length = grid.num_nodes()
    double t = 0.0;     ///< time (s)
};

enum class BottomBoundary {
    free_drainage,  ///< unit total-head gradient: gravity outflow K(h)
    no_flow         ///< closed bottom (mass-balance experiments)
};

/// Boundary data for one forcing interval.
struct BoundarySpec {
    /// Irrigation flux (m/s) per node; nonzero only on surface-layer nodes of
    /// the currently irrigated sector. Empty means no irrigation anywhere.
    Eigen::VectorXd u_irr;
    BottomBoundary bottom = BottomBoundary::free_drainage;

    void validate(int num_nodes) const;
};

/// Everything the right-hand side needs besides the state itself.
struct ForcingInputs {
    CropWeather crop_weather;
    FeddesParams feddes;
    bool optimum_uptake = true;
    BoundarySpec boundary;
};

/// Vertical soil layering: one parameter set per z-layer, shared by all
/// columns. Horizontal heterogeneity is out of scope.
class SoilProfile {
public:
    static SoilProfile uniform(const SoilParams& soil, int nz);
    /// Two-layer profile split at `interface_depth` below the surface; nodes
    /// are assigned by their center depth.
    static SoilProfile two_layer(const SoilParams& upper, const SoilParams& lower,
                                 double interface_depth, const CylGrid& grid);

    const SoilParams& layer(int k) const { return by_layer_.at(static_cast<size_t>(k)); }
    const SoilParams& of_node(const CylGrid& grid, int flat) const {
        return layer(grid.node_of(flat).k);
    }
    int num_layers() const { return static_cast<int>(by_layer_.size()); }

private:
    std::vector<SoilParams> by_layer_;
};

struct SolverOptions {
    double newton_tol = 1e-10;  ///< residual inf-norm tolerance, m/s scale
    int max_newton_iter = 30;
    double min_damping = 1.0 / 64.0;
    double dt_min = 1e-3;  ///< s; sub-step underflow raises NumericalError
};

struct StepStats {
    int substeps = 0;
    int newton_iterations = 0;
    int factorizations = 0;
};

/// Time-varying forcing, piecewise constant between breakpoints.
struct ForcingSchedule {
    std::function<ForcingInputs(double t)> at;
    std::vector<double> breakpoints;  ///< sorted times where forcing changes
};

/// Assembly and implicit integration of the cylindrical Richards equation.
///
/// The spatial scheme follows central differences on compartment-center
/// nodes with arithmetic-mean conductivities at half indices; the axis
/// column, when present, uses the L'Hopital limit forms averaged over all
/// diameters through the axis. Time stepping is backward Euler with damped
/// Newton iterations on the mass-form residual
///   [theta(h) - theta(h_prev)]/dt - div_terms(h) + sink(h) = 0,
/// which keeps closed-system water mass exactly telescoping.
class RichardsSolver {
public:
    RichardsSolver(const CylGrid& grid, const SoilProfile& soils,
                   SolverOptions options = {});

    const CylGrid& grid() const { return *grid_; }
    const SoilProfile& soils() const { return *soils_; }
    const SolverOptions& options() const { return options_; }
    const SparsityPattern& pattern() const { return pattern_; }
    const ColumnColoring& coloring() const { return coloring_; }

    /// dh/dt of the method-of-lines system (head form, divided by C).
    Eigen::VectorXd rhs(const StateField& state, const ForcingInputs& forcing) const;

    /// Flux-divergence minus sink (mass form, d theta/dt). Exposed for the
    /// mass-balance diagnostics and tests.
    Eigen::VectorXd mass_rhs(const Eigen::VectorXd& h, const ForcingInputs& forcing) const;

    /// Advance by dt with backward Euler; halves the sub-step on Newton
    /// failure down to dt_min.
    StateField step(const StateField& state, const ForcingInputs& forcing, double dt,
                    StepStats* stats = nullptr);

    /// One-step map reusing the factorization left by the previous step()
    /// call from the same base state; used for transition-matrix columns.
    /// Falls back to a full solve when the chord iteration stalls.
    Eigen::VectorXd step_from_base(const Eigen::VectorXd& h0, double dt,
                                   const ForcingInputs& forcing,
                                   const Eigen::VectorXd& warm_start);

    /// Integrate over [state0.t, state0.t + horizon], breaking at schedule
    /// breakpoints (forcing is piecewise constant) and at output times.
    /// Returns states at the requested output times. max_dt caps sub-steps
    /// for accuracy; <= 0 disables the cap.
    std::vector<StateField> simulate(const StateField& state0,
                                     const ForcingSchedule& schedule, double horizon,
                                     const std::vector<double>& output_times,
                                     double max_dt = 0.0);

    /// Total water volume (m3) over all compartments, for mass-balance checks.
    double total_water(const Eigen::VectorXd& h) const;

private:
    struct Factorization;

    Eigen::VectorXd solve_substep(const Eigen::VectorXd& h0, const ForcingInputs& forcing,
                                  double dt, const Eigen::VectorXd& warm,
                                  bool reuse_factorization, StepStats* stats);

    const CylGrid* grid_;
    const SoilProfile* soils_;
    SolverOptions options_;
    SparsityPattern pattern_;
    ColumnColoring coloring_;
    std::shared_ptr<Factorization> last_factorization_;
};

/// Eq.-faithful one-shot wrappers.
Eigen::VectorXd rhs(const StateField& state, const ForcingInputs& forcing,
                    const CylGrid& grid, const SoilProfile& soils);
StateField step(const StateField& state, const ForcingInputs& forcing, double dt,
                const CylGrid& grid, const SoilProfile& soils, SolverOptions opts = {});

}  // namespace pivotfuse
