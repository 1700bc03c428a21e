#include "pivotfuse/richards.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "pivotfuse/errors.hpp"

namespace pivotfuse {

namespace {

constexpr double kNewtonFdDelta = 1e-6;  // m, Jacobian column perturbation

using SpMat = Eigen::SparseMatrix<double>;

}  // namespace

void BoundarySpec::validate(int num_nodes) const {
    if (u_irr.size() != 0 && u_irr.size() != num_nodes)
        throw ConfigError("u_irr length must match the grid (or be empty)");
    for (Eigen::Index i = 0; i < u_irr.size(); ++i)
        if (!(u_irr[i] >= 0.0)) throw ConfigError("u_irr must be nonnegative");
}

SoilProfile SoilProfile::uniform(const SoilParams& soil, int nz) {
    soil.validate();
    SoilProfile p;
    p.by_layer_.assign(static_cast<size_t>(nz), soil);
    return p;
}

SoilProfile SoilProfile::two_layer(const SoilParams& upper, const SoilParams& lower,
                                   double interface_depth, const CylGrid& grid) {
    upper.validate();
    lower.validate();
    if (!(interface_depth > 0.0 && interface_depth < grid.depth()))
        throw ConfigError("layer interface must lie strictly inside the soil column");
    SoilProfile p;
    p.by_layer_.resize(static_cast<size_t>(grid.nz()));
    for (int k = 0; k < grid.nz(); ++k)
        p.by_layer_[static_cast<size_t>(k)] =
            grid.depth_below_surface(k) <= interface_depth ? upper : lower;
    return p;
}

struct RichardsSolver::Factorization {
    Eigen::SparseLU<SpMat> lu;
    bool ready = false;
};

RichardsSolver::RichardsSolver(const CylGrid& grid, const SoilProfile& soils,
                               SolverOptions options)
    : grid_(&grid), soils_(&soils), options_(options) {
    if (soils.num_layers() != grid.nz())
        throw ConfigError("soil profile must cover every vertical layer");
    if (grid.has_axis_column() && grid.ntheta() % 2 != 0)
        throw ConfigError("axis column requires an even azimuthal count");

    const int n = grid.num_nodes();
    pattern_.n = n;
    pattern_.rows.resize(static_cast<size_t>(n));
    auto add = [&](int i, int j) { pattern_.rows[static_cast<size_t>(i)].push_back(j); };

    const int nr = grid.nr();
    const int nt = grid.ntheta();
    const int nz = grid.nz();
    for (int er = 0; er < nr; ++er)
        for (int et = 0; et < nt; ++et)
            for (int k = 0; k < nz; ++k) {
                const int i = grid.index(er, et, k);
                add(i, i);
                if (er + 1 < nr) add(i, grid.index(er + 1, et, k));
                if (er > 0)
                    add(i, grid.index(er - 1, et, k));
                else if (grid.has_axis_column())
                    add(i, grid.axis_index(k));
                for (int dir : {-1, 1}) {
                    const int jt = grid.theta_neighbor(et, dir);
                    if (jt >= 0 && jt != et) add(i, grid.index(er, jt, k));
                }
                if (k + 1 < nz) add(i, grid.index(er, et, k + 1));
                if (k > 0) add(i, grid.index(er, et, k - 1));
            }
    if (grid.has_axis_column())
        for (int k = 0; k < nz; ++k) {
            const int a = grid.axis_index(k);
            add(a, a);
            if (k + 1 < nz) add(a, grid.axis_index(k + 1));
            if (k > 0) add(a, grid.axis_index(k - 1));
            for (int et = 0; et < nt; ++et) add(a, grid.index(0, et, k));
        }
    for (auto& row : pattern_.rows) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    coloring_ = color_columns(pattern_);
}

Eigen::VectorXd RichardsSolver::mass_rhs(const Eigen::VectorXd& h,
                                         const ForcingInputs& forcing) const {
    const CylGrid& g = *grid_;
    const int n = g.num_nodes();
    if (h.size() != n) throw DomainError("state length does not match the grid");
    forcing.boundary.validate(n);

    const int nr = g.nr();
    const int nt = g.ntheta();
    const int nz = g.nz();
    const bool axis = g.has_axis_column();
    const double dtheta = g.dtheta();
    const bool irrigated = forcing.boundary.u_irr.size() == n;

    // node-wise conductivities, one evaluation each
    Eigen::VectorXd K(n);
    for (int i = 0; i < n; ++i)
        K[i] = hydraulic_conductivity(h[i], soils_->of_node(g, i));

    Eigen::VectorXd out(n);

    for (int er = 0; er < nr; ++er) {
        const double r_i = g.r_nodes()[static_cast<size_t>(er)];
        const double dr_e = g.dr_east(er);
        const double dr_w = g.dr_west(er);
        for (int et = 0; et < nt; ++et) {
            for (int k = 0; k < nz; ++k) {
                const int i = g.index(er, et, k);
                const double hi = h[i];
                const double Ki = K[i];

                // radial term, Eq.-(17) half-index face form
                double term_e = 0.0, term_w = 0.0;
                double dr_center = 0.5 * (dr_e + dr_w);
                if (er + 1 < nr) {
                    const int j = g.index(er + 1, et, k);
                    const double r_face = r_i + 0.5 * dr_e;
                    term_e = r_face * 0.5 * (Ki + K[j]) * (h[j] - hi) / dr_e;
                }  // outer edge: zero radial gradient drops the face
                if (er > 0) {
                    const int j = g.index(er - 1, et, k);
                    const double r_face = r_i - 0.5 * dr_w;
                    term_w = r_face * 0.5 * (Ki + K[j]) * (hi - h[j]) / dr_w;
                } else if (axis) {
                    const int j = g.axis_index(k);
                    const double dr_ax = r_i;  // axis sits at r = 0
                    const double r_face = 0.5 * r_i;
                    term_w = r_face * 0.5 * (Ki + K[j]) * (hi - h[j]) / dr_ax;
                    dr_center = 0.5 * (dr_e + dr_ax);
                }  // no axis column: face at r = 0 has zero area
                const double radial = (term_e - term_w) / (r_i * dr_center);

                // azimuthal term; sector edges impose the zero-gradient BC
                double term_t = 0.0, term_d = 0.0;
                const int jt = g.theta_neighbor(et, +1);
                const int jd = g.theta_neighbor(et, -1);
                if (jt >= 0) {
                    const int j = g.index(er, jt, k);
                    term_t = 0.5 * (Ki + K[j]) / r_i * (h[j] - hi) / dtheta;
                }
                if (jd >= 0) {
                    const int j = g.index(er, jd, k);
                    term_d = 0.5 * (Ki + K[j]) / r_i * (hi - h[j]) / dtheta;
                }
                const double azimuthal = (term_t - term_d) / (r_i * dtheta);

                // axial term with gravity; surface face carries the
                // irrigation influx, bottom face the drainage law
                double f_n, f_s;
                if (k + 1 < nz) {
                    const int j = g.index(er, et, k + 1);
                    f_n = 0.5 * (Ki + K[j]) * ((h[j] - hi) / g.dz_north(k) + 1.0);
                } else {
                    f_n = irrigated ? forcing.boundary.u_irr[i] : 0.0;
                }
                if (k > 0) {
                    const int j = g.index(er, et, k - 1);
                    f_s = 0.5 * (Ki + K[j]) * ((hi - h[j]) / g.dz_south(k) + 1.0);
                } else {
                    f_s = forcing.boundary.bottom == BottomBoundary::free_drainage ? Ki : 0.0;
                }
                const double axial = (f_n - f_s) / g.dz_center(k);

                const double sink =
                    sink_rate(hi, g.depth_below_surface(k), forcing.feddes,
                              forcing.crop_weather, forcing.optimum_uptake);

                out[i] = radial + azimuthal + axial - sink;
            }
        }
    }

    if (axis) {
        // L'Hopital limit forms at r = 0, averaged over all diameters
        const double dr_ax = g.r_nodes()[0];  // axis-to-ring spacing
        const int half = nt / 2;
        for (int k = 0; k < nz; ++k) {
            const int a = g.axis_index(k);
            const double ha = h[a];
            const double Ka = K[a];

            double radial = 0.0, azim = 0.0;
            for (int j = 0; j < nt; ++j) {
                const int ie = g.index(0, j, k);
                const int iw = g.index(0, (j + half) % nt, k);
                const double k_e = 0.5 * (Ka + K[ie]);
                const double k_w = 0.5 * (Ka + K[iw]);
                radial += 2.0 * (k_e * (h[ie] - ha) - k_w * (ha - h[iw])) / (dr_ax * dr_ax);

                // second radial difference of the azimuthal operator; the
                // middle row vanishes because the axis value is shared
                auto ring_op = [&](int jj) {
                    const int c = g.index(0, jj, k);
                    const int p = g.index(0, (jj + 1) % nt, k);
                    const int m = g.index(0, (jj - 1 + nt) % nt, k);
                    return 0.5 * (K[c] + K[p]) * (h[p] - h[c]) -
                           0.5 * (K[c] + K[m]) * (h[c] - h[m]);
                };
                azim += (ring_op(j) + ring_op((j + half) % nt)) /
                        (2.0 * dr_ax * dr_ax * dtheta * dtheta);
            }
            radial /= nt;
            azim /= nt;

            double f_n, f_s;
            if (k + 1 < nz) {
                const int j = g.axis_index(k + 1);
                f_n = 0.5 * (Ka + K[j]) * ((h[j] - ha) / g.dz_north(k) + 1.0);
            } else {
                f_n = irrigated ? forcing.boundary.u_irr[a] : 0.0;
            }
            if (k > 0) {
                const int j = g.axis_index(k - 1);
                f_s = 0.5 * (Ka + K[j]) * ((ha - h[j]) / g.dz_south(k) + 1.0);
            } else {
                f_s = forcing.boundary.bottom == BottomBoundary::free_drainage ? Ka : 0.0;
            }
            const double axial = (f_n - f_s) / g.dz_center(k);

            const double sink = sink_rate(ha, g.depth_below_surface(k), forcing.feddes,
                                          forcing.crop_weather, forcing.optimum_uptake);
            out[a] = radial + azim + axial - sink;
        }
    }

    for (int i = 0; i < n; ++i)
        if (!std::isfinite(out[i]))
            throw NumericalError("non-finite right-hand side", i);
    return out;
}

Eigen::VectorXd RichardsSolver::rhs(const StateField& state,
                                    const ForcingInputs& forcing) const {
    Eigen::VectorXd out = mass_rhs(state.h, forcing);
    for (int i = 0; i < grid_->num_nodes(); ++i) {
        const double c = std::max(capillary_capacity(state.h[i], soils_->of_node(*grid_, i)),
                                  1e-300);
        out[i] /= c;
        if (!std::isfinite(out[i])) throw NumericalError("non-finite rhs after 1/C", i);
    }
    return out;
}

namespace {

/// Inf-norm of the mass-form residual rescaled to m/s via the local capacity.
double scaled_residual_norm(const Eigen::VectorXd& res, const Eigen::VectorXd& h,
                            const CylGrid& grid, const SoilProfile& soils) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < res.size(); ++i) {
        const double c = std::max(
            capillary_capacity(h[i], soils.of_node(grid, static_cast<int>(i))),
            kSaturatedCapacityFloor);
        worst = std::max(worst, std::abs(res[i]) / c);
    }
    return worst;
}

}  // namespace

Eigen::VectorXd RichardsSolver::solve_substep(const Eigen::VectorXd& h0,
                                              const ForcingInputs& forcing, double dt,
                                              const Eigen::VectorXd& warm,
                                              bool reuse_factorization, StepStats* stats) {
    const CylGrid& g = *grid_;
    const int n = g.num_nodes();

    Eigen::VectorXd theta0(n);
    for (int i = 0; i < n; ++i) theta0[i] = water_content(h0[i], soils_->of_node(g, i));

    auto residual = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd r = mass_rhs(x, forcing);
        for (int i = 0; i < n; ++i)
            r[i] = (water_content(x[i], soils_->of_node(g, i)) - theta0[i]) / dt - r[i];
        return r;
    };

    Eigen::VectorXd x = warm;
    Eigen::VectorXd res = residual(x);
    double norm = scaled_residual_norm(res, x, g, *soils_);

    auto factorize = [&](const Eigen::VectorXd& at) {
        Eigen::VectorXd m0 = mass_rhs(at, forcing);
        SpMat jm = fd_jacobian([&](const Eigen::VectorXd& y) { return mass_rhs(y, forcing); },
                               at, m0, pattern_, coloring_, kNewtonFdDelta);
        SpMat jac = -jm;
        for (int i = 0; i < n; ++i) {
            const double c = std::max(capillary_capacity(at[i], soils_->of_node(g, i)),
                                      kSaturatedCapacityFloor);
            jac.coeffRef(i, i) += c / dt;
        }
        auto fact = std::make_shared<Factorization>();
        fact->lu.compute(jac);
        if (fact->lu.info() != Eigen::Success)
            throw NumericalError("singular Newton Jacobian in Richards step");
        fact->ready = true;
        last_factorization_ = fact;
        if (stats) ++stats->factorizations;
    };

    bool fresh = false;
    if (!(reuse_factorization && last_factorization_ && last_factorization_->ready)) {
        factorize(x);
        fresh = true;
    }

    for (int it = 0; it < options_.max_newton_iter; ++it) {
        if (norm < options_.newton_tol) return x;
        if (stats) ++stats->newton_iterations;

        const Eigen::VectorXd dx = last_factorization_->lu.solve(-res);
        double lambda = 1.0;
        bool accepted = false;
        while (lambda >= options_.min_damping) {
            Eigen::VectorXd cand = x + lambda * dx;
            Eigen::VectorXd cres;
            try {
                cres = residual(cand);
            } catch (const NumericalError&) {
                lambda *= 0.5;  // stepped into a non-finite region
                continue;
            }
            const double cnorm = scaled_residual_norm(cres, cand, g, *soils_);
            if (cnorm < norm || cnorm < options_.newton_tol) {
                x = std::move(cand);
                res = std::move(cres);
                norm = cnorm;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            if (fresh) throw NumericalError("Newton line search stalled");
            factorize(x);  // stale chord matrix; retry with a fresh one
            fresh = true;
            continue;
        }
        if (accepted && lambda < 1.0 && !fresh) {
            factorize(x);
            fresh = true;
        } else if (lambda == 1.0) {
            fresh = false;  // allow chord reuse while full steps make progress
        }
    }
    if (norm < options_.newton_tol) return x;
    throw NumericalError("Newton failed to converge within iteration budget");
}

StateField RichardsSolver::step(const StateField& state, const ForcingInputs& forcing,
                                double dt, StepStats* stats) {
    if (!(dt > 0.0)) throw DomainError("step requires dt > 0");
    base_run_.clear();
    base_forcing_dt_ = dt;

    Eigen::VectorXd x = state.h;
    double remaining = dt;
    double attempt = dt;
    while (remaining > 0.0) {
        attempt = std::min(attempt, remaining);
        try {
            Eigen::VectorXd before = x;
            last_factorization_.reset();  // each substep starts fresh
            Eigen::VectorXd after = solve_substep(x, forcing, attempt, x, false, stats);
            base_run_.push_back({attempt, std::move(before), after, last_factorization_});
            x = std::move(after);
            remaining -= attempt;
            if (stats) ++stats->substeps;
            attempt *= 2.0;
        } catch (const NumericalError& e) {
            attempt *= 0.5;
            if (attempt < options_.dt_min) {
                base_run_.clear();
                throw NumericalError(
                    std::string("sub-step underflow below dt_min while integrating: ") +
                    e.what());
            }
        }
    }
    return {std::move(x), state.t + dt};
}

Eigen::VectorXd RichardsSolver::step_from_base(const Eigen::VectorXd& h0, double dt,
                                               const ForcingInputs& forcing,
                                               const Eigen::VectorXd& warm_start) {
    if (base_run_.empty() || std::abs(base_forcing_dt_ - dt) > 1e-9 * std::max(1.0, dt)) {
        StateField s{h0, 0.0};
        return step(s, forcing, dt).h;
    }
    Eigen::VectorXd x = h0;
    for (auto& rec : base_run_) {
        last_factorization_ = rec.fact;
        Eigen::VectorXd warm = rec.x_after + (x - rec.x_before);
        x = solve_substep(x, forcing, rec.dt, warm, true, nullptr);
        rec.fact = last_factorization_;  // keep any refreshed factorization
    }
    (void)warm_start;
    return x;
}

std::vector<StateField> RichardsSolver::simulate(const StateField& state0,
                                                 const ForcingSchedule& schedule,
                                                 double horizon,
                                                 const std::vector<double>& output_times,
                                                 double max_dt) {
    if (!(horizon > 0.0)) throw DomainError("simulate requires a positive horizon");
    const double t0 = state0.t;
    const double t_end = t0 + horizon;
    for (double t : output_times)
        if (t < t0 - 1e-9 || t > t_end + 1e-9)
            throw DomainError("output time outside the simulation horizon");

    std::set<double> marks(schedule.breakpoints.begin(), schedule.breakpoints.end());
    marks.insert(t_end);
    for (double t : output_times) marks.insert(t);

    std::vector<StateField> out;
    StateField cur = state0;
    auto record_if_requested = [&](double t) {
        for (double want : output_times)
            if (std::abs(want - t) <= 1e-6 &&
                (out.empty() || std::abs(out.back().t - t) > 1e-6))
                out.push_back({cur.h, t});
    };
    record_if_requested(t0);

    for (double mark : marks) {
        if (mark <= t0 + 1e-12) continue;
        while (cur.t < mark - 1e-9) {
            double dt = mark - cur.t;
            if (max_dt > 0.0) dt = std::min(dt, max_dt);
            const ForcingInputs forcing = schedule.at(cur.t);
            cur = step(cur, forcing, dt);
        }
        cur.t = mark;  // absorb roundoff drift at breakpoints
        record_if_requested(mark);
        if (mark >= t_end) break;
    }
    return out;
}

double RichardsSolver::total_water(const Eigen::VectorXd& h) const {
    double total = 0.0;
    for (int i = 0; i < grid_->num_nodes(); ++i)
        total += water_content(h[i], soils_->of_node(*grid_, i)) *
                 grid_->compartment_volume(i);
    return total;
}

Eigen::VectorXd rhs(const StateField& state, const ForcingInputs& forcing,
                    const CylGrid& grid, const SoilProfile& soils) {
    return RichardsSolver(grid, soils).rhs(state, forcing);
}

StateField step(const StateField& state, const ForcingInputs& forcing, double dt,
                const CylGrid& grid, const SoilProfile& soils, SolverOptions opts) {
    return RichardsSolver(grid, soils, opts).step(state, forcing, dt);
}

}  // namespace pivotfuse
