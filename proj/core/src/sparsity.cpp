#include "pivotfuse/sparsity.hpp"

#include <algorithm>

#include "pivotfuse/errors.hpp"

namespace pivotfuse {

std::vector<std::vector<int>> SparsityPattern::columns() const {
    std::vector<std::vector<int>> cols(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j : rows[static_cast<size_t>(i)]) cols[static_cast<size_t>(j)].push_back(i);
    return cols;
}

SparsityPattern SparsityPattern::power(int radius) const {
    if (radius < 1) throw DomainError("pattern power radius must be >= 1");
    SparsityPattern out = *this;
    for (int step = 1; step < radius; ++step) {
        SparsityPattern next;
        next.n = n;
        next.rows.resize(static_cast<size_t>(n));
        std::vector<char> mark(static_cast<size_t>(n), 0);
        for (int i = 0; i < n; ++i) {
            auto& dst = next.rows[static_cast<size_t>(i)];
            for (int j : out.rows[static_cast<size_t>(i)])
                for (int k : rows[static_cast<size_t>(j)])
                    if (!mark[static_cast<size_t>(k)]) {
                        mark[static_cast<size_t>(k)] = 1;
                        dst.push_back(k);
                    }
            std::sort(dst.begin(), dst.end());
            for (int k : dst) mark[static_cast<size_t>(k)] = 0;
        }
        out = std::move(next);
    }
    return out;
}

ColumnColoring color_columns(const SparsityPattern& pattern) {
    const auto cols = pattern.columns();
    ColumnColoring coloring;
    // rows already claimed by each color
    std::vector<std::vector<char>> taken;
    for (int j = 0; j < pattern.n; ++j) {
        const auto& support = cols[static_cast<size_t>(j)];
        int color = -1;
        for (size_t c = 0; c < taken.size(); ++c) {
            bool clash = false;
            for (int i : support)
                if (taken[c][static_cast<size_t>(i)]) {
                    clash = true;
                    break;
                }
            if (!clash) {
                color = static_cast<int>(c);
                break;
            }
        }
        if (color < 0) {
            color = static_cast<int>(taken.size());
            taken.emplace_back(static_cast<size_t>(pattern.n), 0);
            coloring.groups.emplace_back();
        }
        for (int i : support) taken[static_cast<size_t>(color)][static_cast<size_t>(i)] = 1;
        coloring.groups[static_cast<size_t>(color)].push_back(j);
    }
    return coloring;
}

Eigen::SparseMatrix<double> fd_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, const Eigen::VectorXd& f0,
    const SparsityPattern& pattern, const ColumnColoring& coloring, double delta,
    FdScheme scheme) {
    if (!(delta > 0.0)) throw DomainError("fd_jacobian requires delta > 0");
    const int n = pattern.n;
    const auto cols = pattern.columns();

    std::vector<Eigen::Triplet<double>> trips;
    size_t nnz = 0;
    for (const auto& r : pattern.rows) nnz += r.size();
    trips.reserve(nnz);

    Eigen::VectorXd x = x0;
    for (const auto& group : coloring.groups) {
        for (int j : group) x[j] += delta;
        const Eigen::VectorXd fp = f(x);
        if (scheme == FdScheme::forward) {
            for (int j : group)
                for (int i : cols[static_cast<size_t>(j)])
                    trips.emplace_back(i, j, (fp[i] - f0[i]) / delta);
            for (int j : group) x[j] = x0[j];
        } else {
            for (int j : group) x[j] = x0[j] - delta;
            const Eigen::VectorXd fm = f(x);
            for (int j : group)
                for (int i : cols[static_cast<size_t>(j)])
                    trips.emplace_back(i, j, (fp[i] - fm[i]) / (2.0 * delta));
            for (int j : group) x[j] = x0[j];
        }
    }

    Eigen::SparseMatrix<double> jac(n, n);
    jac.setFromTriplets(trips.begin(), trips.end());
    return jac;
}

}  // namespace pivotfuse
