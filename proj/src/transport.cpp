// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#include "opmeans/transport.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "opmeans/detail/maxflow.hpp"

namespace opmeans {

namespace {

/// Exact transportation simplex: rational flows, float costs. The basis is
/// a spanning tree of the bipartite supply/demand graph with m + n - 1
/// cells (degenerate zero-flow cells included), initialized by the
/// northwest-corner walk.
class TransportSimplex {
  public:
    TransportSimplex(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     std::vector<std::vector<double>> cost)
        : m_(static_cast<int>(mu.size())),
          n_(static_cast<int>(nu.size())),
          cost_(std::move(cost)),
          flow_(m_, std::vector<Rational>(n_, Rational(0))),
          basic_(m_, std::vector<bool>(n_, false)) {
        northwest_corner(mu, nu);
    }

    void solve() {
        const int max_pivots = 20000;
        double scale = 1.0;
        for (const auto& row : cost_)
            for (double c : row) scale = std::max(scale, std::abs(c));
        const double tol = 1e-13 * scale;
        for (int pivot = 0; pivot < max_pivots; ++pivot) {
            compute_potentials();
            int ei = -1, ej = -1;
            double most_negative = -tol;
            for (int i = 0; i < m_; ++i) {
                for (int j = 0; j < n_; ++j) {
                    if (basic_[i][j]) continue;
                    const double rc = cost_[i][j] - u_[i] - v_[j];
                    if (rc < most_negative) {
                        most_negative = rc;
                        ei = i;
                        ej = j;
                    }
                }
            }
            if (ei < 0) return; // optimal
            pivot_on(ei, ej);
        }
        throw NoConvergence("wasserstein_p: transportation simplex exceeded pivot limit");
    }

    [[nodiscard]] double objective() const {
        double total = 0.0;
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < n_; ++j)
                if (!flow_[i][j].is_zero()) total += flow_[i][j].to_double() * cost_[i][j];
        return total;
    }

    [[nodiscard]] Coupling coupling() const { return Coupling{flow_}; }

  private:
    void northwest_corner(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
        std::vector<Rational> supply(mu.weights());
        std::vector<Rational> demand(nu.weights());
        int i = 0, j = 0;
        for (;;) {
            const Rational t = std::min(supply[i], demand[j]);
            flow_[i][j] = t;
            basic_[i][j] = true;
            supply[i] = supply[i] - t;
            demand[j] = demand[j] - t;
            if (i == m_ - 1 && j == n_ - 1) break;
            // March one step; ties prefer advancing the row so the walk
            // always lays down exactly m + n - 1 basic cells.
            if (supply[i].is_zero() && i + 1 < m_) {
                ++i;
            } else {
                ++j;
            }
        }
    }

    /// Solves u_i + v_j = c_ij over the basis tree (u_0 = 0).
    void compute_potentials() {
        u_.assign(m_, 0.0);
        v_.assign(n_, 0.0);
        std::vector<bool> row_done(m_, false), col_done(n_, false);
        row_done[0] = true;
        std::deque<int> queue{0}; // rows: 0..m-1, cols: m..m+n-1
        while (!queue.empty()) {
            const int node = queue.front();
            queue.pop_front();
            if (node < m_) {
                const int i = node;
                for (int j = 0; j < n_; ++j) {
                    if (basic_[i][j] && !col_done[j]) {
                        v_[j] = cost_[i][j] - u_[i];
                        col_done[j] = true;
                        queue.push_back(m_ + j);
                    }
                }
            } else {
                const int j = node - m_;
                for (int i = 0; i < m_; ++i) {
                    if (basic_[i][j] && !row_done[i]) {
                        u_[i] = cost_[i][j] - v_[j];
                        row_done[i] = true;
                        queue.push_back(i);
                    }
                }
            }
        }
        for (int i = 0; i < m_; ++i)
            if (!row_done[i]) throw NoConvergence("wasserstein_p: basis tree disconnected");
        for (int j = 0; j < n_; ++j)
            if (!col_done[j]) throw NoConvergence("wasserstein_p: basis tree disconnected");
    }

    /// Brings (ei, ej) into the basis, rebalancing flow around the unique
    /// cycle it closes and dropping the blocking cell.
    void pivot_on(int ei, int ej) {
        // Path from col ej back to row ei through the basis tree.
        const int start = m_ + ej;
        const int goal = ei;
        std::vector<int> parent(m_ + n_, -1);
        parent[start] = start;
        std::deque<int> queue{start};
        while (!queue.empty() && parent[goal] < 0) {
            const int node = queue.front();
            queue.pop_front();
            if (node < m_) {
                for (int j = 0; j < n_; ++j) {
                    if (basic_[node][j] && parent[m_ + j] < 0) {
                        parent[m_ + j] = node;
                        queue.push_back(m_ + j);
                    }
                }
            } else {
                const int j = node - m_;
                for (int i = 0; i < m_; ++i) {
                    if (basic_[i][j] && parent[i] < 0) {
                        parent[i] = m_ + j;
                        queue.push_back(i);
                    }
                }
            }
        }
        if (parent[goal] < 0) throw NoConvergence("wasserstein_p: basis cycle not found");

        // Node path goal -> start, reversed to start at the entering col.
        std::vector<int> path;
        for (int node = goal; node != start; node = parent[node]) path.push_back(node);
        path.push_back(start);
        std::reverse(path.begin(), path.end());

        // Cells along the path alternate -, +, -, ... (the entering cell
        // itself takes +).
        struct CycleCell {
            int i, j;
            bool minus;
        };
        std::vector<CycleCell> cells;
        for (std::size_t t = 0; t + 1 < path.size(); ++t) {
            const int a = path[t], b = path[t + 1];
            const int i = a < m_ ? a : b;
            const int j = a < m_ ? b - m_ : a - m_;
            cells.push_back({i, j, t % 2 == 0});
        }

        Rational theta = flow_[cells[0].i][cells[0].j];
        int leaving = 0;
        for (std::size_t t = 1; t < cells.size(); ++t) {
            if (!cells[t].minus) continue;
            if (flow_[cells[t].i][cells[t].j] < theta) {
                theta = flow_[cells[t].i][cells[t].j];
                leaving = static_cast<int>(t);
            }
        }
        for (const auto& cell : cells) {
            flow_[cell.i][cell.j] =
                cell.minus ? flow_[cell.i][cell.j] - theta : flow_[cell.i][cell.j] + theta;
        }
        flow_[ei][ej] = flow_[ei][ej] + theta;
        basic_[ei][ej] = true;
        basic_[cells[static_cast<std::size_t>(leaving)].i]
              [cells[static_cast<std::size_t>(leaving)].j] = false;
    }

    int m_, n_;
    std::vector<std::vector<double>> cost_;
    std::vector<std::vector<Rational>> flow_;
    std::vector<std::vector<bool>> basic_;
    std::vector<double> u_, v_;
};

std::vector<std::vector<double>> thompson_costs(const DiscreteMeasure& mu,
                                                const DiscreteMeasure& nu) {
    if (mu.dim() != nu.dim()) {
        throw DimensionMismatch("wasserstein: dimensions " + std::to_string(mu.dim()) + " and " +
                                std::to_string(nu.dim()) + " differ");
    }
    std::vector<std::vector<double>> cost(mu.size(), std::vector<double>(nu.size(), 0.0));
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = 0; j < nu.size(); ++j)
            cost[i][j] = thompson_distance(mu.atom(i), nu.atom(j));
    return cost;
}

TransportSimplex solved_simplex(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
    if (!(p >= 1.0)) throw ParamOutOfRange("wasserstein_p: p must be >= 1");
    auto cost = thompson_costs(mu, nu);
    for (auto& row : cost)
        for (double& c : row) c = std::pow(c, p);
    TransportSimplex simplex(mu, nu, std::move(cost));
    simplex.solve();
    return simplex;
}

} // namespace

double wasserstein_p(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
    const double total = solved_simplex(mu, nu, p).objective();
    return std::pow(std::max(total, 0.0), 1.0 / p);
}

Coupling wasserstein_p_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
    return solved_simplex(mu, nu, p).coupling();
}

double wasserstein_inf(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    const auto cost = thompson_costs(mu, nu);
    std::vector<double> levels;
    for (const auto& row : cost) levels.insert(levels.end(), row.begin(), row.end());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    auto feasible_at = [&](double threshold) {
        std::vector<std::vector<bool>> admissible(mu.size(), std::vector<bool>(nu.size(), false));
        for (std::size_t i = 0; i < mu.size(); ++i)
            for (std::size_t j = 0; j < nu.size(); ++j) admissible[i][j] = cost[i][j] <= threshold;
        return detail::transport_feasible(mu, nu, admissible);
    };

    // Smallest level at which the restricted bipartite graph is feasible;
    // the top level (all edges) always is.
    std::size_t lo = 0, hi = levels.size() - 1;
    if (feasible_at(levels[lo])) return levels[lo];
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (feasible_at(levels[mid])) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return levels[hi];
}

ContractionReport contraction_check(const MeanRecipe& m, const DiscreteMeasure& mu,
                                    const DiscreteMeasure& nu, const SolverConfig& cfg) {
    constexpr double kDeltaTol = 1e-8;
    const double dt = thompson_distance(eval_recipe(m, mu, cfg), eval_recipe(m, nu, cfg));
    const double delta = delta_T(mu, nu, kDeltaTol);
    const double dwinf = wasserstein_inf(mu, nu);
    const double slack = 1e-7 + cfg.residual_tol + kDeltaTol;
    const bool pass = dt <= delta + slack && delta <= dwinf + slack;
    return ContractionReport{dt, delta, dwinf, pass};
}

} // namespace opmeans
