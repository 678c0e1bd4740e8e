// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#pragma once

#include <deque>
#include <limits>
#include <vector>

#include "opmeans/measure.hpp"

namespace opmeans::detail {

/// Plain Edmonds–Karp max-flow on a dense capacity matrix. Graph sizes in
/// this library are tiny (two atom lists plus source and sink), so
/// simplicity wins over sparse structures.
class MaxFlow {
  public:
    explicit MaxFlow(int n) : n_(n), cap_(n, std::vector<long long>(n, 0)) {}

    void add_edge(int u, int v, long long c) { cap_[u][v] += c; }

    long long run(int s, int t) {
        long long total = 0;
        for (;;) {
            std::vector<int> parent(n_, -1);
            parent[s] = s;
            std::deque<int> queue{s};
            while (!queue.empty() && parent[t] < 0) {
                int u = queue.front();
                queue.pop_front();
                for (int v = 0; v < n_; ++v) {
                    if (parent[v] < 0 && cap_[u][v] > 0) {
                        parent[v] = u;
                        queue.push_back(v);
                    }
                }
            }
            if (parent[t] < 0) return total;
            long long aug = std::numeric_limits<long long>::max();
            for (int v = t; v != s; v = parent[v]) aug = std::min(aug, cap_[parent[v]][v]);
            for (int v = t; v != s; v = parent[v]) {
                cap_[parent[v]][v] -= aug;
                cap_[v][parent[v]] += aug;
            }
            total += aug;
        }
    }

    /// Residual capacity left on (u, v) after run().
    [[nodiscard]] long long residual(int u, int v) const { return cap_[u][v]; }

    /// Nodes reachable from s in the residual graph (the min-cut side).
    [[nodiscard]] std::vector<bool> reachable(int s) const {
        std::vector<bool> seen(n_, false);
        seen[s] = true;
        std::deque<int> queue{s};
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int v = 0; v < n_; ++v) {
                if (!seen[v] && cap_[u][v] > 0) {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        return seen;
    }

  private:
    int n_;
    std::vector<std::vector<long long>> cap_;
};

/// Least common multiple of all weight denominators of the two measures;
/// scaling by it turns both weight vectors into integers.
inline long long common_denominator(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    long long d = 1;
    for (const auto& w : mu.weights()) d = checked_lcm(d, w.den());
    for (const auto& w : nu.weights()) d = checked_lcm(d, w.den());
    return d;
}

/// w * d as an exact integer (d must be a multiple of w's denominator).
inline long long scaled_units(const Rational& w, long long d) {
    return w.num() * (d / w.den());
}

/// Runs the bipartite transport feasibility flow: supplies from mu, demands
/// from nu, unbounded arcs exactly where `admissible` is true. Returns true
/// iff the full mass can be routed.
inline bool transport_feasible(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                               const std::vector<std::vector<bool>>& admissible) {
    const int m = static_cast<int>(mu.size());
    const int n = static_cast<int>(nu.size());
    const long long d = common_denominator(mu, nu);
    MaxFlow flow(m + n + 2);
    const int source = 0;
    const int sink = m + n + 1;
    for (int i = 0; i < m; ++i) flow.add_edge(source, 1 + i, scaled_units(mu.weight(i), d));
    for (int j = 0; j < n; ++j) flow.add_edge(1 + m + j, sink, scaled_units(nu.weight(j), d));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            if (admissible[i][j]) flow.add_edge(1 + i, 1 + m + j, d + 1);
    return flow.run(source, sink) == d;
}

} // namespace opmeans::detail
