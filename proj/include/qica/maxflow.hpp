#pragma once

#include <algorithm>
#include <limits>
#include <queue>
#include <vector>

namespace qica {

/// Dinic max flow on integer capacities.
class MaxFlow {
public:
    explicit MaxFlow(int nodes) : adj_(nodes), level_(nodes), iter_(nodes) {}

    /// Returns an edge id usable with flow_on().
    int add_edge(int from, int to, long cap) {
        const int id = static_cast<int>(edges_.size());
        edges_.push_back({to, cap, 0});
        adj_[from].push_back(id);
        edges_.push_back({from, 0, 0});
        adj_[to].push_back(id + 1);
        return id;
    }

    /// Stops early once the work counter passes budget.
    long run(int s, int t, long budget = std::numeric_limits<long>::max()) {
        long total = 0;
        while (bfs(s, t)) {
            std::fill(iter_.begin(), iter_.end(), 0);
            while (long f = dfs(s, t, std::numeric_limits<long>::max())) {
                total += f;
                if (work_ > budget) return total;
            }
            if (work_ > budget) return total;
        }
        return total;
    }

    long flow_on(int edge) const { return edges_[edge].flow; }
    long work() const { return work_; }

private:
    struct Edge {
        int to;
        long cap;
        long flow;
    };

    bool bfs(int s, int t) {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<int> q;
        level_[s] = 0;
        q.push(s);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int id : adj_[v]) {
                ++work_;
                const Edge& e = edges_[id];
                if (e.cap - e.flow > 0 && level_[e.to] < 0) {
                    level_[e.to] = level_[v] + 1;
                    q.push(e.to);
                }
            }
        }
        return level_[t] >= 0;
    }

    long dfs(int v, int t, long pushed) {
        if (v == t) return pushed;
        for (auto& i = iter_[v]; i < adj_[v].size(); ++i) {
            ++work_;
            const int id = adj_[v][i];
            Edge& e = edges_[id];
            if (e.cap - e.flow <= 0 || level_[e.to] != level_[v] + 1) continue;
            if (long f = dfs(e.to, t, std::min(pushed, e.cap - e.flow))) {
                e.flow += f;
                edges_[id ^ 1].flow -= f;
                return f;
            }
        }
        return 0;
    }

    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> level_;
    std::vector<std::size_t> iter_;
    long work_ = 0;
};

}  // namespace qica
