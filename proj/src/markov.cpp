#include "dpt/markov.hpp"

#include <algorithm>
#include <functional>

namespace dpt::markov {

std::vector<std::vector<int>> strongly_connected_components(const Eigen::MatrixXd& P) {
    const int n = static_cast<int>(P.rows());
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (P(i, j) > 0.0) adj[i].push_back(j);

    // Tarjan
    std::vector<int> index(n, -1), low(n, 0), stack;
    std::vector<char> on_stack(n, 0);
    std::vector<std::vector<int>> comps;
    int counter = 0;
    std::function<void(int)> visit = [&](int v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = 1;
        for (int w : adj[v]) {
            if (index[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<int> comp;
            int w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = 0;
                comp.push_back(w);
            } while (w != v);
            std::sort(comp.begin(), comp.end());
            comps.push_back(std::move(comp));
        }
    };
    for (int v = 0; v < n; ++v)
        if (index[v] < 0) visit(v);
    return comps;
}

std::vector<std::vector<int>> closed_classes(const Eigen::MatrixXd& P) {
    const int n = static_cast<int>(P.rows());
    auto comps = strongly_connected_components(P);
    std::vector<int> comp_of(n);
    for (size_t c = 0; c < comps.size(); ++c)
        for (int v : comps[c]) comp_of[v] = static_cast<int>(c);

    std::vector<std::vector<int>> closed;
    for (size_t c = 0; c < comps.size(); ++c) {
        bool leaves = false;
        for (int v : comps[c]) {
            for (int j = 0; j < n && !leaves; ++j)
                if (P(v, j) > 0.0 && comp_of[j] != static_cast<int>(c)) leaves = true;
            if (leaves) break;
        }
        if (!leaves) closed.push_back(comps[c]);
    }
    std::sort(closed.begin(), closed.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
    return closed;
}

std::vector<char> reachable_from(const Eigen::MatrixXd& P, int start) {
    const int n = static_cast<int>(P.rows());
    std::vector<char> seen(n, 0);
    std::vector<int> frontier{start};
    seen[start] = 1;
    while (!frontier.empty()) {
        int v = frontier.back();
        frontier.pop_back();
        for (int j = 0; j < n; ++j)
            if (P(v, j) > 0.0 && !seen[j]) {
                seen[j] = 1;
                frontier.push_back(j);
            }
    }
    return seen;
}

Eigen::VectorXd stationary_on(const Eigen::MatrixXd& P, const std::vector<int>& cls) {
    const int m = static_cast<int>(cls.size());
    Eigen::MatrixXd M(m, m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
            M(r, c) = P(cls[c], cls[r]) - (r == c ? 1.0 : 0.0);
    M.row(m - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs(m - 1) = 1.0;
    Eigen::VectorXd local = M.partialPivLu().solve(rhs);

    Eigen::VectorXd pi = Eigen::VectorXd::Zero(P.rows());
    for (int r = 0; r < m; ++r) pi(cls[r]) = local(r);
    return pi;
}

double balance_residual(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi) {
    return (P.transpose() * pi - pi).cwiseAbs().maxCoeff();
}

} // namespace dpt::markov
