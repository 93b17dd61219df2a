#include "aggnash/graph.hpp"

#include "aggnash/error.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <random>
#include <sstream>

namespace aggnash {

namespace {

std::vector<bool> reachable(const Matrix& w, std::size_t start, bool forward) {
    const auto n = static_cast<std::size_t>(w.rows());
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> frontier;
    seen[start] = true;
    frontier.push(start);
    while (!frontier.empty()) {
        const std::size_t u = frontier.front();
        frontier.pop();
        for (std::size_t v = 0; v < n; ++v) {
            // Edge u -> v exists when v receives from u, i.e. w(v, u) > 0.
            const double weight = forward ? w(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u))
                                          : w(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v));
            if (weight > 0.0 && !seen[v]) {
                seen[v] = true;
                frontier.push(v);
            }
        }
    }
    return seen;
}

bool all_true(const std::vector<bool>& v) {
    return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
}

}  // namespace

Digraph::Digraph(Matrix weights) : weights_(std::move(weights)) {
    if (weights_.rows() != weights_.cols()) {
        throw Error("graph", "weight matrix must be square");
    }
    for (Eigen::Index i = 0; i < weights_.rows(); ++i) {
        if (weights_(i, i) != 0.0) {
            throw Error("graph", "self loop at node " + std::to_string(i));
        }
        for (Eigen::Index j = 0; j < weights_.cols(); ++j) {
            if (!(weights_(i, j) >= 0.0) || !std::isfinite(weights_(i, j))) {
                throw Error("graph", "weight (" + std::to_string(i) + ", " + std::to_string(j) +
                                         ") must be finite and nonnegative");
            }
        }
    }
}

Digraph Digraph::empty(std::size_t nodes) {
    const auto n = static_cast<Eigen::Index>(nodes);
    return Digraph(Matrix::Zero(n, n));
}

Digraph Digraph::scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor)) {
        throw Error("graph", "scale factor must be positive and finite");
    }
    Digraph out(weights_ * factor);
    out.generation_retries = generation_retries;
    return out;
}

Digraph Digraph::permuted(const std::vector<std::size_t>& perm) const {
    const auto n = static_cast<Eigen::Index>(nodes());
    if (perm.size() != nodes()) {
        throw Error("graph", "permutation length does not match node count");
    }
    Matrix w = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            w(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]),
              static_cast<Eigen::Index>(perm[static_cast<std::size_t>(j)])) = weights_(i, j);
        }
    }
    return Digraph(std::move(w));
}

Matrix laplacian(const Digraph& g) {
    Matrix l = -g.weights();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        // Diagonal set so the row sums to zero in the same summation order.
        double off = 0.0;
        for (Eigen::Index j = 0; j < l.cols(); ++j) {
            if (j != i) {
                off += l(i, j);
            }
        }
        l(i, i) = -off;
    }
    return l;
}

Matrix symmetric_laplacian(const Digraph& g) {
    const Matrix l = laplacian(g);
    return 0.5 * (l + l.transpose());
}

Vector symmetric_spectrum(const Digraph& g) {
    if (g.nodes() == 0) {
        return Vector();
    }
    return Eigen::SelfAdjointEigenSolver<Matrix>(symmetric_laplacian(g), Eigen::EigenvaluesOnly)
        .eigenvalues();
}

bool is_weight_balanced(const Digraph& g, double tol) {
    if (tol < 0.0) {
        throw Error("graph", "balance tolerance must be nonnegative");
    }
    const Vector imbalance = g.in_degrees() - g.out_degrees();
    return imbalance.size() == 0 || imbalance.cwiseAbs().maxCoeff() <= tol;
}

bool is_strongly_connected(const Digraph& g) {
    if (g.nodes() <= 1) {
        return true;
    }
    return all_true(reachable(g.weights(), 0, true)) && all_true(reachable(g.weights(), 0, false));
}

std::size_t zero_eigenvalue_multiplicity(const Digraph& g, double tol) {
    if (g.nodes() == 0) {
        return 0;
    }
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Matrix>(laplacian(g), false).eigenvalues();
    const double scale = std::max(1.0, laplacian(g).norm());
    return static_cast<std::size_t>(
        std::count_if(ev.begin(), ev.end(), [&](const auto& z) { return std::abs(z) <= tol * scale; }));
}

double lambda2_zero_threshold(const Digraph& g) {
    return 1e-9 * std::max(1.0, laplacian(g).norm());
}

double lambda2(const Digraph& g) {
    if (g.nodes() < 2) {
        throw Error("graph", "lambda2 needs at least two nodes");
    }
    if (!is_weight_balanced(g, 1e-9 * std::max(1.0, g.weights().cwiseAbs().maxCoeff()))) {
        throw Error("graph", "lambda2 rejected: is_weight_balanced is false");
    }
    if (!is_strongly_connected(g)) {
        throw Error("graph", "lambda2 rejected: is_strongly_connected is false");
    }
    const Vector spectrum = symmetric_spectrum(g);
    const double threshold = lambda2_zero_threshold(g);
    for (Eigen::Index k = 0; k < spectrum.size(); ++k) {
        if (spectrum[k] > threshold) {
            return spectrum[k];
        }
    }
    throw Error("graph", "no positive eigenvalue above threshold");
}

Digraph build_directed_cycle(std::size_t nodes, double weight) {
    if (nodes < 2) {
        throw Error("graph", "directed cycle needs N >= 2");
    }
    if (!(weight > 0.0)) {
        throw Error("graph", "cycle weight must be positive");
    }
    const auto n = static_cast<Eigen::Index>(nodes);
    Matrix w = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        w(i, (i + n - 1) % n) += weight;  // i receives from i-1
    }
    return Digraph(std::move(w));
}

Digraph build_complete(std::size_t nodes, double weight) {
    if (nodes < 2) {
        throw Error("graph", "complete graph needs N >= 2");
    }
    if (!(weight > 0.0)) {
        throw Error("graph", "complete graph weight must be positive");
    }
    const auto n = static_cast<Eigen::Index>(nodes);
    Matrix w = Matrix::Constant(n, n, weight);
    w.diagonal().setZero();
    return Digraph(std::move(w));
}

Digraph build_er_undirected(std::size_t nodes, double p, std::uint64_t seed,
                            std::size_t max_retries) {
    if (nodes < 2) {
        throw Error("graph", "ER graph needs N >= 2");
    }
    if (!(p > 0.0 && p <= 1.0)) {
        throw Error("graph", "ER edge probability must lie in (0, 1]");
    }
    const auto n = static_cast<Eigen::Index>(nodes);
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution edge(p);
    for (std::size_t attempt = 0; attempt <= max_retries; ++attempt) {
        Matrix w = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) {
                if (edge(rng)) {
                    w(i, j) = 1.0;
                    w(j, i) = 1.0;
                }
            }
        }
        Digraph g(std::move(w));
        if (is_strongly_connected(g)) {
            g.generation_retries = attempt;
            return g;
        }
    }
    throw Error("graph", "ER builder found no connected graph after " +
                             std::to_string(max_retries) + " retries");
}

Digraph scale_to_lambda2(const Digraph& g, double target) {
    if (!(target > 0.0)) {
        throw Error("graph", "target lambda2 must be positive");
    }
    return g.scaled(target / lambda2(g));
}

std::string graph_to_json(const Digraph& g) {
    nlohmann::json edges = nlohmann::json::array();
    const Matrix& w = g.weights();
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            if (w(i, j) > 0.0) {
                edges.push_back({{"from", j}, {"to", i}, {"weight", w(i, j)}});
            }
        }
    }
    nlohmann::json doc = {{"nodes", g.nodes()}, {"edges", std::move(edges)}};
    return doc.dump(2) + "\n";
}

Digraph graph_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error("graph", std::string("unreadable graph file: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges")) {
        throw Error("graph", "graph file needs \"nodes\" and \"edges\"");
    }
    for (const auto& [key, _] : doc.items()) {
        if (key != "nodes" && key != "edges") {
            throw Error("graph", "unknown key \"" + key + "\" in graph file");
        }
    }
    if (!doc["nodes"].is_number_unsigned()) {
        throw Error("graph", "\"nodes\" must be a nonnegative integer");
    }
    const auto n = doc["nodes"].get<Eigen::Index>();
    Matrix w = Matrix::Zero(n, n);
    for (const auto& e : doc["edges"]) {
        if (!e.is_object() || !e.contains("from") || !e.contains("to") || !e.contains("weight")) {
            throw Error("graph", "every edge needs \"from\", \"to\", \"weight\"");
        }
        const auto from = e["from"].get<Eigen::Index>();
        const auto to = e["to"].get<Eigen::Index>();
        const double weight = e["weight"].get<double>();
        if (from < 0 || to < 0 || from >= n || to >= n) {
            throw Error("graph", "edge endpoint out of range");
        }
        if (w(to, from) != 0.0) {
            throw Error("graph", "duplicate edge " + std::to_string(from) + " -> " +
                                     std::to_string(to));
        }
        if (!(weight > 0.0)) {
            throw Error("graph", "edge weights must be positive");
        }
        w(to, from) = weight;
    }
    return Digraph(std::move(w));
}

void save_graph(const Digraph& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("graph", "cannot write " + path.string());
    }
    out << graph_to_json(g);
}

Digraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("graph", "cannot read " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return graph_from_json(buf.str());
}

}  // namespace aggnash
