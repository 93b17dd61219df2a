#pragma once

#include "aggnash/strategy_set.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace aggnash {

/// Weighted directed graph on nodes 0..N-1.
///
/// weights()(i, j) > 0 means node j sends to node i (i receives from j).
/// Off-diagonal weights are nonnegative and the diagonal is zero.
class Digraph {
public:
    explicit Digraph(Matrix weights);
    static Digraph empty(std::size_t nodes);

    [[nodiscard]] std::size_t nodes() const { return static_cast<std::size_t>(weights_.rows()); }
    [[nodiscard]] const Matrix& weights() const { return weights_; }

    [[nodiscard]] Vector in_degrees() const { return weights_.rowwise().sum(); }
    [[nodiscard]] Vector out_degrees() const { return weights_.colwise().sum().transpose(); }

    [[nodiscard]] Digraph scaled(double factor) const;
    /// Relabels node k as perm[k].
    [[nodiscard]] Digraph permuted(const std::vector<std::size_t>& perm) const;

    /// Retries the ER builder needed before a connected sample was drawn.
    std::size_t generation_retries = 0;

private:
    Matrix weights_;
};

/// L = D_in - A. Rows sum to zero.
[[nodiscard]] Matrix laplacian(const Digraph& g);
/// (L + L^T) / 2.
[[nodiscard]] Matrix symmetric_laplacian(const Digraph& g);
/// Ascending eigenvalues of (L + L^T) / 2.
[[nodiscard]] Vector symmetric_spectrum(const Digraph& g);

[[nodiscard]] bool is_weight_balanced(const Digraph& g, double tol = 1e-12);
[[nodiscard]] bool is_strongly_connected(const Digraph& g);
/// Number of eigenvalues of L with magnitude below `tol`.
[[nodiscard]] std::size_t zero_eigenvalue_multiplicity(const Digraph& g, double tol = 1e-9);

/// Eigenvalues at or below this are the structural zero of (L + L^T)/2.
[[nodiscard]] double lambda2_zero_threshold(const Digraph& g);

/// Smallest positive eigenvalue of (L + L^T)/2. Rejects graphs that are not
/// weight-balanced and strongly connected.
[[nodiscard]] double lambda2(const Digraph& g);

[[nodiscard]] Digraph build_directed_cycle(std::size_t nodes, double weight = 1.0);
[[nodiscard]] Digraph build_complete(std::size_t nodes, double weight = 1.0);
/// Symmetric G(N, p) with unit weights, redrawn until connected.
[[nodiscard]] Digraph build_er_undirected(std::size_t nodes, double p, std::uint64_t seed,
                                          std::size_t max_retries = 1000);
/// Multiplies all weights so that lambda2 equals `target`.
[[nodiscard]] Digraph scale_to_lambda2(const Digraph& g, double target);

/// Graph file: {"nodes": N, "edges": [{"from": j, "to": i, "weight": w}, ...]},
/// 0-based node indices, one entry per positive weight.
[[nodiscard]] std::string graph_to_json(const Digraph& g);
[[nodiscard]] Digraph graph_from_json(const std::string& text);
void save_graph(const Digraph& g, const std::filesystem::path& path);
[[nodiscard]] Digraph load_graph(const std::filesystem::path& path);

}  // namespace aggnash
