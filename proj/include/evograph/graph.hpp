#ifndef EVOGRAPH_GRAPH_HPP
#define EVOGRAPH_GRAPH_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace evograph {

// Thrown when a requested construction would exceed the vertex-count cap.
class SizeLimitError : public std::runtime_error {
 public:
  explicit SizeLimitError(const std::string& what) : std::runtime_error(what) {}
};

struct Edge {
  int src = 0;
  int dst = 0;
  double w = 0.0;
};

// Weighted directed graph with per-source stochastic out-weights.
// Unweighted constructions embed as w_uv = 1/d+(u).
// Immutable once built; safe to share read-only across trial workers.
class EvolutionaryGraph {
 public:
  EvolutionaryGraph() = default;

  // Builds from an edge list. Parallel (u,v) edges are merged by summing
  // weights; self-loops are rejected. Out-weights of every vertex that has
  // out-edges must sum to 1 within kWeightTol.
  EvolutionaryGraph(int n, std::vector<Edge> edges,
                    std::vector<std::string> labels = {});

  int n() const { return n_; }
  int out_degree(int u) const { return offsets_[u + 1] - offsets_[u]; }
  int target(int u, int i) const { return targets_[offsets_[u] + i]; }
  double weight(int u, int i) const { return weights_[offsets_[u] + i]; }
  // True when all of u's out-weights are equal (lets samplers skip the
  // cumulative-weight search).
  bool uniform_out(int u) const { return uniform_out_[u]; }
  const std::string& label(int u) const { return labels_[u]; }
  const std::vector<std::string>& labels() const { return labels_; }
  int edge_count() const { return static_cast<int>(targets_.size()); }

  // Edges in deterministic (src, dst) order.
  std::vector<Edge> edges() const;

  // Sum of incoming weights at u; 1 for every u iff the graph is isothermal.
  double in_weight(int u) const;

  static constexpr double kWeightTol = 1e-12;

 private:
  int n_ = 0;
  std::vector<int> offsets_;   // size n_+1
  std::vector<int> targets_;
  std::vector<double> weights_;
  std::vector<bool> uniform_out_;
  std::vector<std::string> labels_;
};

enum class Family {
  kComplete,
  kStar,
  kSuperstar,
  kMetafunnel,
  kMegastar,
  kMegastarFamily,
  kCounterexample,
};

struct FamilyParams {
  Family family = Family::kComplete;
  long long k = 0;
  long long l = 0;
  long long m = 0;
  long long n = 0;  // complete-graph vertex count / star leaf count alias
};

Family family_from_string(const std::string& name);
std::string family_to_string(Family f);

// Default vertex-count cap; override with env var EVOGRAPH_SIZE_CAP or by
// passing an explicit cap to the constructors (0 = use default).
long long default_size_cap();

// Family constructors. Vertex 0 is always the centre vertex (when one
// exists); branches are laid out contiguously. Labels carry structural roles:
// "centre", "reservoir(j)", "path(j,i)", "feeder(j)", "clique(j)",
// "funnel-layer(i,j)", "plain".
EvolutionaryGraph make_complete(long long n);
EvolutionaryGraph make_star(long long leaves);
EvolutionaryGraph make_superstar(long long k, long long l, long long m,
                                 long long size_cap = 0);
EvolutionaryGraph make_metafunnel(long long k, long long l, long long m,
                                  long long size_cap = 0);
EvolutionaryGraph make_megastar(long long k, long long l, long long m,
                                long long size_cap = 0);
// k(l) = ceil((ln l)^23), m(l) = l.
EvolutionaryGraph make_megastar_family(long long l, long long size_cap = 0);
long long megastar_family_k(long long l);
// 3-vertex weighted graph that is out-stochastic but not isothermal, yet has
// regular-graph fixation probability.
EvolutionaryGraph make_counterexample();

EvolutionaryGraph make_from_params(const FamilyParams& p, long long size_cap = 0);

bool is_isothermal(const EvolutionaryGraph& g, double eps = 1e-9);
bool strongly_connected(const EvolutionaryGraph& g);

// JSON graph format:
//   {"n": int, "vertices": [{"id": int, "label": str}, ...],
//    "edges": [{"src": int, "dst": int, "w": float}, ...]}
// Edge order is deterministic (by src then dst); weights round-trip
// bit-exactly.
std::string graph_to_json(const EvolutionaryGraph& g);
EvolutionaryGraph graph_from_json(const std::string& text);

}  // namespace evograph

#endif
