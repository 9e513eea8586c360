#include "evograph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#include <nlohmann/json.hpp>

namespace evograph {

EvolutionaryGraph::EvolutionaryGraph(int n, std::vector<Edge> edges,
                                     std::vector<std::string> labels)
    : n_(n) {
  if (n < 0) throw std::invalid_argument("vertex count must be non-negative");
  if (labels.empty()) labels.assign(n, "plain");
  if (static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("label count does not match vertex count");

  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });

  // merge parallel edges, reject self-loops
  std::vector<Edge> merged;
  merged.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
      throw std::invalid_argument("edge endpoint out of range");
    if (e.src == e.dst) throw std::invalid_argument("self-loops are not allowed");
    if (!merged.empty() && merged.back().src == e.src && merged.back().dst == e.dst)
      merged.back().w += e.w;
    else
      merged.push_back(e);
  }

  offsets_.assign(n + 1, 0);
  for (const Edge& e : merged) offsets_[e.src + 1]++;
  for (int u = 0; u < n; ++u) offsets_[u + 1] += offsets_[u];
  targets_.reserve(merged.size());
  weights_.reserve(merged.size());
  for (const Edge& e : merged) {
    targets_.push_back(e.dst);
    weights_.push_back(e.w);
  }

  uniform_out_.assign(n, true);
  for (int u = 0; u < n; ++u) {
    int deg = out_degree(u);
    if (deg == 0) continue;
    double sum = 0.0;
    double first = weights_[offsets_[u]];
    for (int i = 0; i < deg; ++i) {
      double w = weights_[offsets_[u] + i];
      if (!(w > 0.0)) throw std::invalid_argument("edge weights must be positive");
      sum += w;
      if (w != first) uniform_out_[u] = false;
    }
    if (std::fabs(sum - 1.0) > kWeightTol)
      throw std::invalid_argument("out-weights of vertex " + std::to_string(u) +
                                  " do not sum to 1");
  }
  labels_ = std::move(labels);
}

std::vector<Edge> EvolutionaryGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(targets_.size());
  for (int u = 0; u < n_; ++u)
    for (int i = 0; i < out_degree(u); ++i)
      out.push_back({u, target(u, i), weight(u, i)});
  return out;
}

double EvolutionaryGraph::in_weight(int u) const {
  double s = 0.0;
  for (int v = 0; v < n_; ++v)
    for (int i = 0; i < out_degree(v); ++i)
      if (target(v, i) == u) s += weight(v, i);
  return s;
}

Family family_from_string(const std::string& name) {
  if (name == "complete") return Family::kComplete;
  if (name == "star") return Family::kStar;
  if (name == "superstar") return Family::kSuperstar;
  if (name == "metafunnel") return Family::kMetafunnel;
  if (name == "megastar") return Family::kMegastar;
  if (name == "megastar_family") return Family::kMegastarFamily;
  if (name == "counterexample") return Family::kCounterexample;
  throw std::invalid_argument("unknown family: " + name);
}

std::string family_to_string(Family f) {
  switch (f) {
    case Family::kComplete: return "complete";
    case Family::kStar: return "star";
    case Family::kSuperstar: return "superstar";
    case Family::kMetafunnel: return "metafunnel";
    case Family::kMegastar: return "megastar";
    case Family::kMegastarFamily: return "megastar_family";
    case Family::kCounterexample: return "counterexample";
  }
  return "?";
}

long long default_size_cap() {
  static long long cap = [] {
    const char* env = std::getenv("EVOGRAPH_SIZE_CAP");
    if (env) {
      char* end = nullptr;
      long long v = std::strtoll(env, &end, 10);
      if (end != env && v > 0) return v;
    }
    return 50'000'000LL;
  }();
  return cap;
}

namespace {

void check_cap(long long n, long long cap, const char* family) {
  if (cap <= 0) cap = default_size_cap();
  if (n > cap)
    throw SizeLimitError(std::string(family) + " would have " +
                         std::to_string(n) + " vertices, above cap " +
                         std::to_string(cap));
}

std::string tag(const char* role, long long j) {
  return std::string(role) + "(" + std::to_string(j) + ")";
}

std::string tag2(const char* role, long long a, long long b) {
  return std::string(role) + "(" + std::to_string(a) + "," +
         std::to_string(b) + ")";
}

}  // namespace

EvolutionaryGraph make_complete(long long n) {
  if (n < 2) throw std::invalid_argument("complete graph needs n >= 2");
  check_cap(n, 0, "complete");
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1));
  double w = 1.0 / static_cast<double>(n - 1);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v) edges.push_back({u, v, w});
  return EvolutionaryGraph(static_cast<int>(n), std::move(edges),
                           std::vector<std::string>(n, "plain"));
}

EvolutionaryGraph make_star(long long leaves) {
  if (leaves < 1) throw std::invalid_argument("star needs at least one leaf");
  check_cap(leaves + 1, 0, "star");
  int n = static_cast<int>(leaves + 1);
  std::vector<Edge> edges;
  edges.reserve(2 * leaves);
  double w = 1.0 / static_cast<double>(leaves);
  std::vector<std::string> labels(n);
  labels[0] = "centre";
  for (int v = 1; v < n; ++v) {
    edges.push_back({0, v, w});
    edges.push_back({v, 0, 1.0});
    labels[v] = "plain";
  }
  return EvolutionaryGraph(n, std::move(edges), std::move(labels));
}

EvolutionaryGraph make_superstar(long long k, long long l, long long m,
                                 long long size_cap) {
  if (k < 1 || l < 1 || m < 1)
    throw std::invalid_argument("superstar needs k, l, m >= 1");
  long long n = l * (k + m) + 1;
  check_cap(n, size_cap, "superstar");

  std::vector<Edge> edges;
  std::vector<std::string> labels(n);
  labels[0] = "centre";
  double wc = 1.0 / static_cast<double>(l * m);

  // branch i occupies [base, base + m + k): m reservoir vertices, then the
  // path v_{i,1}..v_{i,k}
  for (long long i = 0; i < l; ++i) {
    long long base = 1 + i * (m + k);
    long long path0 = base + m;
    for (long long s = 0; s < m; ++s) {
      int u = static_cast<int>(base + s);
      labels[u] = tag("reservoir", i + 1);
      edges.push_back({0, u, wc});
      edges.push_back({u, static_cast<int>(path0), 1.0});
    }
    for (long long j = 0; j < k; ++j) {
      int u = static_cast<int>(path0 + j);
      labels[u] = tag2("path", i + 1, j + 1);
      int next = (j + 1 < k) ? u + 1 : 0;
      edges.push_back({u, next, 1.0});
    }
  }
  return EvolutionaryGraph(static_cast<int>(n), std::move(edges),
                           std::move(labels));
}

EvolutionaryGraph make_metafunnel(long long k, long long l, long long m,
                                  long long size_cap) {
  if (k < 1 || l < 1 || m < 1)
    throw std::invalid_argument("metafunnel needs k, l, m >= 1");
  // n = 1 + l * sum_{i=1..k} m^i, guarded against overflow
  long long cap = size_cap > 0 ? size_cap : default_size_cap();
  long long layer = 1, total = 0;
  for (long long i = 1; i <= k; ++i) {
    if (layer > cap / m) throw SizeLimitError("metafunnel layer size overflows cap");
    layer *= m;
    total += layer;
    if (total > cap) throw SizeLimitError("metafunnel exceeds size cap");
  }
  long long n = 1 + l * total;
  check_cap(n, size_cap, "metafunnel");

  // branch j occupies layers i=1..k contiguously, layer i holding m^i
  // vertices; within a branch, layer i starts at branch_base + sum_{t<i} m^t
  std::vector<long long> layer_size(k + 1, 1);
  for (long long i = 1; i <= k; ++i) layer_size[i] = layer_size[i - 1] * m;
  std::vector<long long> layer_off(k + 2, 0);  // offset of layer i within branch
  for (long long i = 1; i <= k; ++i)
    layer_off[i + 1] = layer_off[i] + layer_size[i];

  std::vector<Edge> edges;
  std::vector<std::string> labels(n);
  labels[0] = "centre";

  auto vert = [&](long long j, long long i, long long s) -> int {
    return static_cast<int>(1 + j * total + layer_off[i] + s);
  };

  double w_top = 1.0 / static_cast<double>(l * layer_size[k]);
  for (long long j = 0; j < l; ++j) {
    for (long long i = 1; i <= k; ++i)
      for (long long s = 0; s < layer_size[i]; ++s)
        labels[vert(j, i, s)] = tag2("funnel-layer", i, j + 1);
    // V_0 x V_k: centre to every top-layer vertex
    for (long long s = 0; s < layer_size[k]; ++s)
      edges.push_back({0, vert(j, k, s), w_top});
    // V_1 x V_0: bottom layer to centre
    for (long long s = 0; s < layer_size[1]; ++s)
      edges.push_back({vert(j, 1, s), 0, 1.0});
    // V_{i+1,j} x V_{i,j}: complete bipartite downwards
    for (long long i = 1; i + 1 <= k; ++i) {
      double w = 1.0 / static_cast<double>(layer_size[i]);
      for (long long s = 0; s < layer_size[i + 1]; ++s)
        for (long long t = 0; t < layer_size[i]; ++t)
          edges.push_back({vert(j, i + 1, s), vert(j, i, t), w});
    }
  }
  return EvolutionaryGraph(static_cast<int>(n), std::move(edges),
                           std::move(labels));
}

EvolutionaryGraph make_megastar(long long k, long long l, long long m,
                                long long size_cap) {
  if (k < 1 || l < 1 || m < 1)
    throw std::invalid_argument("megastar needs k, l, m >= 1");
  long long n = 1 + l * (m + 1 + k);
  check_cap(n, size_cap, "megastar");

  std::vector<Edge> edges;
  std::vector<std::string> labels(n);
  labels[0] = "centre";
  double wc = 1.0 / static_cast<double>(l * m);

  // branch i: m reservoir vertices, feeder a_i, clique K_i (k vertices)
  for (long long i = 0; i < l; ++i) {
    long long base = 1 + i * (m + 1 + k);
    int feeder = static_cast<int>(base + m);
    long long clique0 = base + m + 1;
    for (long long s = 0; s < m; ++s) {
      int u = static_cast<int>(base + s);
      labels[u] = tag("reservoir", i + 1);
      edges.push_back({0, u, wc});
      edges.push_back({u, feeder, 1.0});
    }
    labels[feeder] = tag("feeder", i + 1);
    double wf = 1.0 / static_cast<double>(k);
    for (long long s = 0; s < k; ++s) {
      int u = static_cast<int>(clique0 + s);
      labels[u] = tag("clique", i + 1);
      edges.push_back({feeder, u, wf});
      // clique vertex: k-1 peers plus the centre, all weight 1/k
      edges.push_back({u, 0, wf});
      for (long long t = 0; t < k; ++t)
        if (t != s) edges.push_back({u, static_cast<int>(clique0 + t), wf});
    }
  }
  return EvolutionaryGraph(static_cast<int>(n), std::move(edges),
                           std::move(labels));
}

long long megastar_family_k(long long l) {
  if (l < 2) throw std::invalid_argument("megastar family needs l >= 2");
  long double v = std::pow(std::log(static_cast<long double>(l)), 23.0L);
  return static_cast<long long>(std::ceil(v));
}

EvolutionaryGraph make_megastar_family(long long l, long long size_cap) {
  long long k = megastar_family_k(l);
  long long n = 1 + l * (l + 1 + k);
  check_cap(n, size_cap, "megastar_family");
  return make_megastar(k, l, l, size_cap);
}

EvolutionaryGraph make_counterexample() {
  std::vector<Edge> edges = {
      {0, 1, 0.5}, {0, 2, 0.5},
      {1, 0, 0.75}, {1, 2, 0.25},
      {2, 0, 0.75}, {2, 1, 0.25},
  };
  return EvolutionaryGraph(3, std::move(edges), {"plain", "plain", "plain"});
}

EvolutionaryGraph make_from_params(const FamilyParams& p, long long size_cap) {
  switch (p.family) {
    case Family::kComplete: return make_complete(p.n);
    case Family::kStar: return make_star(p.l > 0 ? p.l : p.n);
    case Family::kSuperstar: return make_superstar(p.k, p.l, p.m, size_cap);
    case Family::kMetafunnel: return make_metafunnel(p.k, p.l, p.m, size_cap);
    case Family::kMegastar: return make_megastar(p.k, p.l, p.m, size_cap);
    case Family::kMegastarFamily: return make_megastar_family(p.l, size_cap);
    case Family::kCounterexample: return make_counterexample();
  }
  throw std::invalid_argument("bad family");
}

bool is_isothermal(const EvolutionaryGraph& g, double eps) {
  std::vector<double> col(g.n(), 0.0);
  for (int u = 0; u < g.n(); ++u)
    for (int i = 0; i < g.out_degree(u); ++i) col[g.target(u, i)] += g.weight(u, i);
  for (int u = 0; u < g.n(); ++u)
    if (std::fabs(col[u] - 1.0) > eps) return false;
  return true;
}

bool strongly_connected(const EvolutionaryGraph& g) {
  int n = g.n();
  if (n == 0) return false;
  if (n == 1) return true;

  // reachability from vertex 0 in g and in the reverse graph
  auto reach_all = [n](auto&& neighbours) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack = {0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      neighbours(u, [&](int v) {
        if (!seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      });
    }
    return count == n;
  };

  bool fwd = reach_all([&](int u, auto&& visit) {
    for (int i = 0; i < g.out_degree(u); ++i) visit(g.target(u, i));
  });
  if (!fwd) return false;

  std::vector<std::vector<int>> rev(n);
  for (int u = 0; u < n; ++u)
    for (int i = 0; i < g.out_degree(u); ++i) rev[g.target(u, i)].push_back(u);
  return reach_all([&](int u, auto&& visit) {
    for (int v : rev[u]) visit(v);
  });
}

std::string graph_to_json(const EvolutionaryGraph& g) {
  nlohmann::ordered_json j;
  j["n"] = g.n();
  auto& verts = j["vertices"] = nlohmann::ordered_json::array();
  for (int u = 0; u < g.n(); ++u)
    verts.push_back({{"id", u}, {"label", g.label(u)}});
  auto& edges = j["edges"] = nlohmann::ordered_json::array();
  for (const Edge& e : g.edges())
    edges.push_back({{"src", e.src}, {"dst", e.dst}, {"w", e.w}});
  return j.dump(2) + "\n";
}

EvolutionaryGraph graph_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  int n = j.at("n").get<int>();
  std::vector<std::string> labels(n, "plain");
  if (j.contains("vertices"))
    for (const auto& v : j.at("vertices"))
      labels.at(v.at("id").get<int>()) = v.value("label", "plain");
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges"))
    edges.push_back({e.at("src").get<int>(), e.at("dst").get<int>(),
                     e.at("w").get<double>()});
  return EvolutionaryGraph(n, std::move(edges), std::move(labels));
}

}  // namespace evograph
