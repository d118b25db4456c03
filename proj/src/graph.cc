#include "crossres/graph.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <ostream>
#include <set>

#include "crossres/errors.h"
#include "crossres/normalize.h"
#include "crossres/random.h"

namespace crossres::graph {

std::string_view to_string(VertexKind kind) { return kind == VertexKind::user ? "user" : "hashtag"; }

std::string_view to_string(SeedMode mode) {
  return mode == SeedMode::hashtags ? "hashtags" : "hashtags_and_usernames";
}

SeedMode parse_seed_mode(std::string_view s) {
  if (s == "hashtags") return SeedMode::hashtags;
  if (s == "hashtags_and_usernames") return SeedMode::hashtags_and_usernames;
  throw ConfigError("unknown seed mode '" + std::string(s) + "'");
}

std::string_view to_string(Origin origin) {
  switch (origin) {
    case Origin::twitter: return "twitter";
    case Origin::instagram: return "instagram";
    case Origin::seed: return "seed";
  }
  return "";
}

std::string user_key(std::string_view username) {
  if (!username.empty() && username.front() == '@') username.remove_prefix(1);
  return "@" + normalize::lowercase(username);
}

std::string hashtag_key(std::string_view tag) {
  if (!tag.empty() && tag.front() == '#') tag.remove_prefix(1);
  return "#" + normalize::lowercase(tag);
}

std::optional<uint32_t> DomainGraph::find(std::string_view key) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), key,
                             [](const Vertex& v, std::string_view k) { return v.key < k; });
  if (it == vertices.end() || it->key != key) return std::nullopt;
  return static_cast<uint32_t>(it - vertices.begin());
}

DomainGraph build_graph(const std::vector<Post>& posts, Domain domain) {
  DomainGraph g;
  g.domain = domain;
  std::map<std::string, VertexKind> keys;
  std::map<std::pair<std::string, std::string>, int64_t> named_edges;
  for (const auto& post : posts) {
    if (post.domain != domain) throw DataError("build_graph: post from the wrong domain");
    if (post.username.empty()) {
      ++g.skipped_posts;
      continue;
    }
    const std::string author = user_key(post.username);
    keys.emplace(author, VertexKind::user);
    auto connect = [&](const std::string& other) {
      if (other == author) return;
      named_edges[std::minmax(author, other)] += 1;
    };
    for (const auto& m : post.mentions) {
      if (m.empty()) continue;
      const std::string k = user_key(m);
      keys.emplace(k, VertexKind::user);
      connect(k);
    }
    for (const auto& h : post.hashtags) {
      if (h.empty()) continue;
      const std::string k = hashtag_key(h);
      keys.emplace(k, VertexKind::hashtag);
      connect(k);
    }
  }
  for (const auto& [key, kind] : keys) g.vertices.push_back({key, kind});
  for (const auto& [ends, weight] : named_edges) {
    const uint32_t a = *g.find(ends.first);
    const uint32_t b = *g.find(ends.second);
    g.edges[std::minmax(a, b)] = weight;
  }
  return g;
}

SeedSet select_seeds(const DomainGraph& twitter, const DomainGraph& instagram, SeedMode mode) {
  SeedSet seeds;
  seeds.mode = mode;
  for (const auto& v : twitter.vertices) {
    const bool eligible =
        v.kind == VertexKind::hashtag || (mode == SeedMode::hashtags_and_usernames && v.kind == VertexKind::user);
    if (!eligible) continue;
    const auto other = instagram.find(v.key);
    if (other && instagram.vertices[*other].kind == v.kind) seeds.pairs.emplace_back(v.key, v.key);
  }
  seeds.degenerate = seeds.pairs.empty();
  return seeds;
}

std::optional<uint32_t> AlignedGraph::find(Domain domain, std::string_view key) const {
  const auto& lookup = domain == Domain::twitter ? twitter_lookup_ : instagram_lookup_;
  auto it = lookup.find(key);
  if (it == lookup.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::pair<uint32_t, uint32_t>, int64_t>> AlignedGraph::edges() const {
  std::vector<std::pair<std::pair<uint32_t, uint32_t>, int64_t>> out;
  for (uint32_t u = 0; u < adjacency_.size(); ++u)
    for (const auto& n : adjacency_[u])
      if (u < n.vertex) out.push_back({{u, n.vertex}, static_cast<int64_t>(n.weight)});
  return out;
}

size_t AlignedGraph::edge_count() const {
  size_t twice = 0;
  for (const auto& a : adjacency_) twice += a.size();
  return twice / 2;
}

void AlignedGraph::set_communities(std::vector<int32_t> communities) {
  if (communities.size() != vertices_.size()) throw DataError("community assignment size mismatch");
  communities_ = std::move(communities);
}

int32_t AlignedGraph::community_count() const {
  int32_t top = -1;
  for (int32_t c : communities_) top = std::max(top, c);
  return top + 1;
}

AlignedGraph align_graphs(const DomainGraph& twitter, const DomainGraph& instagram, const SeedSet& seeds) {
  AlignedGraph g;
  std::map<std::string, std::string> seed_of_instagram;  // instagram key -> twitter key
  std::set<std::string> seeded_twitter;
  for (const auto& [tk, ik] : seeds.pairs) {
    if (!twitter.find(tk)) throw DataError("seed vertex '" + tk + "' is not in the twitter graph");
    if (!instagram.find(ik)) throw DataError("seed vertex '" + ik + "' is not in the instagram graph");
    if (!seeded_twitter.insert(tk).second || !seed_of_instagram.emplace(ik, tk).second)
      throw DataError("vertex appears in more than one seed pair: " + tk + " / " + ik);
  }

  std::vector<uint32_t> tw_map(twitter.vertices.size()), ig_map(instagram.vertices.size());
  for (uint32_t i = 0; i < twitter.vertices.size(); ++i) {
    const auto& v = twitter.vertices[i];
    tw_map[i] = static_cast<uint32_t>(g.vertices_.size());
    g.vertices_.push_back({v.key, v.kind, seeded_twitter.count(v.key) ? Origin::seed : Origin::twitter});
    g.twitter_lookup_.emplace(v.key, tw_map[i]);
  }
  for (uint32_t i = 0; i < instagram.vertices.size(); ++i) {
    const auto& v = instagram.vertices[i];
    auto seed = seed_of_instagram.find(v.key);
    if (seed != seed_of_instagram.end()) {
      ig_map[i] = g.twitter_lookup_.at(seed->second);
    } else {
      ig_map[i] = static_cast<uint32_t>(g.vertices_.size());
      g.vertices_.push_back({v.key, v.kind, Origin::instagram});
    }
    g.instagram_lookup_.emplace(v.key, ig_map[i]);
  }

  std::map<std::pair<uint32_t, uint32_t>, int64_t> merged;
  for (const auto& [e, w] : twitter.edges) merged[std::minmax(tw_map[e.first], tw_map[e.second])] += w;
  for (const auto& [e, w] : instagram.edges) merged[std::minmax(ig_map[e.first], ig_map[e.second])] += w;
  g.adjacency_.assign(g.vertices_.size(), {});
  for (const auto& [e, w] : merged) {
    g.adjacency_[e.first].push_back({e.second, static_cast<double>(w)});
    g.adjacency_[e.second].push_back({e.first, static_cast<double>(w)});
  }
  for (auto& a : g.adjacency_)
    std::sort(a.begin(), a.end(), [](const Neighbor& x, const Neighbor& y) { return x.vertex < y.vertex; });
  g.communities_.assign(g.vertices_.size(), -1);
  return g;
}

std::vector<uint32_t> largest_component(const AlignedGraph& g) {
  std::vector<int32_t> label(g.size(), -1);
  std::vector<uint32_t> best;
  for (uint32_t start = 0; start < g.size(); ++start) {
    if (label[start] >= 0) continue;
    std::vector<uint32_t> members{start};
    label[start] = static_cast<int32_t>(start);
    for (size_t head = 0; head < members.size(); ++head)
      for (const auto& n : g.neighbors(members[head]))
        if (label[n.vertex] < 0) {
          label[n.vertex] = static_cast<int32_t>(start);
          members.push_back(n.vertex);
        }
    if (members.size() > best.size()) best = std::move(members);
  }
  std::sort(best.begin(), best.end());
  return best;
}

namespace {

// Weighted graph for Louvain; self_loop[i] is the diagonal entry A_ii and
// degree[i] the full row sum.
struct WorkGraph {
  std::vector<std::vector<std::pair<uint32_t, double>>> adj;
  std::vector<double> self_loop;

  size_t size() const { return adj.size(); }
  double degree(uint32_t i) const {
    double k = self_loop[i];
    for (const auto& [j, w] : adj[i]) k += w;
    return k;
  }
};

// One level of local moving. Returns true if any vertex changed community.
bool local_moving(const WorkGraph& g, std::vector<uint32_t>& community, Rng& rng) {
  const size_t n = g.size();
  std::vector<double> degree(n), total(n, 0.0);
  double m2 = 0.0;
  for (uint32_t i = 0; i < n; ++i) {
    degree[i] = g.degree(i);
    m2 += degree[i];
  }
  if (m2 == 0.0) return false;
  for (uint32_t i = 0; i < n; ++i) total[community[i]] += degree[i];

  std::vector<uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  rng.shuffle(std::span<uint32_t>(order));

  std::vector<double> link(n, 0.0);
  std::vector<uint32_t> touched;
  bool any_move = false;
  constexpr double kEps = 1e-12;
  for (int pass = 0; pass < 1000; ++pass) {
    size_t moves = 0;
    for (uint32_t i : order) {
      const uint32_t own = community[i];
      touched.clear();
      touched.push_back(own);
      link[own] = 0.0;
      for (const auto& [j, w] : g.adj[i]) {
        const uint32_t c = community[j];
        if (link[c] == 0.0 && std::find(touched.begin(), touched.end(), c) == touched.end()) touched.push_back(c);
        link[c] += w;
      }
      total[own] -= degree[i];
      uint32_t best = own;
      double best_gain = link[own] - degree[i] * total[own] / m2;
      std::sort(touched.begin(), touched.end());
      for (uint32_t c : touched) {
        const double gain = link[c] - degree[i] * total[c] / m2;
        if (gain > best_gain + kEps) best = c, best_gain = gain;
      }
      total[best] += degree[i];
      community[i] = best;
      if (best != own) ++moves;
      for (uint32_t c : touched) link[c] = 0.0;
    }
    if (moves == 0) break;
    any_move = true;
  }
  return any_move;
}

// Renumbers communities densely in order of first appearance.
size_t renumber(std::vector<uint32_t>& community) {
  std::vector<int64_t> remap(community.size(), -1);
  uint32_t next = 0;
  for (auto& c : community) {
    if (remap[c] < 0) remap[c] = next++;
    c = static_cast<uint32_t>(remap[c]);
  }
  return next;
}

WorkGraph aggregate(const WorkGraph& g, const std::vector<uint32_t>& community, size_t count) {
  WorkGraph out;
  out.adj.assign(count, {});
  out.self_loop.assign(count, 0.0);
  std::vector<std::map<uint32_t, double>> acc(count);
  for (uint32_t i = 0; i < g.size(); ++i) {
    const uint32_t ci = community[i];
    out.self_loop[ci] += g.self_loop[i];
    for (const auto& [j, w] : g.adj[i]) {
      const uint32_t cj = community[j];
      if (ci == cj) out.self_loop[ci] += w;
      else acc[ci][cj] += w;
    }
  }
  for (uint32_t c = 0; c < count; ++c)
    for (const auto& [d, w] : acc[c]) out.adj[c].push_back({d, w});
  return out;
}

}  // namespace

std::vector<int32_t> detect_communities(const AlignedGraph& g, uint64_t seed) {
  std::vector<int32_t> result(g.size(), -1);
  const std::vector<uint32_t> component = largest_component(g);
  if (component.empty()) return result;

  std::vector<int64_t> local(g.size(), -1);
  for (uint32_t k = 0; k < component.size(); ++k) local[component[k]] = k;
  WorkGraph work;
  work.adj.resize(component.size());
  work.self_loop.assign(component.size(), 0.0);
  for (uint32_t k = 0; k < component.size(); ++k)
    for (const auto& n : g.neighbors(component[k]))
      work.adj[k].push_back({static_cast<uint32_t>(local[n.vertex]), n.weight});

  // membership[k] tracks the current top-level community of component vertex k.
  std::vector<uint32_t> membership(component.size());
  std::iota(membership.begin(), membership.end(), 0u);
  Rng rng(seed);
  for (int level = 0; level < 64; ++level) {
    std::vector<uint32_t> community(work.size());
    std::iota(community.begin(), community.end(), 0u);
    if (!local_moving(work, community, rng)) break;
    const size_t count = renumber(community);
    for (auto& m : membership) m = community[m];
    if (count == work.size()) break;
    work = aggregate(work, community, count);
  }
  renumber(membership);
  for (uint32_t k = 0; k < component.size(); ++k) result[component[k]] = static_cast<int32_t>(membership[k]);
  return result;
}

double modularity(const AlignedGraph& g, const std::vector<int32_t>& communities) {
  // Singletons for unassigned vertices get ids past the largest community.
  std::vector<int64_t> label(g.size());
  int64_t next = 0;
  for (int32_t c : communities) next = std::max<int64_t>(next, c + 1);
  for (uint32_t v = 0; v < g.size(); ++v) label[v] = communities[v] >= 0 ? communities[v] : next++;
  std::map<int64_t, double> internal, total;
  double m2 = 0.0;
  for (uint32_t v = 0; v < g.size(); ++v)
    for (const auto& n : g.neighbors(v)) {
      m2 += n.weight;
      total[label[v]] += n.weight;
      if (label[v] == label[n.vertex]) internal[label[v]] += n.weight;
    }
  if (m2 == 0.0) return 0.0;
  double q = 0.0;
  for (const auto& [c, t] : total) q += internal[c] / m2 - (t / m2) * (t / m2);
  return q;
}

namespace {

struct Neighborhood {
  std::vector<Neighbor> one_hop;  // weighted by edge weight
  std::vector<uint32_t> ring;     // distance exactly two, ascending
};

Neighborhood neighborhood_of(const AlignedGraph& g, uint32_t v, int hop) {
  Neighborhood n;
  for (const auto& e : g.neighbors(v)) n.one_hop.push_back(e);
  if (hop < 2) return n;
  std::set<uint32_t> ring;
  for (const auto& e : n.one_hop)
    for (const auto& f : g.neighbors(e.vertex)) ring.insert(f.vertex);
  ring.erase(v);
  for (const auto& e : n.one_hop) ring.erase(e.vertex);
  n.ring.assign(ring.begin(), ring.end());
  return n;
}

void check_hop(int hop) {
  if (hop != 1 && hop != 2) throw ConfigError("hop must be 1 or 2");
}

}  // namespace

std::optional<GraphFeature> community_feature(const AlignedGraph& g, uint32_t vertex, int hop, TwoHopScope scope) {
  check_hop(hop);
  const auto& communities = g.communities();
  if (vertex >= g.size() || communities[vertex] < 0) return std::nullopt;
  const Neighborhood n = neighborhood_of(g, vertex, hop);
  std::map<uint32_t, double> histogram;
  if (hop == 1 || scope == TwoHopScope::ball)
    for (const auto& e : n.one_hop) histogram[static_cast<uint32_t>(communities[e.vertex])] += e.weight;
  for (uint32_t u : n.ring) histogram[static_cast<uint32_t>(communities[u])] += 1.0;
  GraphFeature f{FeatureKind::community, hop, l2_normalized(to_sparse(histogram))};
  if (f.vector.empty()) return std::nullopt;
  return f;
}

std::optional<GraphFeature> neighborhood_feature(const AlignedGraph& g, uint32_t vertex, int hop,
                                                 TwoHopScope scope) {
  check_hop(hop);
  if (vertex >= g.size()) return std::nullopt;
  const Neighborhood n = neighborhood_of(g, vertex, hop);
  std::map<uint32_t, double> weights;
  if (hop == 1 || scope == TwoHopScope::ball)
    for (const auto& e : n.one_hop) weights[e.vertex] += e.weight;
  for (uint32_t u : n.ring) weights[u] += 1.0;
  GraphFeature f{FeatureKind::neighborhood, hop, l2_normalized(to_sparse(weights))};
  if (f.vector.empty()) return std::nullopt;
  return f;
}

std::optional<double> dp_similarity(const GraphFeature& a, const GraphFeature& b) {
  if (a.kind != b.kind || a.hop != b.hop) throw DataError("dp_similarity: feature kind or hop mismatch");
  if (a.vector.empty() || b.vector.empty()) return std::nullopt;
  return cosine(a.vector, b.vector);
}

PairSvm PairSvm::train(const std::vector<Example>& examples, const learners::SvmParams& params) {
  if (examples.empty()) throw DataError("no complete training pairs for the graph SVM");
  std::vector<SparseVector> x;
  std::vector<int> y;
  size_t dim = 0;
  for (const auto& e : examples) {
    x.push_back(hadamard(e.twitter->vector, e.instagram->vector));
    if (!x.back().empty()) dim = std::max<size_t>(dim, x.back().back().index + 1);
    y.push_back(e.same_entity ? 1 : -1);
  }
  PairSvm svm;
  svm.model_ = learners::train_linear_svm(x, y, dim, params);
  return svm;
}

double PairSvm::score(const GraphFeature& twitter, const GraphFeature& instagram) const {
  return model_.decision(hadamard(twitter.vector, instagram.vector));
}

void write_edges_tsv(std::ostream& out, const DomainGraph& g) {
  out << "src\tdst\tweight\tsrc_kind\tdst_kind\n";
  for (const auto& [e, w] : g.edges) {
    const auto& a = g.vertices[e.first];
    const auto& b = g.vertices[e.second];
    out << a.key << '\t' << b.key << '\t' << w << '\t' << to_string(a.kind) << '\t' << to_string(b.kind) << '\n';
  }
}

void write_vertices_tsv(std::ostream& out, const DomainGraph& g) {
  out << "key\tkind\tdegree\n";
  std::vector<size_t> degree(g.vertices.size(), 0);
  for (const auto& [e, w] : g.edges) ++degree[e.first], ++degree[e.second];
  for (size_t i = 0; i < g.vertices.size(); ++i)
    out << g.vertices[i].key << '\t' << to_string(g.vertices[i].kind) << '\t' << degree[i] << '\n';
}

namespace {

std::string qualified_key(const AlignedGraph::AlignedVertex& v) {
  return std::string(to_string(v.origin)) + ":" + v.key;
}

}  // namespace

void write_edges_tsv(std::ostream& out, const AlignedGraph& g) {
  out << "src\tdst\tweight\tsrc_kind\tdst_kind\n";
  for (const auto& [e, w] : g.edges()) {
    const auto& a = g.vertex(e.first);
    const auto& b = g.vertex(e.second);
    out << qualified_key(a) << '\t' << qualified_key(b) << '\t' << w << '\t' << to_string(a.kind) << '\t'
        << to_string(b.kind) << '\n';
  }
}

void write_vertices_tsv(std::ostream& out, const AlignedGraph& g) {
  out << "id\tkey\tkind\torigin\tcommunity\n";
  for (uint32_t v = 0; v < g.size(); ++v) {
    const auto& x = g.vertex(v);
    const int32_t c = g.communities()[v];
    out << v << '\t' << x.key << '\t' << to_string(x.kind) << '\t' << to_string(x.origin) << '\t';
    if (c >= 0) out << c;
    else out << "NA";
    out << '\n';
  }
}

}  // namespace crossres::graph
