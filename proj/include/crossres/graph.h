#ifndef CROSSRES_GRAPH_H_
#define CROSSRES_GRAPH_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crossres/corpus.h"
#include "crossres/learners.h"
#include "crossres/sparse.h"

namespace crossres::graph {

enum class VertexKind { user, hashtag };

std::string_view to_string(VertexKind kind);

// "@name" for users and "#tag" for hashtags, lowercased.
std::string user_key(std::string_view username);
std::string hashtag_key(std::string_view tag);

struct Vertex {
  std::string key;
  VertexKind kind = VertexKind::user;
};

// Undirected mention/hashtag co-occurrence graph of one domain. Vertices are
// sorted by key, so the graph does not depend on post order.
struct DomainGraph {
  Domain domain = Domain::twitter;
  std::vector<Vertex> vertices;
  std::map<std::pair<uint32_t, uint32_t>, int64_t> edges;  // first < second
  size_t skipped_posts = 0;

  std::optional<uint32_t> find(std::string_view key) const;
};

// Vertex per posting user, mentioned user and hashtag; one unit of weight on
// author-mention and author-hashtag edges per post. Self-mentions are ignored.
DomainGraph build_graph(const std::vector<Post>& posts, Domain domain);

enum class SeedMode { hashtags, hashtags_and_usernames };

std::string_view to_string(SeedMode mode);
SeedMode parse_seed_mode(std::string_view s);  // throws ConfigError

struct SeedSet {
  SeedMode mode = SeedMode::hashtags;
  std::vector<std::pair<std::string, std::string>> pairs;  // (twitter key, instagram key)
  bool degenerate = false;                                 // no seeds found
};

SeedSet select_seeds(const DomainGraph& twitter, const DomainGraph& instagram, SeedMode mode);

enum class Origin { twitter, instagram, seed };

std::string_view to_string(Origin origin);

struct Neighbor {
  uint32_t vertex;
  double weight;
};

// Disjoint union of the two domain graphs with each seed pair collapsed into
// one vertex. Immutable apart from the community assignment.
class AlignedGraph {
 public:
  struct AlignedVertex {
    std::string key;
    VertexKind kind;
    Origin origin;
  };

  size_t size() const { return vertices_.size(); }
  const AlignedVertex& vertex(uint32_t v) const { return vertices_[v]; }
  std::span<const Neighbor> neighbors(uint32_t v) const { return adjacency_[v]; }
  std::optional<uint32_t> find(Domain domain, std::string_view key) const;
  // Undirected edges (u < v) with summed weights, ordered by (u, v).
  std::vector<std::pair<std::pair<uint32_t, uint32_t>, int64_t>> edges() const;
  size_t edge_count() const;

  // Community id per vertex, -1 outside the largest connected component.
  const std::vector<int32_t>& communities() const { return communities_; }
  void set_communities(std::vector<int32_t> communities);
  int32_t community_count() const;

  friend AlignedGraph align_graphs(const DomainGraph&, const DomainGraph&, const SeedSet&);

 private:
  std::vector<AlignedVertex> vertices_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::map<std::string, uint32_t, std::less<>> twitter_lookup_;
  std::map<std::string, uint32_t, std::less<>> instagram_lookup_;
  std::vector<int32_t> communities_;
};

// Throws DataError naming the first seed vertex missing from its graph.
AlignedGraph align_graphs(const DomainGraph& twitter, const DomainGraph& instagram, const SeedSet& seeds);

// Vertices of the largest connected component (ties go to the component
// holding the smallest vertex id), ascending.
std::vector<uint32_t> largest_component(const AlignedGraph& g);

// Louvain modularity maximization on the largest connected component. The
// seed fixes the vertex visiting order; ties go to the smaller community id.
// Returns the assignment; -1 for vertices outside the component.
std::vector<int32_t> detect_communities(const AlignedGraph& g, uint64_t seed);

// Modularity of a partition of the whole graph; vertices labeled -1 are
// treated as singletons.
double modularity(const AlignedGraph& g, const std::vector<int32_t>& communities);

enum class FeatureKind { community, neighborhood };

// For hop 2: the ball includes the 1-hop neighbors, the ring holds only
// vertices at distance exactly 2.
enum class TwoHopScope { ball, ring };

struct GraphFeature {
  FeatureKind kind = FeatureKind::community;
  int hop = 1;
  SparseVector vector;  // L2-normalized
};

// Histogram of community ids over the user's neighbors (1-hop weighted by
// edge weight, 2-hop ring by 1). nullopt for isolates and vertices outside
// the largest component.
std::optional<GraphFeature> community_feature(const AlignedGraph& g, uint32_t vertex, int hop,
                                              TwoHopScope scope = TwoHopScope::ball);

// Weights over aligned vertex ids (1-hop by edge weight, 2-hop ring by 1).
// nullopt for isolates.
std::optional<GraphFeature> neighborhood_feature(const AlignedGraph& g, uint32_t vertex, int hop,
                                                 TwoHopScope scope = TwoHopScope::ring);

// Cosine of the two features; nullopt when either vector is zero. Throws
// DataError when kind or hop differ.
std::optional<double> dp_similarity(const GraphFeature& a, const GraphFeature& b);

// Linear SVM over the elementwise product of the two feature vectors.
class PairSvm {
 public:
  struct Example {
    const GraphFeature* twitter;
    const GraphFeature* instagram;
    bool same_entity;
  };

  // Throws DataError when there are no examples or only one class.
  static PairSvm train(const std::vector<Example>& examples, const learners::SvmParams& params = {});
  double score(const GraphFeature& twitter, const GraphFeature& instagram) const;
  const learners::LinearModel& model() const { return model_; }

 private:
  learners::LinearModel model_;
};

// Snapshot TSVs. Edges: src, dst, weight, src_kind, dst_kind ordered by
// (src, dst). Vertices: id/key, kind, origin, community.
void write_edges_tsv(std::ostream& out, const DomainGraph& g);
void write_vertices_tsv(std::ostream& out, const DomainGraph& g);
void write_edges_tsv(std::ostream& out, const AlignedGraph& g);
void write_vertices_tsv(std::ostream& out, const AlignedGraph& g);

}  // namespace crossres::graph

#endif  // CROSSRES_GRAPH_H_
