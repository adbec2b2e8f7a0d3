#pragma once

#include <span>
#include <string>
#include <vector>

#include "vclose/word.hpp"

namespace vclose {

inline constexpr int kDefaultFringeVertexLimit = 12;

// Folded core graph of a finitely generated subgroup of F_r (its Stallings
// graph): a connected, deterministic and co-deterministic automaton over the
// positive letters, with a distinguished base vertex and no degree-1 vertex
// other than possibly the base.
//
// Instances are always stored in canonical form: vertices are renumbered by
// a breadth-first traversal from the base that scans edge slots in the fixed
// letter order a, A, b, B, ...  Because folded graphs are deterministic this
// renumbering is isomorphism-invariant, so operator== decides based
// isomorphism and containers of graphs behave set-like.
class SubgroupGraph {
 public:
  SubgroupGraph() = default;  // graph of the trivial subgroup of F_0

  // Stallings folding of the bouquet of `gens` loops, then core trimming.
  static SubgroupGraph fold(std::span<const Word> gens, int rank);
  // The rose: one vertex with a loop per generator (the whole group F_r).
  static SubgroupGraph whole_group(int rank);

  int alphabet_rank() const { return rank_; }
  int vertex_count() const { return vertices_; }
  int base() const { return 0; }
  int edge_count() const;  // positive edges
  // rank of the subgroup: |edges| - |vertices| + 1 for a connected graph
  int subgroup_rank() const { return edge_count() - vertices_ + 1; }

  // Follows `l` (negative letters walk edges backwards); -1 if undefined.
  int step(int v, Letter l) const;
  // Reads the whole word from `from`; -1 if the path dies.
  int read(const Word& w, int from) const;

  bool contains(const Word& w) const;

  // A free basis of the subgroup: one word per non-tree edge of a spanning
  // tree, sorted shortlex.  fold(basis()) reproduces this graph.
  std::vector<Word> basis() const;

  // Pullback construction: the graph of the intersection.
  static SubgroupGraph intersect(const SubgroupGraph& a, const SubgroupGraph& b);

  // Does this subgroup contain `sub`?
  bool includes(const SubgroupGraph& sub) const;

  // All elements of length <= max_len, in shortlex order (starts with "").
  std::vector<Word> enumerate_elements(int max_len) const;

  // All distinct folded quotients of this graph: every way of identifying
  // vertices, folded and trimmed.  This is a finite superset of the
  // algebraic extensions, hence contains the verbal closure.  Throws
  // FringeTooLarge above `vertex_limit` vertices (partition count grows like
  // the Bell numbers).  The result always contains the graph itself and is
  // sorted canonically.
  std::vector<SubgroupGraph> fringe(int vertex_limit = kDefaultFringeVertexLimit) const;

  // The folded quotient identifying vertices u and v (used by fringe).
  SubgroupGraph merged(int u, int v) const;

  std::string to_dot() const;          // positive edges only, base doublecircled
  std::string to_json_string() const;  // {"vertices":n,"base":0,"edges":[...]}
  static SubgroupGraph from_json_string(const std::string& text);

  bool operator==(const SubgroupGraph&) const = default;
  // Arbitrary but stable total order (vertex count, then adjacency tables).
  bool operator<(const SubgroupGraph& o) const;

 private:
  friend class GraphBuilder;

  int slot(int v, int g) const { return v * rank_ + g - 1; }

  int rank_ = 0;
  int vertices_ = 1;
  // fwd_[slot(v,g)] = head of the g-edge out of v, bwd_ its mirror; -1 none.
  std::vector<int> fwd_;
  std::vector<int> bwd_;
};

}  // namespace vclose
