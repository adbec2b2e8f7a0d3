#include "vclose/stallings.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <set>
#include <utility>

#include "json.hpp"
#include "vclose/errors.hpp"

namespace vclose {

namespace {

// Safety valve for degenerate fringe blowups (distinct quotients, not raw
// partitions, so this is rarely approached).
constexpr std::size_t kFringeQuotientCap = 200000;

}  // namespace

// Mutable adjacency with union-find vertex merging; folds to a deterministic
// graph, trims the core and emits a canonical SubgroupGraph.
class GraphBuilder {
 public:
  GraphBuilder(int rank, int reserve) : rank_(rank) {
    parent_.reserve(reserve);
    fwd_.reserve(reserve);
    bwd_.reserve(reserve);
    add_vertex();  // base
  }

  int add_vertex() {
    parent_.push_back(static_cast<int>(parent_.size()));
    fwd_.emplace_back(rank_, -1);
    bwd_.emplace_back(rank_, -1);
    return static_cast<int>(parent_.size()) - 1;
  }

  int find(int v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  // Adds the positive edge u --g--> v, queueing folds on label clashes.
  void add_edge(int u, int g, int v) {
    u = find(u);
    v = find(v);
    int t = fwd_[u][g - 1];
    if (t == -1)
      fwd_[u][g - 1] = v;
    else
      pending_.emplace_back(find(t), v);
    int s = bwd_[v][g - 1];
    if (s == -1)
      bwd_[v][g - 1] = u;
    else
      pending_.emplace_back(find(s), u);
  }

  void merge(int a, int b) { pending_.emplace_back(a, b); }

  void fold() {
    while (!pending_.empty()) {
      auto [a, b] = pending_.back();
      pending_.pop_back();
      a = find(a);
      b = find(b);
      if (a == b) continue;
      if (a > b) std::swap(a, b);  // keep the smaller id as representative
      parent_[b] = a;
      for (int g = 0; g < rank_; ++g) {
        if (fwd_[b][g] != -1) {
          if (fwd_[a][g] == -1)
            fwd_[a][g] = fwd_[b][g];
          else
            pending_.emplace_back(find(fwd_[a][g]), find(fwd_[b][g]));
        }
        if (bwd_[b][g] != -1) {
          if (bwd_[a][g] == -1)
            bwd_[a][g] = bwd_[b][g];
          else
            pending_.emplace_back(find(bwd_[a][g]), find(bwd_[b][g]));
        }
      }
    }
  }

  // Folds, trims non-base degree-1 vertices, canonicalises.
  SubgroupGraph finish(int base) {
    fold();
    base = find(base);

    // Compact representatives, chasing unions in the adjacency tables.
    std::vector<int> id(parent_.size(), -1);
    std::vector<int> verts;
    for (int v = 0; v < static_cast<int>(parent_.size()); ++v)
      if (find(v) == v) {
        id[v] = static_cast<int>(verts.size());
        verts.push_back(v);
      }
    int n = static_cast<int>(verts.size());
    std::vector<int> fwd(static_cast<std::size_t>(n) * rank_, -1);
    std::vector<int> bwd(static_cast<std::size_t>(n) * rank_, -1);
    for (int i = 0; i < n; ++i)
      for (int g = 0; g < rank_; ++g) {
        int t = fwd_[verts[i]][g];
        if (t != -1) fwd[static_cast<std::size_t>(i) * rank_ + g] = id[find(t)];
        int s = bwd_[verts[i]][g];
        if (s != -1) bwd[static_cast<std::size_t>(i) * rank_ + g] = id[find(s)];
      }
    int b = id[base];

    // Core trim: repeatedly delete non-base vertices of degree <= 1.
    std::vector<int> degree(n, 0);
    std::vector<bool> dead(n, false);
    auto slot = [&](int v, int g) { return static_cast<std::size_t>(v) * rank_ + g; };
    for (int v = 0; v < n; ++v)
      for (int g = 0; g < rank_; ++g)
        degree[v] += (fwd[slot(v, g)] != -1) + (bwd[slot(v, g)] != -1);
    std::deque<int> queue;
    for (int v = 0; v < n; ++v)
      if (v != b && degree[v] <= 1) queue.push_back(v);
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      if (dead[v] || v == b || degree[v] > 1) continue;
      dead[v] = true;
      for (int g = 0; g < rank_; ++g) {
        int t = fwd[slot(v, g)];
        if (t != -1 && !dead[t]) {
          bwd[slot(t, g)] = -1;
          if (--degree[t] <= 1 && t != b) queue.push_back(t);
        }
        int s = bwd[slot(v, g)];
        if (s != -1 && !dead[s]) {
          fwd[slot(s, g)] = -1;
          if (--degree[s] <= 1 && s != b) queue.push_back(s);
        }
        fwd[slot(v, g)] = bwd[slot(v, g)] = -1;
      }
    }

    // Canonical BFS renumbering from the base, slots in letter order.
    std::vector<int> pos(n, -1);
    std::vector<int> order;
    pos[b] = 0;
    order.push_back(b);
    for (std::size_t head = 0; head < order.size(); ++head) {
      int v = order[head];
      for (int g = 0; g < rank_; ++g) {
        for (int w : {fwd[slot(v, g)], bwd[slot(v, g)]}) {
          if (w != -1 && !dead[w] && pos[w] == -1) {
            pos[w] = static_cast<int>(order.size());
            order.push_back(w);
          }
        }
      }
    }

    SubgroupGraph out;
    out.rank_ = rank_;
    out.vertices_ = static_cast<int>(order.size());
    out.fwd_.assign(static_cast<std::size_t>(out.vertices_) * rank_, -1);
    out.bwd_.assign(static_cast<std::size_t>(out.vertices_) * rank_, -1);
    for (int i = 0; i < out.vertices_; ++i) {
      int v = order[i];
      for (int g = 1; g <= rank_; ++g) {
        int t = fwd[slot(v, g - 1)];
        if (t != -1) out.fwd_[out.slot(i, g)] = pos[t];
        int s = bwd[slot(v, g - 1)];
        if (s != -1) out.bwd_[out.slot(i, g)] = pos[s];
      }
    }
    return out;
  }

 private:
  int rank_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> fwd_, bwd_;
  std::vector<std::pair<int, int>> pending_;
};

SubgroupGraph SubgroupGraph::fold(std::span<const Word> gens, int rank) {
  if (rank < 0 || rank > kMaxRank)
    throw InvalidLetter("fold: alphabet rank must be between 0 and 26");
  int total = 1;
  for (const Word& w : gens) total += static_cast<int>(w.size());
  GraphBuilder builder(rank, total);
  for (const Word& w : gens) {
    if (w.rank() != rank)
      throw AlphabetMismatch("fold: generator over rank " +
                             std::to_string(w.rank()) +
                             " in a rank " + std::to_string(rank) + " fold");
    if (w.empty()) continue;
    int cur = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      int next = i + 1 == w.size() ? 0 : builder.add_vertex();
      Letter l = w.letter(i);
      if (l > 0)
        builder.add_edge(cur, l, next);
      else
        builder.add_edge(next, -l, cur);
      cur = next;
    }
  }
  return builder.finish(0);
}

SubgroupGraph SubgroupGraph::whole_group(int rank) {
  GraphBuilder builder(rank, 1);
  for (int g = 1; g <= rank; ++g) builder.add_edge(0, g, 0);
  return builder.finish(0);
}

int SubgroupGraph::edge_count() const {
  int e = 0;
  for (int x : fwd_) e += x != -1;
  return e;
}

int SubgroupGraph::step(int v, Letter l) const {
  if (v < 0) return -1;
  int g = std::abs(static_cast<int>(l));
  if (g < 1 || g > rank_) return -1;
  return l > 0 ? fwd_[slot(v, g)] : bwd_[slot(v, g)];
}

int SubgroupGraph::read(const Word& w, int from) const {
  int v = from;
  for (std::size_t i = 0; i < w.size() && v != -1; ++i) v = step(v, w.letter(i));
  return v;
}

bool SubgroupGraph::contains(const Word& w) const {
  if (w.rank() != rank_)
    throw AlphabetMismatch("contains: word rank " + std::to_string(w.rank()) +
                           " vs graph rank " + std::to_string(rank_));
  return read(w, 0) == 0;
}

std::vector<Word> SubgroupGraph::basis() const {
  // BFS spanning tree in storage order (the graph is canonical already).
  std::vector<Word> to_vertex(vertices_, Word(rank_));
  std::vector<bool> seen(vertices_, false);
  std::vector<std::pair<int, int>> tree;  // positive tree edges (tail, letter)
  seen[0] = true;
  std::deque<int> queue{0};
  std::set<std::pair<int, int>> tree_edges;  // (tail vertex, positive letter)
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int g = 1; g <= rank_; ++g) {
      for (int sign : {+1, -1}) {
        Letter l = static_cast<Letter>(sign * g);
        int w = step(v, l);
        if (w == -1 || seen[w]) continue;
        seen[w] = true;
        to_vertex[w] = multiply(to_vertex[v], Word::from_letters({&l, 1}, rank_));
        tree_edges.insert(sign > 0 ? std::make_pair(v, g) : std::make_pair(w, g));
        queue.push_back(w);
      }
    }
  }
  std::vector<Word> out;
  for (int v = 0; v < vertices_; ++v)
    for (int g = 1; g <= rank_; ++g) {
      int t = fwd_[slot(v, g)];
      if (t == -1 || tree_edges.count({v, g})) continue;
      Letter l = static_cast<Letter>(g);
      Word w = multiply(multiply(to_vertex[v], Word::from_letters({&l, 1}, rank_)),
                        invert(to_vertex[t]));
      out.push_back(std::move(w));
    }
  std::sort(out.begin(), out.end(), ShortlexLess{});
  return out;
}

SubgroupGraph SubgroupGraph::intersect(const SubgroupGraph& a, const SubgroupGraph& b) {
  if (a.rank_ != b.rank_)
    throw AlphabetMismatch("intersect: graphs over different alphabets");
  int rank = a.rank_;
  std::map<std::pair<int, int>, int> id;
  std::vector<std::pair<int, int>> verts{{0, 0}};
  id[{0, 0}] = 0;
  GraphBuilder builder(rank, a.vertex_count() * b.vertex_count());
  for (std::size_t head = 0; head < verts.size(); ++head) {
    auto [va, vb] = verts[head];
    for (int g = 1; g <= rank; ++g) {
      for (int sign : {+1, -1}) {
        Letter l = static_cast<Letter>(sign * g);
        int ta = a.step(va, l);
        int tb = b.step(vb, l);
        if (ta == -1 || tb == -1) continue;
        auto key = std::make_pair(ta, tb);
        auto it = id.find(key);
        int tid;
        if (it == id.end()) {
          tid = builder.add_vertex();
          id[key] = tid;
          verts.push_back(key);
        } else {
          tid = it->second;
        }
        if (sign > 0) builder.add_edge(static_cast<int>(head), g, tid);
      }
    }
  }
  return builder.finish(0);
}

bool SubgroupGraph::includes(const SubgroupGraph& sub) const {
  for (const Word& w : sub.basis())
    if (!contains(w)) return false;
  return true;
}

std::vector<Word> SubgroupGraph::enumerate_elements(int max_len) const {
  // Distance to base ignoring the no-backtracking constraint: a valid lower
  // bound used to prune branches that cannot close up in time.
  std::vector<int> dist(vertices_, -1);
  dist[0] = 0;
  std::deque<int> queue{0};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int g = 1; g <= rank_; ++g)
      for (int sign : {+1, -1}) {
        int w = step(v, static_cast<Letter>(sign * g));
        if (w != -1 && dist[w] == -1) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
      }
  }

  std::vector<Word> out;
  std::string buf;
  auto emit = [&]() {
    out.push_back(Word::from_letters(
        std::span<const Letter>(reinterpret_cast<const Letter*>(buf.data()), buf.size()),
        rank_));
  };
  // Non-backtracking closed paths at the base spell exactly the reduced
  // words of the subgroup; depth-first in letter order emits shortlex
  // within each length.
  auto rec = [&](auto&& self, int v, int remaining, Letter last) -> void {
    if (remaining == 0) {
      if (v == 0) emit();
      return;
    }
    for (int g = 1; g <= rank_; ++g)
      for (int sign : {+1, -1}) {
        Letter l = static_cast<Letter>(sign * g);
        if (l == static_cast<Letter>(-last)) continue;
        int w = step(v, l);
        if (w == -1 || dist[w] > remaining - 1) continue;
        buf.push_back(static_cast<char>(l));
        self(self, w, remaining - 1, l);
        buf.pop_back();
      }
  };
  for (int len = 0; len <= max_len; ++len) rec(rec, 0, len, 0);
  return out;
}

SubgroupGraph SubgroupGraph::merged(int u, int v) const {
  GraphBuilder builder(rank_, vertices_);
  for (int i = 1; i < vertices_; ++i) builder.add_vertex();
  for (int w = 0; w < vertices_; ++w)
    for (int g = 1; g <= rank_; ++g)
      if (fwd_[slot(w, g)] != -1) builder.add_edge(w, g, fwd_[slot(w, g)]);
  builder.merge(u, v);
  return builder.finish(0);
}

std::vector<SubgroupGraph> SubgroupGraph::fringe(int vertex_limit) const {
  if (vertices_ > vertex_limit)
    throw FringeTooLarge(
        "fringe: graph has " + std::to_string(vertices_) +
        " vertices, above the limit of " + std::to_string(vertex_limit) +
        " (the partition lattice grows like the Bell numbers)");
  // Breadth-first closure under single vertex identifications.  Folding is
  // confluent, so this reaches exactly the folded quotients of all vertex
  // partitions while deduplicating early.
  std::set<SubgroupGraph> seen{*this};
  std::deque<const SubgroupGraph*> queue;
  queue.push_back(&*seen.begin());
  while (!queue.empty()) {
    const SubgroupGraph& g = *queue.front();
    queue.pop_front();
    for (int u = 0; u < g.vertex_count(); ++u)
      for (int v = u + 1; v < g.vertex_count(); ++v) {
        SubgroupGraph q = g.merged(u, v);
        auto [it, fresh] = seen.insert(std::move(q));
        if (fresh) {
          if (seen.size() > kFringeQuotientCap)
            throw FringeTooLarge("fringe: more than " +
                                 std::to_string(kFringeQuotientCap) +
                                 " distinct folded quotients");
          queue.push_back(&*it);
        }
      }
  }
  return std::vector<SubgroupGraph>(seen.begin(), seen.end());
}

bool SubgroupGraph::operator<(const SubgroupGraph& o) const {
  if (rank_ != o.rank_) return rank_ < o.rank_;
  if (vertices_ != o.vertices_) return vertices_ < o.vertices_;
  if (fwd_ != o.fwd_) return fwd_ < o.fwd_;
  return bwd_ < o.bwd_;
}

std::string SubgroupGraph::to_dot() const {
  std::string out = "digraph stallings {\n  rankdir=LR;\n  node [shape=circle];\n";
  out += "  0 [shape=doublecircle];\n";
  for (int v = 0; v < vertices_; ++v)
    for (int g = 1; g <= rank_; ++g) {
      int t = fwd_[slot(v, g)];
      if (t == -1) continue;
      out += "  " + std::to_string(v) + " -> " + std::to_string(t) +
             " [label=\"" + std::string(1, letter_to_char(static_cast<Letter>(g))) +
             "\"];\n";
    }
  out += "}\n";
  return out;
}

std::string SubgroupGraph::to_json_string() const {
  nlohmann::ordered_json j;
  j["rank"] = rank_;
  j["vertices"] = vertices_;
  j["base"] = 0;
  auto edges = nlohmann::ordered_json::array();
  for (int v = 0; v < vertices_; ++v)
    for (int g = 1; g <= rank_; ++g) {
      int t = fwd_[slot(v, g)];
      if (t == -1) continue;
      edges.push_back({{"from", v},
                       {"label", std::string(1, letter_to_char(static_cast<Letter>(g)))},
                       {"to", t}});
    }
  j["edges"] = std::move(edges);
  return j.dump();
}

SubgroupGraph SubgroupGraph::from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  int n = j.at("vertices").get<int>();
  if (n < 1) throw Error("graph json: vertex count must be positive");
  int rank = 0;
  struct Edge {
    int from, g, to;
  };
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    std::string label = e.at("label").get<std::string>();
    if (label.size() != 1) throw InvalidLetter("graph json: label must be one letter");
    Letter l = char_to_letter(label[0]);
    if (l <= 0) throw InvalidLetter("graph json: labels must be positive letters");
    Edge edge{e.at("from").get<int>(), static_cast<int>(l), e.at("to").get<int>()};
    if (edge.from < 0 || edge.from >= n || edge.to < 0 || edge.to >= n)
      throw Error("graph json: edge endpoint out of range");
    rank = std::max(rank, edge.g);
    edges.push_back(edge);
  }
  if (j.contains("rank")) rank = std::max(rank, j.at("rank").get<int>());
  GraphBuilder builder(rank, n);
  for (int v = 1; v < n; ++v) builder.add_vertex();
  for (const Edge& e : edges) builder.add_edge(e.from, e.g, e.to);
  int base = j.value("base", 0);
  return builder.finish(base);
}

}  // namespace vclose
