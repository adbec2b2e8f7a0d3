// Microbenchmarks for the hot paths: folding, membership, fringe
// enumeration, the bounded equation solver, the retract pipeline, and
// nilpotent collection.

#include <benchmark/benchmark.h>

#include <vector>

#include "vclose/closure.hpp"
#include "vclose/equations.hpp"
#include "vclose/nilpotent.hpp"
#include "vclose/stallings.hpp"
#include "vclose/word.hpp"

using namespace vclose;

namespace {

std::vector<Word> parse_all(const std::vector<std::string>& gens, int rank) {
  std::vector<Word> ws;
  for (const std::string& s : gens) ws.push_back(Word::parse(s, rank));
  return ws;
}

void BM_fold(benchmark::State& state) {
  std::vector<Word> gens = parse_all({"abab", "baBA", "aabbab", "bbaaBB"}, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SubgroupGraph::fold(gens, 2));
  }
}
BENCHMARK(BM_fold);

void BM_membership(benchmark::State& state) {
  SubgroupGraph g = SubgroupGraph::fold(parse_all({"abab", "baBA", "aabbab"}, 2), 2);
  Word w = Word::parse("ababbaBAabab", 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(g.contains(w));
  }
}
BENCHMARK(BM_membership);

void BM_intersect(benchmark::State& state) {
  SubgroupGraph a = SubgroupGraph::fold(parse_all({"ab", "ba"}, 2), 2);
  SubgroupGraph b = SubgroupGraph::fold(parse_all({"aa", "bb"}, 2), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SubgroupGraph::intersect(a, b));
  }
}
BENCHMARK(BM_intersect);

void BM_fringe(benchmark::State& state) {
  SubgroupGraph g = SubgroupGraph::fold(parse_all({"ab", "bbaa"}, 2), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(g.fringe());
  }
}
BENCHMARK(BM_fringe);

void BM_solve_bounded(benchmark::State& state) {
  std::vector<Letter> comm{1, 2, -1, -2};  // x1 x2 X1 X2
  Word lhs = Word::from_letters(comm, 2);
  Word rhs = Word::parse("abAB", 2);
  SubgroupGraph f2 = SubgroupGraph::whole_group(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_verbal(lhs, rhs, f2, 2));
  }
}
BENCHMARK(BM_solve_bounded);

void BM_is_retract_exact(benchmark::State& state) {
  SubgroupGraph g = SubgroupGraph::fold(parse_all({"ab", "ba"}, 2), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(is_retract(g));
  }
}
BENCHMARK(BM_is_retract_exact);

void BM_vcl(benchmark::State& state) {
  SubgroupGraph g = SubgroupGraph::fold(parse_all({"aa"}, 2), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(vcl(g));
  }
}
BENCHMARK(BM_vcl);

void BM_collect(benchmark::State& state) {
  auto basis = HallBasis::make(2, 3);
  Word w = Word::parse("ababABabABBBaaab", 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(collect(w, basis));
  }
}
BENCHMARK(BM_collect);

void BM_width(benchmark::State& state) {
  auto basis = HallBasis::make(2, 2);
  NilElement g = nil_from_exponents(basis, {0, 0, 5});
  for (auto _ : state) {
    benchmark::DoNotOptimize(commutator_width_bounded(g, 1, 5));
  }
}
BENCHMARK(BM_width);

}  // namespace

BENCHMARK_MAIN();
