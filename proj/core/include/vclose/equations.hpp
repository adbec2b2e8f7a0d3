#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vclose/stallings.hpp"
#include "vclose/word.hpp"

namespace vclose {

inline constexpr unsigned long long kDefaultBudget = 100000000ULL;

// One equation  lhs(x_1..x_n) = rhs  with the lhs a word over the variable
// alphabet (rank = number of variables, X1 = inverse of x1) and the rhs a
// constant word in F_r.
struct CoefficientEquation {
  Word lhs;
  Word rhs;
};

// A finite system of coefficient equations over a common variable list.
struct CoefficientSystem {
  int vars = 0;
  int constant_rank = 0;
  std::vector<CoefficientEquation> equations;

  // Parses {"vars":n,"eqs":[{"lhs":"x1 x2 X1","rhs":"abA"}]}; lhs tokens are
  // space-separated x<i>/X<i>.
  static CoefficientSystem parse_json(const std::string& text, int constant_rank);
  std::string to_json_string() const;
};

// A satisfying assignment: images of x_1..x_n, all constrained to lie in
// the domain subgroup the search ran over.
struct Solution {
  Substitution assignment;
  SubgroupGraph domain;  // which subgroup each variable ranges over
};

enum class SolveStatus { Found, NotFoundUpToBound };

struct SolveResult {
  SolveStatus status = SolveStatus::NotFoundUpToBound;
  std::optional<Solution> solution;
  int bound = 0;
  unsigned long long states = 0;  // assignments/prefixes explored
};

// Exhaustive bounded search: variables range over the domain elements of
// length <= bound, assignments enumerated with x_1 varying fastest, each
// variable running through the shortlex element list; the first satisfying
// assignment is returned and re-verified by substitution.  Unused variables
// are pinned to the identity.  Throws BudgetExceeded past `budget` explored
// states -- never silently truncates.
SolveResult solve_in_subgroup(const CoefficientSystem& sys, const SubgroupGraph& domain,
                              int bound, unsigned long long budget = kDefaultBudget);

// Single verbal equation  w(x_1..x_n) = rhs  in the given domain.
SolveResult solve_verbal(const Word& lhs, const Word& rhs, const SubgroupGraph& domain,
                         int bound, unsigned long long budget = kDefaultBudget);

// Exact decision for systems that reduce, by eliminating variables that
// occur once in some equation, to a single equation in one variable of
// conjugacy or square shape.  The solution family is then a coset of a
// cyclic centralizer u0 <rho>, and membership of the induced value words in
// the domain is decided exactly through the eventual periodicity of
// power-walks on the subgroup graph.  NoSolution verdicts are decisive;
// Inconclusive means the shape was out of reach, not that no solution
// exists.
enum class ExactStatus { Found, NoSolution, Inconclusive };

struct ExactOutcome {
  ExactStatus status = ExactStatus::Inconclusive;
  std::optional<Solution> solution;
  std::string reason;  // for NoSolution: which reduction step refuted it
};

ExactOutcome solve_system_exact(const CoefficientSystem& sys, const SubgroupGraph& domain);

// Smallest u (shortlex ties) with u^-1 h_i u = g_i for all i, or nullopt.
// Exact, not bounded: u is determined from the first nontrivial pair up to
// its cyclic centralizer, and the remaining coordinates cut out an
// eventually periodic exponent set.  Throws DegenerateTuple when every h_i
// is trivial.
std::optional<Word> conjugator_of_tuples(std::span<const Word> g, std::span<const Word> h);

// One probe of the C-test property of a word w(x_1..x_m): whenever the two
// values w(g), w(v) are conjugate and nontrivial, the tuples themselves must
// be conjugate.  (Equal values are the definitional special case; conjugate
// values reduce to it by replacing v with its conjugate tuple.)  Also
// records the Lee property probe: w vanishes on a tuple iff the tuple
// generates a cyclic subgroup.
enum class CTestVerdict { Vacuous, Consistent, Violation };

struct CTestReport {
  CTestVerdict verdict = CTestVerdict::Vacuous;
  Word value_g, value_v;             // w evaluated on the two tuples
  std::optional<Word> conjugator;    // u with u^-1 g_i u = v_i when Consistent
  bool lee_consistent_g = true;      // w(g) = 1  <=>  <g> cyclic
  bool lee_consistent_v = true;
};

using TuplePair = std::pair<std::vector<Word>, std::vector<Word>>;

std::vector<CTestReport> check_ctest_property(const Word& w,
                                              std::span<const TuplePair> pairs);

// Searches for a retraction of F_r onto H whose values on `targets` are
// pairwise distinct.  Bounded like solve_in_subgroup.
struct DiscriminationResult {
  bool found = false;
  std::optional<Substitution> retraction;
  unsigned long long states = 0;
};

DiscriminationResult find_discriminating_retraction(const SubgroupGraph& h,
                                                    std::span<const Word> targets,
                                                    int bound,
                                                    unsigned long long budget = kDefaultBudget);

}  // namespace vclose
