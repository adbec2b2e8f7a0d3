#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vclose/abelian.hpp"
#include "vclose/equations.hpp"
#include "vclose/stallings.hpp"
#include "vclose/word.hpp"

namespace vclose {

inline constexpr int kDefaultSearchBound = 4;

// An endomorphism of F_r, given by generator images.  A retraction onto H
// is an endomorphism with image inside H fixing H pointwise.
using Endomorphism = Substitution;

enum class VerdictKind { Yes, No, Unknown };

// What kind of exact argument backs a NO verdict.  YES verdicts carry the
// retraction itself; NO verdicts carry one of these certificates.
enum class CertificateType {
  CyclicNonPrimitive,   // cyclic generator has imprimitive exponent vector
  AbelianObstruction,   // no integer matrix fixes the abelianized images
  RankExceedsAmbient,   // retracts of F_r have rank at most r
  SystemReduction,      // the retraction system was refuted exactly
};

struct NoCertificate {
  CertificateType type;
  std::string detail;
  std::optional<IntMatrix> witness;  // for AbelianObstruction
};

struct RetractVerdict {
  VerdictKind kind = VerdictKind::Unknown;
  std::optional<Endomorphism> retraction;    // Yes
  std::optional<NoCertificate> certificate;  // No
  int bound = 0;       // search depth behind an Unknown
  std::string note;    // extra context (budget exhaustion etc.)
};

// True iff phi maps every generator into h and fixes h's basis pointwise.
bool verify_retraction(const Endomorphism& phi, const SubgroupGraph& h);

// Decides whether h is a retract of the ambient free group.  Exact steps
// (rank bound, cyclic primitivity, abelian obstruction, system reduction)
// run first and settle most inputs; otherwise a bounded search either finds
// a verified retraction or reports Unknown for the given bound.
RetractVerdict is_retract(const SubgroupGraph& h, int bound = kDefaultSearchBound,
                          unsigned long long budget = kDefaultBudget);

// A verbal equation solvable over the ambient group but not over h, the
// witness that h is not verbally closed.  Emitted for cyclic certificates,
// where lhs is h's generator rewritten over x1..xr.
struct FalsifyingEquation {
  Word lhs;   // over variables
  Word rhs;   // element of h
  int bound;  // confirmed unsolvable over h up to this bound
};

struct VerbalVerdict {
  VerdictKind kind = VerdictKind::Unknown;
  std::optional<Endomorphism> retraction;
  std::optional<NoCertificate> certificate;
  std::optional<FalsifyingEquation> equation;
  int bound = 0;
  std::string note;
};

// For finitely generated subgroups of free groups, verbally closed =
// algebraically closed = retract; this runs the retract pipeline and
// augments NO answers with a falsifying equation where one is constructed.
VerbalVerdict is_verbally_closed(const SubgroupGraph& h, int bound = kDefaultSearchBound,
                                 unsigned long long budget = kDefaultBudget);

enum class ClosureStatus { Exact, Conditional };

// Verbal closure computation.  Candidates are the fringe of h plus the
// whole group; the closure is the smallest candidate verified to be a
// retract.  Status is Exact when every candidate not containing the
// closure was decisively refuted -- then the reported subgroup is the
// verbal closure, not just an upper bound for it.
struct ClosureResult {
  SubgroupGraph closure;
  ClosureStatus status = ClosureStatus::Conditional;
  std::vector<SubgroupGraph> undecided;         // unknowns below/aside the closure
  std::vector<SubgroupGraph> minimal_verified;  // all minimal verified retracts
};

ClosureResult vcl(const SubgroupGraph& h, int bound = kDefaultSearchBound,
                  unsigned long long budget = kDefaultBudget,
                  int vertex_limit = kDefaultFringeVertexLimit);

// Intersects two subgroups and runs is_retract on the result.  When both
// inputs were verified retracts, a decisive NO for the intersection would
// contradict the intersection property of retracts and throws
// InconsistencyError.
struct IntersectionCheck {
  SubgroupGraph intersection;
  RetractVerdict verdict;
  bool inputs_verified = false;
};

IntersectionCheck intersect_retracts_check(const SubgroupGraph& a, const SubgroupGraph& b,
                                           int bound = kDefaultSearchBound,
                                           unsigned long long budget = kDefaultBudget);

}  // namespace vclose
