#include "vclose/closure.hpp"

#include <algorithm>

#include "vclose/errors.hpp"

namespace vclose {

namespace {

// Rewrites a word over the ambient generators as the same word over the
// equation variables x1..xr (the letter values coincide).
Word as_variable_word(const Word& w, int vars) {
  std::vector<Letter> raw(w.data().begin(), w.data().end());
  return Word::from_letters(raw, vars);
}

// The retraction system for h: variables are the generator images, and
// fixing every basis word pins the candidate endomorphism on all of h.
CoefficientSystem retraction_system(const SubgroupGraph& h, const std::vector<Word>& basis) {
  const int r = h.alphabet_rank();
  CoefficientSystem sys;
  sys.vars = r;
  sys.constant_rank = r;
  for (const Word& b : basis) {
    sys.equations.push_back(CoefficientEquation{as_variable_word(b, r), b});
  }
  return sys;
}

RetractVerdict no_verdict(CertificateType type, std::string detail) {
  RetractVerdict out;
  out.kind = VerdictKind::No;
  out.certificate = NoCertificate{type, std::move(detail), std::nullopt};
  return out;
}

}  // namespace

bool verify_retraction(const Endomorphism& phi, const SubgroupGraph& h) {
  const int r = h.alphabet_rank();
  if (phi.domain_rank() != r || phi.target_rank() != r) return false;
  for (const Word& im : phi.images()) {
    if (!h.contains(im)) return false;
  }
  for (const Word& b : h.basis()) {
    if (!(phi.apply(b) == b)) return false;
  }
  return true;
}

RetractVerdict is_retract(const SubgroupGraph& h, int bound, unsigned long long budget) {
  const int r = h.alphabet_rank();
  const int k = h.subgroup_rank();

  if (k > r) {
    return no_verdict(CertificateType::RankExceedsAmbient,
                      "subgroup rank " + std::to_string(k) + " exceeds ambient rank " +
                          std::to_string(r) + "; a retract is a homomorphic image");
  }

  std::vector<Word> basis = h.basis();
  if (basis.empty()) {
    // The trivial subgroup retracts via the trivial endomorphism.
    RetractVerdict out;
    out.kind = VerdictKind::Yes;
    out.retraction = Substitution(std::vector<Word>(static_cast<std::size_t>(r), Word(r)), r);
    return out;
  }

  if (basis.size() == 1) {
    // Cyclic subgroups are settled exactly: <w> is a retract iff the
    // exponent vector of w is primitive, and Bezout coefficients for
    // gcd = 1 assemble the retraction f_i -> w^{l_i} directly.
    const Word& w = basis.front();
    ExponentVector e = exponent_vector(w);
    IntMatrix col(r, 1);
    for (int i = 0; i < r; ++i) col.at(i, 0) = e[static_cast<std::size_t>(i)];
    const long long one[] = {1};
    auto coeffs = solve_row_system(col, one);
    if (!coeffs) {
      return no_verdict(CertificateType::CyclicNonPrimitive,
                        "exponent vector of " + w.str() + " has gcd " +
                            std::to_string(gcd_of(e)) + ", not 1");
    }
    std::vector<Word> images;
    images.reserve(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) images.push_back(power(w, (*coeffs)[static_cast<std::size_t>(i)]));
    Endomorphism phi(std::move(images), r);
    if (!verify_retraction(phi, h)) {
      throw InconsistencyError("cyclic retraction witness failed verification for " + w.str());
    }
    RetractVerdict out;
    out.kind = VerdictKind::Yes;
    out.retraction = std::move(phi);
    return out;
  }

  std::vector<ExponentVector> vecs;
  vecs.reserve(basis.size());
  for (const Word& b : basis) vecs.push_back(exponent_vector(b));
  ObstructionResult ob = abelian_retract_obstruction(vecs, r);
  if (ob.verdict == Obstruction::Obstructed) {
    return no_verdict(CertificateType::AbelianObstruction, ob.reason);
  }

  CoefficientSystem sys = retraction_system(h, basis);
  ExactOutcome ex = solve_system_exact(sys, h);
  if (ex.status == ExactStatus::NoSolution) {
    return no_verdict(CertificateType::SystemReduction, ex.reason);
  }
  if (ex.status == ExactStatus::Found) {
    Endomorphism phi = ex.solution->assignment;
    if (verify_retraction(phi, h)) {
      RetractVerdict out;
      out.kind = VerdictKind::Yes;
      out.retraction = std::move(phi);
      return out;
    }
    // fall through to the bounded search; a Found that does not verify
    // would be a solver bug, and the search below cannot make it worse
  }

  RetractVerdict out;
  out.bound = bound;
  try {
    SolveResult sr = solve_in_subgroup(sys, h, bound, budget);
    if (sr.status == SolveStatus::Found) {
      Endomorphism phi = sr.solution->assignment;
      if (!verify_retraction(phi, h)) {
        throw InconsistencyError("search returned a non-retraction for a solved system");
      }
      out.kind = VerdictKind::Yes;
      out.retraction = std::move(phi);
      return out;
    }
    out.kind = VerdictKind::Unknown;
    out.note = "no retraction with generator images of length <= " + std::to_string(bound);
  } catch (const BudgetExceeded& b) {
    out.kind = VerdictKind::Unknown;
    out.note = "search budget exhausted after " + std::to_string(b.states) + " states";
  }
  return out;
}

VerbalVerdict is_verbally_closed(const SubgroupGraph& h, int bound,
                                 unsigned long long budget) {
  RetractVerdict rv = is_retract(h, bound, budget);
  VerbalVerdict out;
  out.kind = rv.kind;
  out.retraction = std::move(rv.retraction);
  out.certificate = std::move(rv.certificate);
  out.bound = rv.bound;
  out.note = std::move(rv.note);

  if (out.kind == VerdictKind::No &&
      out.certificate->type == CertificateType::CyclicNonPrimitive) {
    // For cyclic <w> the generator word itself falsifies verbal closedness:
    // w(x1..xr) = w is solved in the ambient group by x_i = f_i, while over
    // <w> every value of the left side is w^(e . m), never w.
    const Word w = h.basis().front();
    FalsifyingEquation eq{as_variable_word(w, h.alphabet_rank()), w, bound};
    SolveResult sr = solve_verbal(eq.lhs, eq.rhs, h, bound, budget);
    if (sr.status == SolveStatus::Found) {
      throw InconsistencyError("falsifying equation for " + w.str() +
                               " was unexpectedly solvable over the subgroup");
    }
    out.equation = std::move(eq);
  } else if (out.kind == VerdictKind::No) {
    out.note = "refuted by certificate; no single falsifying equation constructed";
  }
  return out;
}

ClosureResult vcl(const SubgroupGraph& h, int bound, unsigned long long budget,
                  int vertex_limit) {
  std::vector<SubgroupGraph> cands = h.fringe(vertex_limit);
  SubgroupGraph whole = SubgroupGraph::whole_group(h.alphabet_rank());
  if (std::find(cands.begin(), cands.end(), whole) == cands.end()) {
    cands.push_back(whole);
  }

  std::vector<RetractVerdict> verdicts;
  verdicts.reserve(cands.size());
  for (const SubgroupGraph& k : cands) verdicts.push_back(is_retract(k, bound, budget));

  std::vector<std::size_t> verified;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (verdicts[i].kind == VerdictKind::Yes) verified.push_back(i);
  }
  // The whole group always verifies, so `verified` is never empty.
  std::vector<std::size_t> minimal;
  for (std::size_t i : verified) {
    bool is_min = true;
    for (std::size_t j : verified) {
      if (i != j && cands[i].includes(cands[j]) && !(cands[i] == cands[j])) {
        is_min = false;
        break;
      }
    }
    if (is_min) minimal.push_back(i);
  }

  bool any_unknown =
      std::any_of(verdicts.begin(), verdicts.end(),
                  [](const RetractVerdict& v) { return v.kind == VerdictKind::Unknown; });
  if (minimal.size() > 1 && !any_unknown) {
    throw InconsistencyError(
        "two incomparable minimal retracts with every candidate decided; the "
        "verbal closure would not be unique");
  }

  std::size_t best = minimal.front();
  for (std::size_t i : minimal) {
    if (cands[i] < cands[best]) best = i;
  }

  ClosureResult out;
  out.closure = cands[best];
  for (std::size_t i : minimal) out.minimal_verified.push_back(cands[i]);

  // Exact means: the closure is the verbal closure, not just an upper
  // bound.  That holds when every candidate either contains the closure or
  // was decisively refuted, since the true closure is itself a candidate
  // and cannot be among the refuted ones.
  bool exact = minimal.size() == 1;
  for (std::size_t i = 0; i < cands.size() && exact; ++i) {
    if (verdicts[i].kind == VerdictKind::No) continue;
    if (!cands[i].includes(out.closure)) exact = false;
  }
  out.status = exact ? ClosureStatus::Exact : ClosureStatus::Conditional;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (verdicts[i].kind == VerdictKind::Unknown && !cands[i].includes(out.closure)) {
      out.undecided.push_back(cands[i]);
    }
  }
  return out;
}

IntersectionCheck intersect_retracts_check(const SubgroupGraph& a, const SubgroupGraph& b,
                                           int bound, unsigned long long budget) {
  IntersectionCheck out;
  out.intersection = SubgroupGraph::intersect(a, b);
  RetractVerdict va = is_retract(a, bound, budget);
  RetractVerdict vb = is_retract(b, bound, budget);
  out.inputs_verified = va.kind == VerdictKind::Yes && vb.kind == VerdictKind::Yes;
  out.verdict = is_retract(out.intersection, bound, budget);
  if (out.inputs_verified && out.verdict.kind == VerdictKind::No) {
    throw InconsistencyError(
        "intersection of two verified retracts was decisively refuted: " +
        out.verdict.certificate->detail);
  }
  return out;
}

}  // namespace vclose
