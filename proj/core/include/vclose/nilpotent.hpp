#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vclose/abelian.hpp"
#include "vclose/equations.hpp"
#include "vclose/word.hpp"

namespace vclose {

inline constexpr int kDefaultHallCap = 512;

// One basic commutator: a generator leaf or a bracket of two earlier basis
// entries.  Weights are bracket depths; names print as "[b,a]" etc.
struct BasicCommutator {
  int left = -1;       // basis index, -1 for a leaf
  int right = -1;
  int generator = 0;   // 1-based generator for leaves
  int weight = 1;
  std::string name;
};

// The Hall basis of basic commutators for the free nilpotent group N_{r,c},
// together with the truncated Magnus embedding used for collection: words
// map to units 1 + X_i of the free associative ring with monomials of
// degree > c discarded.  The embedding is faithful for N_{r,c}, so series
// equality decides group equality and exponent extraction is exact integer
// linear algebra.  Instances are immutable and shared by the elements that
// reference them.
class HallBasis {
 public:
  // Throws BasisTooLarge when the basis (or the enveloping truncated ring)
  // would exceed the cap.
  static std::shared_ptr<const HallBasis> make(int rank, int cls,
                                               int cap = kDefaultHallCap);

  int rank() const { return rank_; }
  int cls() const { return cls_; }
  std::size_t size() const { return commutators_.size(); }
  const BasicCommutator& commutator(std::size_t i) const { return commutators_[i]; }
  const std::vector<BasicCommutator>& commutators() const { return commutators_; }
  // Number of basic commutators of each weight 1..c.
  std::vector<long long> weight_counts() const;
  std::string name() const;  // "N(2,3)"

 private:
  HallBasis() = default;
  friend struct HallOps;  // collection internals live in the .cpp

  int rank_ = 0;
  int cls_ = 0;
  std::vector<BasicCommutator> commutators_;

  // Truncated-ring tables: monomials of degree <= c are indexed by degree
  // offset plus base-r digit value.
  std::vector<std::size_t> offset_;          // per degree 0..c
  std::size_t dim_ = 0;
  std::vector<std::vector<long long>> series_;     // group series of each h_i
  std::vector<std::vector<long long>> inverse_;    // ... and of each h_i^-1
  std::vector<std::vector<long long>> lie_;        // Lie polynomial of each h_i
  std::vector<SmithResult> peel_;                  // per weight: SNF of the
  std::vector<std::vector<std::size_t>> weight_members_;  // expansion system
};

// Witt's formula (1/w) sum_{d|w} mu(d) r^(w/d) for weights 1..c: the number
// of basic commutators of each weight.
std::vector<long long> witt_counts(int rank, int cls);

// An element of N_{r,c} in Mal'cev normal form: the exponent tuple over the
// Hall basis, meaning the ordered product h_1^e_1 ... h_m^e_m.
struct NilElement {
  std::shared_ptr<const HallBasis> basis;
  std::vector<long long> exps;

  bool is_identity() const;
  // True iff the weight-1 coordinates vanish, i.e. the element lies in the
  // derived subgroup (= gamma_2).
  bool in_derived_subgroup() const;
  std::string str() const;  // "(2,-1,3)"

  bool operator==(const NilElement& o) const;
};

NilElement nil_identity(std::shared_ptr<const HallBasis> basis);
NilElement nil_generator(std::shared_ptr<const HallBasis> basis, int gen);  // 1-based
NilElement nil_from_exponents(std::shared_ptr<const HallBasis> basis,
                              std::vector<long long> exps);

// The image of a free word in N_{r,c}: fully collected normal form.
NilElement collect(const Word& w, std::shared_ptr<const HallBasis> basis);

NilElement nil_multiply(const NilElement& x, const NilElement& y);
NilElement nil_invert(const NilElement& x);
NilElement nil_commutator(const NilElement& x, const NilElement& y);  // [x,y]
NilElement nil_power(const NilElement& x, long long k);

// Bounded search for g as a product of k commutators [x_i, y_i] whose
// operand coordinates all lie in [-B, B].  Central coordinates of the
// operands never change a commutator, so the scan runs over operands with
// top-weight coordinates zeroed; that loses no representations within the
// box.  NOT representable here always means "within this box", not a width
// proof.
struct WidthResult {
  bool representable = false;
  std::vector<std::pair<NilElement, NilElement>> witness;  // the k pairs
  unsigned long long states = 0;
};

WidthResult commutator_width_bounded(const NilElement& g, int k, long long coord_bound,
                                     unsigned long long budget = kDefaultBudget);

// Bounded search for the fixed-form decomposition g = [g_1, z_1] ... [g_r, z_r]
// with z_i the i-th generator and the g_i coordinates in [-B, B].
struct FormResult {
  bool found = false;
  std::vector<NilElement> witness;  // g_1..g_r
  unsigned long long states = 0;
};

FormResult verify_commutator_form(const NilElement& g, long long coord_bound,
                                  unsigned long long budget = kDefaultBudget);

}  // namespace vclose
