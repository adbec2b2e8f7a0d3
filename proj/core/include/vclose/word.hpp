#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vclose {

// Letters of a free group F_r are signed generator indices: +i is the i-th
// generator (printed 'a'..'z'), -i its inverse (printed 'A'..'Z').  Rank is
// capped at 26 by the printable alphabet.
using Letter = signed char;

inline constexpr int kMaxRank = 26;

// Total order on letters used everywhere (shortlex, graph traversal):
// a < A < b < B < ... i.e. generator index first, inverse after the plain
// letter.
int letter_key(Letter l);

char letter_to_char(Letter l);
Letter char_to_letter(char c);  // 0 if not a letter

// A freely reduced word over a fixed-rank alphabet.  Reduction is eager:
// every constructor cancels adjacent inverse pairs, so two Words are equal
// in the group iff they compare equal.  Immutable after construction.
class Word {
 public:
  Word() = default;  // empty word over the empty alphabet
  explicit Word(int rank);

  // Parses "aabA" style text; "" and "1" denote the identity.
  // Throws InvalidLetter on characters outside the first `rank` letters.
  static Word parse(std::string_view text, int rank);

  // Builds a word from raw signed letters, reducing as it goes.
  static Word from_letters(std::span<const Letter> raw, int rank);

  int rank() const { return rank_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  Letter letter(std::size_t i) const {
    return static_cast<Letter>(letters_[i]);
  }
  // The reduced letter sequence, one signed char per letter.
  const std::string& data() const { return letters_; }

  std::string str() const;  // "1" for the identity

  bool operator==(const Word& o) const {
    return rank_ == o.rank_ && letters_ == o.letters_;
  }

 private:
  friend Word multiply(const Word&, const Word&);
  friend Word invert(const Word&);
  friend class Substitution;

  std::string letters_;  // reduced; each char holds a signed Letter
  int rank_ = 0;
};

// Appends `l` to a reduced buffer, cancelling with the previous letter.
void append_reduced(std::string& buf, Letter l);

Word multiply(const Word& u, const Word& v);
Word invert(const Word& u);
Word conjugate(const Word& u, const Word& s);  // s^-1 u s
// The one commutator convention of the whole library:
//   [u, v] = u^-1 v^-1 u v.
Word commutator(const Word& u, const Word& v);
Word power(const Word& u, long long k);

// Shortlex: shorter first, then lexicographic by letter_key.
bool shortlex_less(const Word& a, const Word& b);
struct ShortlexLess {
  bool operator()(const Word& a, const Word& b) const {
    return shortlex_less(a, b);
  }
};

// Cyclic decomposition w = s * core * s^-1 with `core` cyclically reduced.
struct CyclicForm {
  Word core;
  Word conj;  // the s above
};
CyclicForm cyclic_reduce(const Word& w);

// w = root^exponent with root not a proper power; exponent is maximal.
// Throws EmptyWordNoRoot for the identity.
struct RootPower {
  Word root;
  int exponent;
};
RootPower primitive_root(const Word& w);

// A map F_n -> F_r given by one image word per generator.  Used both for
// endomorphisms of F_r (n == r) and for substituting subgroup elements
// into equation variables (n == number of variables).
class Substitution {
 public:
  Substitution() = default;
  Substitution(std::vector<Word> images, int target_rank);
  static Substitution identity(int rank);

  int domain_rank() const { return static_cast<int>(images_.size()); }
  int target_rank() const { return target_rank_; }
  const Word& image(int gen) const { return images_[gen - 1]; }  // 1-based
  const std::vector<Word>& images() const { return images_; }

  // Homomorphic application; w.rank() must equal domain_rank().
  Word apply(const Word& w) const;

  bool operator==(const Substitution& o) const = default;

 private:
  std::vector<Word> images_;
  int target_rank_ = 0;
};

}  // namespace vclose
