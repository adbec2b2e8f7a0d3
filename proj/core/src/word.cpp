#include "vclose/word.hpp"

#include <algorithm>
#include <cstdlib>

#include "vclose/errors.hpp"

namespace vclose {

int letter_key(Letter l) {
  int idx = std::abs(static_cast<int>(l));
  return 2 * (idx - 1) + (l < 0 ? 1 : 0);
}

char letter_to_char(Letter l) {
  if (l > 0) return static_cast<char>('a' + l - 1);
  return static_cast<char>('A' - l - 1);
}

Letter char_to_letter(char c) {
  if (c >= 'a' && c <= 'z') return static_cast<Letter>(c - 'a' + 1);
  if (c >= 'A' && c <= 'Z') return static_cast<Letter>(-(c - 'A' + 1));
  return 0;
}

static void check_rank(int rank) {
  if (rank < 0 || rank > kMaxRank)
    throw InvalidLetter("alphabet rank must be between 0 and 26, got " +
                        std::to_string(rank));
}

Word::Word(int rank) : rank_(rank) { check_rank(rank); }

void append_reduced(std::string& buf, Letter l) {
  if (!buf.empty() && static_cast<Letter>(buf.back()) == -l)
    buf.pop_back();
  else
    buf.push_back(static_cast<char>(l));
}

Word Word::parse(std::string_view text, int rank) {
  Word w(rank);
  if (text == "1") return w;
  for (std::size_t i = 0; i < text.size(); ++i) {
    Letter l = char_to_letter(text[i]);
    if (l == 0)
      throw InvalidLetter("character '" + std::string(1, text[i]) +
                          "' at position " + std::to_string(i) +
                          " is not a group letter");
    if (std::abs(static_cast<int>(l)) > rank)
      throw InvalidLetter("letter '" + std::string(1, text[i]) +
                          "' at position " + std::to_string(i) +
                          " exceeds alphabet rank " + std::to_string(rank));
    append_reduced(w.letters_, l);
  }
  return w;
}

Word Word::from_letters(std::span<const Letter> raw, int rank) {
  Word w(rank);
  for (Letter l : raw) {
    if (l == 0 || std::abs(static_cast<int>(l)) > rank)
      throw InvalidLetter("letter index " + std::to_string(static_cast<int>(l)) +
                          " outside alphabet of rank " + std::to_string(rank));
    append_reduced(w.letters_, l);
  }
  return w;
}

std::string Word::str() const {
  if (letters_.empty()) return "1";
  std::string out;
  out.reserve(letters_.size());
  for (char c : letters_) out.push_back(letter_to_char(static_cast<Letter>(c)));
  return out;
}

Word multiply(const Word& u, const Word& v) {
  if (u.rank_ != v.rank_)
    throw AlphabetMismatch("multiply: operands over different alphabets (" +
                           std::to_string(u.rank_) + " vs " +
                           std::to_string(v.rank_) + ")");
  Word out(u.rank_);
  out.letters_ = u.letters_;
  for (char c : v.letters_) append_reduced(out.letters_, static_cast<Letter>(c));
  return out;
}

Word invert(const Word& u) {
  Word out(u.rank_);
  out.letters_.reserve(u.letters_.size());
  for (auto it = u.letters_.rbegin(); it != u.letters_.rend(); ++it)
    out.letters_.push_back(static_cast<char>(-*it));
  return out;
}

Word conjugate(const Word& u, const Word& s) {
  return multiply(multiply(invert(s), u), s);
}

Word commutator(const Word& u, const Word& v) {
  return multiply(multiply(invert(u), invert(v)), multiply(u, v));
}

Word power(const Word& u, long long k) {
  Word base = k < 0 ? invert(u) : u;
  long long n = k < 0 ? -k : k;
  Word out(u.rank());
  for (long long i = 0; i < n; ++i) out = multiply(out, base);
  return out;
}

bool shortlex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    int ka = letter_key(a.letter(i));
    int kb = letter_key(b.letter(i));
    if (ka != kb) return ka < kb;
  }
  return false;
}

CyclicForm cyclic_reduce(const Word& w) {
  std::string core = w.data();
  std::string conj;
  while (core.size() >= 2 && core.front() == -core.back()) {
    conj.push_back(core.front());
    core.erase(core.begin());
    core.pop_back();
  }
  CyclicForm out;
  out.core = Word::from_letters(
      std::span<const Letter>(reinterpret_cast<const Letter*>(core.data()),
                              core.size()),
      w.rank());
  out.conj = Word::from_letters(
      std::span<const Letter>(reinterpret_cast<const Letter*>(conj.data()),
                              conj.size()),
      w.rank());
  return out;
}

RootPower primitive_root(const Word& w) {
  if (w.empty())
    throw EmptyWordNoRoot("primitive_root: the identity has no primitive root");
  CyclicForm cf = cyclic_reduce(w);
  const std::string& core = cf.core.data();
  std::size_t n = core.size();
  std::size_t period = n;
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = core[i] == core[i % p];
    if (ok) {
      period = p;
      break;
    }
  }
  Word root_core = Word::from_letters(
      std::span<const Letter>(reinterpret_cast<const Letter*>(core.data()),
                              period),
      w.rank());
  RootPower out;
  out.root = multiply(multiply(cf.conj, root_core), invert(cf.conj));
  out.exponent = static_cast<int>(n / period);
  return out;
}

Substitution::Substitution(std::vector<Word> images, int target_rank)
    : images_(std::move(images)), target_rank_(target_rank) {
  check_rank(target_rank);
  for (const Word& w : images_)
    if (w.rank() != target_rank_)
      throw AlphabetMismatch(
          "substitution image over rank " + std::to_string(w.rank()) +
          " does not match target rank " + std::to_string(target_rank_));
  if (images_.size() > static_cast<std::size_t>(kMaxRank))
    throw InvalidLetter("substitution domain rank exceeds 26");
}

Substitution Substitution::identity(int rank) {
  std::vector<Word> images;
  images.reserve(rank);
  for (int i = 1; i <= rank; ++i) {
    Letter l = static_cast<Letter>(i);
    images.push_back(Word::from_letters(std::span<const Letter>(&l, 1), rank));
  }
  return Substitution(std::move(images), rank);
}

Word Substitution::apply(const Word& w) const {
  if (w.rank() != domain_rank())
    throw AlphabetMismatch("apply: word rank " + std::to_string(w.rank()) +
                           " does not match substitution domain rank " +
                           std::to_string(domain_rank()));
  Word out(target_rank_);
  for (std::size_t i = 0; i < w.size(); ++i) {
    Letter l = w.letter(i);
    const Word& img = images_[std::abs(static_cast<int>(l)) - 1];
    if (l > 0) {
      for (char c : img.letters_)
        append_reduced(out.letters_, static_cast<Letter>(c));
    } else {
      for (auto it = img.letters_.rbegin(); it != img.letters_.rend(); ++it)
        append_reduced(out.letters_, static_cast<Letter>(-*it));
    }
  }
  return out;
}

}  // namespace vclose
