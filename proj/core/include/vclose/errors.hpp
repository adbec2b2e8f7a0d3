#pragma once

#include <stdexcept>
#include <string>

namespace vclose {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A character in a word is not a letter of the ambient alphabet.
struct InvalidLetter : Error {
  using Error::Error;
};

// Two operands live over different alphabets (or variable counts).
struct AlphabetMismatch : Error {
  using Error::Error;
};

// primitive_root() of the empty word is undefined.
struct EmptyWordNoRoot : Error {
  using Error::Error;
};

// Fringe enumeration refused: the subgroup graph has too many vertices
// (the partition lattice grows like the Bell numbers).
struct FringeTooLarge : Error {
  using Error::Error;
};

// A bounded search ran past its configured state budget.  `states` is the
// number of states explored before giving up.
struct BudgetExceeded : Error {
  unsigned long long states;
  BudgetExceeded(const std::string& what, unsigned long long n)
      : Error(what), states(n) {}
};

// conjugator_of_tuples() needs at least one nontrivial coordinate.
struct DegenerateTuple : Error {
  using Error::Error;
};

// Requested Hall basis (or its enveloping truncated algebra) exceeds the
// configured size cap.
struct BasisTooLarge : Error {
  using Error::Error;
};

// A theoretically impossible situation was detected (e.g. the intersection
// of two verified retracts decisively failed to be a retract).  This always
// indicates a bug somewhere and is meant to abort loudly.
struct InconsistencyError : Error {
  using Error::Error;
};

}  // namespace vclose
