#include "vclose/equations.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <utility>

#include <json.hpp>

#include "vclose/errors.hpp"

namespace vclose {

namespace {

// ---------------------------------------------------------------------------
// Variable-word parsing ("x1 x2 X1" style) for system files.

Word parse_variable_word(const std::string& text, int vars) {
  std::vector<Letter> letters;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == ' ') {
      ++i;
      continue;
    }
    char head = text[i];
    if (head == '1' && letters.empty() && text.find_first_not_of("1 ") == std::string::npos) {
      break;  // "1" denotes the empty left-hand side
    }
    if (head != 'x' && head != 'X') {
      throw InvalidLetter("variable token must start with x or X: '" + text + "'");
    }
    std::size_t j = i + 1;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i + 1) throw InvalidLetter("variable token without index in '" + text + "'");
    int idx = std::atoi(text.substr(i + 1, j - i - 1).c_str());
    if (idx < 1 || idx > vars) {
      throw InvalidLetter("variable index out of range in '" + text + "'");
    }
    letters.push_back(static_cast<Letter>(head == 'x' ? idx : -idx));
    i = j;
  }
  return Word::from_letters(letters, vars);
}

std::string variable_word_str(const Word& w) {
  if (w.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    Letter l = w.letter(i);
    out += (l > 0 ? 'x' : 'X');
    out += std::to_string(l > 0 ? l : -l);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bounded assignment enumeration.  Assignments over the element list are
// stepped through colexicographically: the first active variable runs
// fastest, so (e_0, e_0, ...), (e_1, e_0, ...), ... -- this makes the
// search order predictable and puts short images first.

std::vector<int> active_variables(const CoefficientSystem& sys) {
  std::vector<char> seen(static_cast<std::size_t>(sys.vars) + 1, 0);
  for (const auto& eq : sys.equations) {
    for (std::size_t i = 0; i < eq.lhs.size(); ++i) {
      Letter l = eq.lhs.letter(i);
      seen[static_cast<std::size_t>(l > 0 ? l : -l)] = 1;
    }
  }
  std::vector<int> active;
  for (int v = 1; v <= sys.vars; ++v) {
    if (seen[static_cast<std::size_t>(v)]) active.push_back(v);
  }
  return active;
}

bool advance_odometer(std::vector<std::size_t>& idx, std::size_t limit) {
  std::size_t p = 0;
  while (p < idx.size()) {
    if (++idx[p] < limit) return true;
    idx[p] = 0;
    ++p;
  }
  return false;
}

bool satisfies(const Substitution& sub, const CoefficientSystem& sys) {
  for (const auto& eq : sys.equations) {
    if (!(sub.apply(eq.lhs) == eq.rhs)) return false;
  }
  return true;
}

// Allocation-free equation check for the hot search loop: evaluates the
// left-hand side into a reusable buffer and compares raw letter strings.
bool eval_equals(const std::vector<Word>& images, const Word& lhs, const Word& rhs,
                 std::string& buf) {
  buf.clear();
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    Letter l = lhs.letter(i);
    const std::string& img = images[static_cast<std::size_t>(l > 0 ? l : -l) - 1].data();
    if (l > 0) {
      for (char ch : img) append_reduced(buf, static_cast<Letter>(ch));
    } else {
      for (auto rit = img.rbegin(); rit != img.rend(); ++rit) {
        append_reduced(buf, static_cast<Letter>(-*rit));
      }
    }
  }
  return buf == rhs.data();
}

// ---------------------------------------------------------------------------
// Words over the mixed alphabet F(X) * F_r, used by the exact solver.  A
// symbol is either a constant letter or a signed variable; reduction
// cancels adjacent mutually inverse symbols of either kind.

struct Sym {
  int var = 0;  // 0 = constant, otherwise +-(variable index)
  Letter c = 0;

  bool cancels(const Sym& o) const {
    if (var != 0 || o.var != 0) return var == -o.var && var != 0;
    return c == static_cast<Letter>(-o.c);
  }
  Sym inverse() const {
    return var != 0 ? Sym{-var, 0} : Sym{0, static_cast<Letter>(-c)};
  }
};

using SymWord = std::vector<Sym>;

void sym_push(SymWord& w, Sym s) {
  if (!w.empty() && w.back().cancels(s)) {
    w.pop_back();
  } else {
    w.push_back(s);
  }
}

SymWord sym_invert(const SymWord& w) {
  SymWord out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) sym_push(out, it->inverse());
  return out;
}

SymWord sym_concat(const SymWord& a, const SymWord& b) {
  SymWord out = a;
  for (const Sym& s : b) sym_push(out, s);
  return out;
}

// Replaces every occurrence of +-var by def / def^-1.
SymWord sym_substitute(const SymWord& w, int var, const SymWord& def) {
  SymWord inv = sym_invert(def);
  SymWord out;
  for (const Sym& s : w) {
    if (s.var == var) {
      for (const Sym& d : def) sym_push(out, d);
    } else if (s.var == -var) {
      for (const Sym& d : inv) sym_push(out, d);
    } else {
      sym_push(out, s);
    }
  }
  return out;
}

// Evaluates a symbol word once every variable in it has a concrete value;
// missing variables count as the identity.
Word sym_evaluate(const SymWord& w, const std::map<int, Word>& values, int rank) {
  std::string buf;
  for (const Sym& s : w) {
    if (s.var == 0) {
      append_reduced(buf, s.c);
      continue;
    }
    int v = s.var > 0 ? s.var : -s.var;
    auto it = values.find(v);
    if (it == values.end()) continue;
    const std::string& img = it->second.data();
    if (s.var > 0) {
      for (char ch : img) append_reduced(buf, static_cast<Letter>(ch));
    } else {
      for (auto rit = img.rbegin(); rit != img.rend(); ++rit) {
        append_reduced(buf, static_cast<Letter>(-*rit));
      }
    }
  }
  std::vector<Letter> letters(buf.begin(), buf.end());
  return Word::from_letters(letters, rank);
}

// Constant segment [from, to) of a symbol word as a Word; the caller
// guarantees the segment contains no variables.
Word sym_segment_word(const SymWord& w, std::size_t from, std::size_t to, int rank) {
  std::vector<Letter> letters;
  for (std::size_t i = from; i < to; ++i) letters.push_back(w[i].c);
  return Word::from_letters(letters, rank);
}

// ---------------------------------------------------------------------------
// Conjugacy in the free group.  Solves y S y^-1 = T for one y0 (or reports
// none); the full solution set is then y0 <primitive_root(S)>.  Both sides
// must be nontrivial.

std::optional<Word> conjugacy_witness(const Word& s, const Word& t) {
  CyclicForm cs = cyclic_reduce(s);
  CyclicForm ct = cyclic_reduce(t);
  if (cs.core.size() != ct.core.size() || cs.core.empty()) return std::nullopt;
  std::size_t n = cs.core.size();
  for (std::size_t j = 0; j < n; ++j) {
    bool match = true;
    for (std::size_t i = 0; i < n && match; ++i) {
      match = cs.core.letter((j + i) % n) == ct.core.letter(i);
    }
    if (!match) continue;
    // core(T) = rot_j(core(S)) = p^-1 core(S) p with p the first j letters.
    std::vector<Letter> prefix;
    for (std::size_t i = 0; i < j; ++i) prefix.push_back(cs.core.letter(i));
    Word p = Word::from_letters(prefix, s.rank());
    Word y0 = multiply(multiply(ct.conj, invert(p)), invert(cs.conj));
    if (conjugate(s, invert(y0)) == t) return y0;  // y0 s y0^-1
  }
  return std::nullopt;
}

bool commutes(const Word& u, const Word& v) {
  return multiply(u, v) == multiply(v, u);
}

// ---------------------------------------------------------------------------
// Exact solver internals.

constexpr long long kExactWindowCap = 4096;

struct EliminationState {
  std::vector<SymWord> eqs;
  std::vector<std::pair<int, SymWord>> defs;  // in elimination order
};

// Repeatedly eliminates a variable that occurs exactly once in some
// equation; each round consumes that equation and records the forced
// definition of the variable in terms of the others.
EliminationState eliminate(const CoefficientSystem& sys) {
  EliminationState st;
  for (const auto& eq : sys.equations) {
    SymWord w;
    for (std::size_t i = 0; i < eq.lhs.size(); ++i) {
      sym_push(w, Sym{eq.lhs.letter(i), 0});
    }
    for (std::size_t i = eq.rhs.size(); i-- > 0;) {
      sym_push(w, Sym{0, static_cast<Letter>(-eq.rhs.letter(i))});
    }
    if (!w.empty()) st.eqs.push_back(std::move(w));
  }

  for (;;) {
    int pick_eq = -1, pick_var = 0;
    std::size_t pick_pos = 0;
    for (std::size_t e = 0; e < st.eqs.size() && pick_eq < 0; ++e) {
      std::map<int, std::pair<int, std::size_t>> count;  // var -> (count, pos)
      for (std::size_t i = 0; i < st.eqs[e].size(); ++i) {
        if (int v = st.eqs[e][i].var; v != 0) {
          auto& slot = count[v > 0 ? v : -v];
          ++slot.first;
          slot.second = i;
        }
      }
      for (const auto& [v, cp] : count) {
        if (cp.first == 1) {
          pick_eq = static_cast<int>(e);
          pick_var = v;
          pick_pos = cp.second;
          break;
        }
      }
    }
    if (pick_eq < 0) return st;

    SymWord eq = std::move(st.eqs[static_cast<std::size_t>(pick_eq)]);
    st.eqs.erase(st.eqs.begin() + pick_eq);
    SymWord a(eq.begin(), eq.begin() + static_cast<std::ptrdiff_t>(pick_pos));
    SymWord b(eq.begin() + static_cast<std::ptrdiff_t>(pick_pos) + 1, eq.end());
    // A x B = 1 forces x = A^-1 B^-1; A x^-1 B = 1 forces x = B A.
    SymWord def = eq[pick_pos].var > 0
                      ? sym_concat(sym_invert(a), sym_invert(b))
                      : sym_concat(b, a);
    for (auto& other : st.eqs) other = sym_substitute(other, pick_var, def);
    std::erase_if(st.eqs, [](const SymWord& w) { return w.empty(); });
    st.defs.emplace_back(pick_var, std::move(def));
  }
}

// Evaluates the recorded definitions (in reverse elimination order) on top
// of the given seed values, and checks that every assigned value lies in
// the domain.  Returns the full value map or nullopt on a membership
// failure.
std::optional<std::map<int, Word>> close_values(const EliminationState& st,
                                                std::map<int, Word> values,
                                                const SubgroupGraph& domain) {
  int rank = domain.alphabet_rank();
  for (auto it = st.defs.rbegin(); it != st.defs.rend(); ++it) {
    values[it->first] = sym_evaluate(it->second, values, rank);
  }
  for (const auto& [v, w] : values) {
    if (!domain.contains(w)) return std::nullopt;
  }
  return values;
}

Substitution assignment_from_values(const std::map<int, Word>& values, int vars,
                                    int rank) {
  std::vector<Word> images(static_cast<std::size_t>(vars), Word(rank));
  for (const auto& [v, w] : values) {
    if (v >= 1 && v <= vars) images[static_cast<std::size_t>(v) - 1] = w;
  }
  return Substitution(std::move(images), rank);
}

ExactOutcome exact_found(const EliminationState& st, std::map<int, Word> seed,
                         const CoefficientSystem& sys, const SubgroupGraph& domain) {
  auto closed = close_values(st, std::move(seed), domain);
  if (!closed) return {ExactStatus::Inconclusive, std::nullopt, "internal: candidate left the domain"};
  Substitution sub = assignment_from_values(*closed, sys.vars, sys.constant_rank);
  if (!satisfies(sub, sys)) {
    return {ExactStatus::Inconclusive, std::nullopt, "internal: candidate failed re-verification"};
  }
  return {ExactStatus::Found, Solution{std::move(sub), domain}, ""};
}

}  // namespace

// ---------------------------------------------------------------------------
// CoefficientSystem JSON round trip.

CoefficientSystem CoefficientSystem::parse_json(const std::string& text,
                                                int constant_rank) {
  nlohmann::json j = nlohmann::json::parse(text);
  CoefficientSystem sys;
  sys.vars = j.at("vars").get<int>();
  if (sys.vars < 0) throw InvalidLetter("negative variable count");
  sys.constant_rank = constant_rank > 0 ? constant_rank : j.value("rank", 0);
  if (sys.constant_rank <= 0) {
    throw AlphabetMismatch("system needs a positive constant rank");
  }
  for (const auto& je : j.at("eqs")) {
    CoefficientEquation eq;
    eq.lhs = parse_variable_word(je.at("lhs").get<std::string>(), sys.vars);
    eq.rhs = Word::parse(je.at("rhs").get<std::string>(), sys.constant_rank);
    sys.equations.push_back(std::move(eq));
  }
  return sys;
}

std::string CoefficientSystem::to_json_string() const {
  nlohmann::ordered_json j;
  j["vars"] = vars;
  j["rank"] = constant_rank;
  j["eqs"] = nlohmann::ordered_json::array();
  for (const auto& eq : equations) {
    j["eqs"].push_back({{"lhs", variable_word_str(eq.lhs)}, {"rhs", eq.rhs.str()}});
  }
  return j.dump();
}

// ---------------------------------------------------------------------------
// Bounded exhaustive search.

SolveResult solve_in_subgroup(const CoefficientSystem& sys, const SubgroupGraph& domain,
                              int bound, unsigned long long budget) {
  if (domain.alphabet_rank() != sys.constant_rank) {
    throw AlphabetMismatch("system constants and domain live over different ranks");
  }
  SolveResult res;
  res.bound = bound;
  std::vector<Word> elems = domain.enumerate_elements(bound);
  std::vector<int> active = active_variables(sys);

  std::vector<Word> images(static_cast<std::size_t>(sys.vars), Word(sys.constant_rank));
  std::vector<std::size_t> idx(active.size(), 0);
  std::string buf;
  for (;;) {
    if (++res.states > budget) {
      throw BudgetExceeded("equation search exceeded its state budget", res.states);
    }
    for (std::size_t i = 0; i < active.size(); ++i) {
      images[static_cast<std::size_t>(active[i]) - 1] = elems[idx[i]];
    }
    bool ok = true;
    for (const auto& eq : sys.equations) {
      if (!eval_equals(images, eq.lhs, eq.rhs, buf)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      Substitution sub(images, sys.constant_rank);
      bool inside = satisfies(sub, sys);  // independent re-check of the fast path
      for (const Word& w : sub.images()) inside = inside && domain.contains(w);
      if (inside) {
        res.status = SolveStatus::Found;
        res.solution = Solution{std::move(sub), domain};
        return res;
      }
    }
    if (!advance_odometer(idx, elems.size())) break;
  }
  res.status = SolveStatus::NotFoundUpToBound;
  return res;
}

SolveResult solve_verbal(const Word& lhs, const Word& rhs, const SubgroupGraph& domain,
                         int bound, unsigned long long budget) {
  CoefficientSystem sys;
  sys.vars = lhs.rank();
  sys.constant_rank = rhs.rank();
  sys.equations.push_back(CoefficientEquation{lhs, rhs});
  return solve_in_subgroup(sys, domain, bound, budget);
}

// ---------------------------------------------------------------------------
// Exact reduction.

ExactOutcome solve_system_exact(const CoefficientSystem& sys, const SubgroupGraph& domain) {
  if (domain.alphabet_rank() != sys.constant_rank) {
    throw AlphabetMismatch("system constants and domain live over different ranks");
  }
  const int rank = sys.constant_rank;
  EliminationState st = eliminate(sys);

  // Any surviving equation with no variables at all is a constant that must
  // reduce to the identity; elimination already dropped empty words.
  for (const SymWord& eq : st.eqs) {
    if (std::all_of(eq.begin(), eq.end(), [](const Sym& s) { return s.var == 0; })) {
      Word c = sym_segment_word(eq, 0, eq.size(), rank);
      return {ExactStatus::NoSolution, std::nullopt,
              "reduces to the false constant relation " + c.str() + " = 1"};
    }
  }

  if (st.eqs.empty()) {
    // Every equation was consumed; setting the free variables to the
    // identity is a solution over the free group, and usually lands in the
    // domain.  If it does not, some other free choice might, so only a
    // positive answer is decisive here.
    ExactOutcome out = exact_found(st, {}, sys, domain);
    if (out.status == ExactStatus::Found) return out;
    return {ExactStatus::Inconclusive, std::nullopt,
            "fully eliminated, but the identity seed leaves the domain"};
  }
  if (st.eqs.size() > 1) {
    return {ExactStatus::Inconclusive, std::nullopt,
            "elimination left more than one equation"};
  }

  const SymWord& eq = st.eqs.front();
  int var = 0;
  std::vector<std::pair<std::size_t, int>> occ;  // (position, sign)
  for (std::size_t i = 0; i < eq.size(); ++i) {
    if (eq[i].var == 0) continue;
    int v = eq[i].var > 0 ? eq[i].var : -eq[i].var;
    if (var == 0) var = v;
    if (v != var) {
      return {ExactStatus::Inconclusive, std::nullopt,
              "residual equation involves several variables"};
    }
    occ.emplace_back(i, eq[i].var > 0 ? 1 : -1);
  }
  if (occ.size() != 2) {
    return {ExactStatus::Inconclusive, std::nullopt,
            "residual equation is not of conjugacy or square shape"};
  }

  Word a = sym_segment_word(eq, 0, occ[0].first, rank);
  Word b = sym_segment_word(eq, occ[0].first + 1, occ[1].first, rank);
  Word c = sym_segment_word(eq, occ[1].first + 1, eq.size(), rank);
  Word r = multiply(invert(a), invert(c));  // A y^e B y^e' C = 1, so y^e B y^e' = R

  if (occ[0].second == occ[1].second) {
    // Same sign: y B y = R (after inverting the whole relation when both
    // signs are negative), so (yB)^2 = RB and square roots are unique.
    Word bb = b, rr = r;
    if (occ[0].second < 0) {
      // Inverting A y^-1 B y^-1 C = 1 gives C^-1 y B^-1 y A^-1 = 1, the
      // positive shape with R' = (C^-1)^-1 (A^-1)^-1 = C A.
      bb = invert(b);
      rr = multiply(c, a);
    }
    Word square = multiply(rr, bb);
    Word y;
    if (square.empty()) {
      y = invert(bb);  // z = 1
    } else {
      RootPower rp = primitive_root(square);
      if (rp.exponent % 2 != 0) {
        return {ExactStatus::NoSolution, std::nullopt,
                "square shape: " + square.str() + " is not a square"};
      }
      y = multiply(power(rp.root, rp.exponent / 2), invert(bb));
    }
    ExactOutcome out = exact_found(st, {{var, y}}, sys, domain);
    if (out.status == ExactStatus::Found) return out;
    return {ExactStatus::NoSolution, std::nullopt,
            "square shape: the unique solution y = " + y.str() +
                " does not keep every image inside the subgroup"};
  }

  // Opposite signs: a conjugacy equation.  Normalise to y S y^-1 = T.
  Word s_side, t_side;
  if (occ[0].second > 0) {
    s_side = b;  // y B y^-1 = R
    t_side = r;
  } else {
    s_side = r;  // y^-1 B y = R, i.e. y R y^-1 = B
    t_side = b;
  }
  if (s_side.empty() || t_side.empty()) {
    // B is never empty (the two occurrences would have cancelled), so an
    // empty side means conjugating a nontrivial word to the identity.
    return {ExactStatus::NoSolution, std::nullopt,
            "conjugacy shape: a nontrivial word cannot be conjugate to 1"};
  }
  std::optional<Word> y0 = conjugacy_witness(s_side, t_side);
  if (!y0) {
    return {ExactStatus::NoSolution, std::nullopt,
            "conjugacy shape: " + s_side.str() + " and " + t_side.str() +
                " are not conjugate"};
  }
  Word rho = primitive_root(s_side).root;

  // The solutions over the free group are exactly y(k) = y0 rho^k.  The
  // induced generator images are products of fixed words and rho^k blocks,
  // so their membership in the domain is an eventually periodic predicate
  // of k: past a transient T it repeats with period D = lcm(1..V+1), V the
  // vertex count of the domain graph.  Scanning |k| <= T + D therefore
  // decides whether any k works at all.  The transient must be measured on
  // the definitions fully expanded down to the residual variable, since
  // nested definitions multiply the number of rho^k blocks.
  std::map<int, SymWord> expanded;
  long long fixed = static_cast<long long>(y0->size() + rho.size());
  for (auto it = st.defs.rbegin(); it != st.defs.rend(); ++it) {
    SymWord ex;
    for (const Sym& s : it->second) {
      int v = s.var > 0 ? s.var : -s.var;
      if (s.var == 0 || v == var) {
        sym_push(ex, s);
      } else if (auto found = expanded.find(v); found != expanded.end()) {
        const SymWord& sub = s.var > 0 ? found->second : sym_invert(found->second);
        for (const Sym& d : sub) sym_push(ex, d);
      }  // free variables evaluate to the identity and vanish
    }
    for (const Sym& s : ex) {
      fixed += s.var == 0 ? 1 : static_cast<long long>(y0->size() + rho.size());
    }
    expanded.emplace(it->first, std::move(ex));
  }
  long long transient = 2 * fixed + domain.vertex_count() + 16;
  long long period = 1;
  for (int m = 2; m <= domain.vertex_count() + 1; ++m) {
    period = std::lcm(period, static_cast<long long>(m));
    if (period > kExactWindowCap) break;
  }
  if (transient + period > kExactWindowCap) {
    return {ExactStatus::Inconclusive, std::nullopt,
            "conjugacy shape: periodicity window exceeds the scan cap"};
  }
  long long window = transient + period;
  for (long long k = -window; k <= window; ++k) {
    Word y = multiply(*y0, power(rho, k));
    ExactOutcome out = exact_found(st, {{var, y}}, sys, domain);
    if (out.status == ExactStatus::Found) return out;
  }
  return {ExactStatus::NoSolution, std::nullopt,
          "conjugacy shape: no member of the solution family y0 rho^k keeps "
          "every image inside the subgroup (decided by periodicity)"};
}

// ---------------------------------------------------------------------------
// Conjugating one tuple onto another.

std::optional<Word> conjugator_of_tuples(std::span<const Word> g, std::span<const Word> h) {
  if (g.size() != h.size()) {
    throw AlphabetMismatch("tuples of different lengths cannot be conjugate");
  }
  std::size_t i0 = g.size();
  int rank = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    rank = std::max({rank, g[i].rank(), h[i].rank()});
    if (!h[i].empty() && i0 == g.size()) i0 = i;
  }
  if (i0 == g.size()) {
    throw DegenerateTuple("the reference tuple is trivial; conjugation is unconstrained");
  }

  // Solve the first nontrivial coordinate: u^-1 h u = g means y h y^-1 = g
  // for y = u^-1, with solution family y = y0 rho^k, rho the primitive root
  // of h_{i0}.
  if (g[i0].empty()) return std::nullopt;
  std::optional<Word> y0 = conjugacy_witness(h[i0], g[i0]);
  if (!y0) return std::nullopt;
  Word rho = primitive_root(h[i0]).root;

  auto tuple_ok = [&](const Word& y) {
    Word u = invert(y);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(conjugate(h[i], u) == g[i])) return false;  // u^-1 h_i u
    }
    return true;
  };

  // A coordinate with h_i outside the centraliser of rho pins k down to at
  // most one value: rho^k h_i rho^-k = rho^m h_i rho^-m forces k = m.  Any
  // such coordinate turns the search into a finite check.
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h[i].empty() || commutes(h[i], rho)) continue;
    Word target = conjugate(g[i], *y0);  // y0^-1 g_i y0
    long long cap = static_cast<long long>(g[i].size() + h[i].size() + rho.size()) + 8;
    std::optional<Word> best;
    for (long long k = -cap; k <= cap; ++k) {
      // Need rho^k h_i rho^-k = y0^-1 g_i y0.
      Word lhs = multiply(multiply(power(rho, k), h[i]), power(rho, -k));
      if (!(lhs == target)) continue;
      Word y = multiply(*y0, power(rho, k));
      if (tuple_ok(y)) best = invert(y);
      break;  // k is unique for this coordinate
    }
    return best;
  }

  // Every nontrivial h_i commutes with rho, so the condition is constant in
  // k; if y0 itself works, minimise |u| over the family u = rho^-k y0^-1.
  if (!tuple_ok(*y0)) return std::nullopt;
  long long span_k = static_cast<long long>(y0->size() / std::max<std::size_t>(rho.size(), 1)) + 2;
  std::optional<Word> best;
  for (long long k = -span_k; k <= span_k; ++k) {
    Word u = multiply(power(rho, -k), invert(*y0));
    if (!best || u.size() < best->size() ||
        (u.size() == best->size() && shortlex_less(u, *best))) {
      best = u;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// C-test probes.

std::vector<CTestReport> check_ctest_property(const Word& w,
                                              std::span<const TuplePair> pairs) {
  std::vector<CTestReport> reports;
  for (const auto& [gt, vt] : pairs) {
    if (static_cast<int>(gt.size()) != w.rank() ||
        static_cast<int>(vt.size()) != w.rank()) {
      throw AlphabetMismatch("tuple length does not match the variable count");
    }
    int rank = 0;
    for (const Word& x : gt) rank = std::max(rank, x.rank());
    for (const Word& x : vt) rank = std::max(rank, x.rank());

    CTestReport rep;
    Substitution sg(std::vector<Word>(gt.begin(), gt.end()), rank);
    Substitution sv(std::vector<Word>(vt.begin(), vt.end()), rank);
    rep.value_g = sg.apply(w);
    rep.value_v = sv.apply(w);

    bool g_cyclic = SubgroupGraph::fold(gt, rank).subgroup_rank() <= 1;
    bool v_cyclic = SubgroupGraph::fold(vt, rank).subgroup_rank() <= 1;
    rep.lee_consistent_g = (rep.value_g.empty() == g_cyclic);
    rep.lee_consistent_v = (rep.value_v.empty() == v_cyclic);

    // Trigger on conjugate (not just equal) nontrivial values: if the word
    // has the property for equal values it has it for conjugate values too,
    // because w(s v s^-1) = s w(v) s^-1 turns one case into the other.
    if (!rep.value_g.empty() && !rep.value_v.empty() &&
        conjugacy_witness(rep.value_g, rep.value_v)) {
      rep.conjugator = conjugator_of_tuples(
          std::vector<Word>(vt.begin(), vt.end()),
          std::vector<Word>(gt.begin(), gt.end()));
      rep.verdict = rep.conjugator ? CTestVerdict::Consistent : CTestVerdict::Violation;
    } else {
      rep.verdict = CTestVerdict::Vacuous;
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

// ---------------------------------------------------------------------------
// Discriminating retractions.

DiscriminationResult find_discriminating_retraction(const SubgroupGraph& h,
                                                    std::span<const Word> targets,
                                                    int bound,
                                                    unsigned long long budget) {
  DiscriminationResult res;
  const int rank = h.alphabet_rank();
  std::vector<Word> elems = h.enumerate_elements(bound);
  std::vector<Word> basis = h.basis();

  std::vector<std::size_t> idx(static_cast<std::size_t>(rank), 0);
  std::vector<Word> images(static_cast<std::size_t>(rank), Word(rank));
  std::string buf;
  for (;;) {
    if (++res.states > budget) {
      throw BudgetExceeded("retraction search exceeded its state budget", res.states);
    }
    for (std::size_t i = 0; i < idx.size(); ++i) images[i] = elems[idx[i]];
    bool fixes = true;
    for (const Word& b : basis) {
      if (!eval_equals(images, b, b, buf)) {
        fixes = false;
        break;
      }
    }
    if (fixes) {
      Substitution sub(images, rank);
      std::vector<std::string> seen;
      for (const Word& t : targets) {
        seen.push_back(sub.apply(t).data());
      }
      std::sort(seen.begin(), seen.end());
      if (std::adjacent_find(seen.begin(), seen.end()) == seen.end()) {
        res.found = true;
        res.retraction = std::move(sub);
        return res;
      }
    }
    if (!advance_odometer(idx, elems.size())) break;
  }
  return res;
}

}  // namespace vclose
