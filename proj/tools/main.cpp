// vclose: batch front end for the free-group closure toolkit.
//
// Every subcommand prints one JSON object (or DOT/plain text where asked)
// on stdout and keeps diagnostics on stderr.  Exit codes: 0 for decisive
// answers, 2 when the result is UNKNOWN or NOT_FOUND_UP_TO_BOUND, 1 for
// usage or input errors.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vclose/closure.hpp"
#include "vclose/equations.hpp"
#include "vclose/errors.hpp"
#include "vclose/nilpotent.hpp"
#include "vclose/stallings.hpp"
#include "vclose/word.hpp"

namespace {

using ojson = nlohmann::ordered_json;
using namespace vclose;

constexpr int kExitDecisive = 0;
constexpr int kExitUnknown = 2;

std::string read_stdin() {
  std::ostringstream ss;
  ss << std::cin.rdbuf();
  return ss.str();
}

// Comma- or whitespace-separated generator words; "-" pulls the list from
// stdin instead.
std::vector<Word> parse_gens(const std::string& arg, int rank) {
  std::string text = arg == "-" ? read_stdin() : arg;
  std::vector<Word> out;
  std::string token;
  auto flush = [&] {
    if (!token.empty()) {
      out.push_back(Word::parse(token, rank));
      token.clear();
    }
  };
  for (char ch : text) {
    if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') {
      flush();
    } else {
      token += ch;
    }
  }
  flush();
  return out;
}

ojson words_json(const std::vector<Word>& ws) {
  ojson arr = ojson::array();
  for (const Word& w : ws) arr.push_back(w.str());
  return arr;
}

ojson graph_json(const SubgroupGraph& g) {
  ojson j = ojson::parse(g.to_json_string());
  j["subgroup_rank"] = g.subgroup_rank();
  j["basis"] = words_json(g.basis());
  return j;
}

// Variable words print as space-separated tokens x1 x2 X1; identity is "1".
std::string var_word_str(const Word& w) {
  if (w.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    Letter l = w.letter(i);
    out += l > 0 ? 'x' : 'X';
    out += std::to_string(l > 0 ? l : -l);
  }
  return out;
}

void emit(const ojson& j) { std::cout << j.dump() << "\n"; }

ojson certificate_json(const NoCertificate& cert, const SubgroupGraph& h) {
  ojson j;
  switch (cert.type) {
    case CertificateType::CyclicNonPrimitive: {
      j["type"] = "cyclic-non-primitive";
      std::vector<Word> basis = h.basis();
      if (basis.size() == 1) {
        j["vector"] = exponent_vector(basis.front());
      }
      break;
    }
    case CertificateType::AbelianObstruction:
      j["type"] = "abelian-obstruction";
      break;
    case CertificateType::RankExceedsAmbient:
      j["type"] = "rank-exceeds-ambient";
      break;
    case CertificateType::SystemReduction:
      j["type"] = "system-reduction";
      break;
  }
  if (!cert.detail.empty()) j["detail"] = cert.detail;
  return j;
}

ojson matrix_json(const IntMatrix& m) {
  ojson rows = ojson::array();
  for (int i = 0; i < m.rows; ++i) {
    ojson row = ojson::array();
    for (int j = 0; j < m.cols; ++j) row.push_back(m.at(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------

int run_fold(int rank, const std::string& gens, const std::string& format) {
  SubgroupGraph g = SubgroupGraph::fold(parse_gens(gens, rank), rank);
  if (format == "dot") {
    std::cout << g.to_dot();
  } else if (format == "text") {
    std::cout << "vertices=" << g.vertex_count() << " rank=" << g.subgroup_rank() << "\n";
    for (const Word& w : g.basis()) std::cout << w.str() << "\n";
  } else {
    emit(graph_json(g));
  }
  return kExitDecisive;
}

int run_member(int rank, const std::string& gens, const std::string& word) {
  SubgroupGraph g = SubgroupGraph::fold(parse_gens(gens, rank), rank);
  ojson j;
  j["member"] = g.contains(Word::parse(word, rank));
  emit(j);
  return kExitDecisive;
}

int run_basis(int rank, const std::string& gens) {
  SubgroupGraph g = SubgroupGraph::fold(parse_gens(gens, rank), rank);
  ojson j;
  j["rank"] = g.subgroup_rank();
  j["basis"] = words_json(g.basis());
  emit(j);
  return kExitDecisive;
}

int run_intersect(int rank, const std::string& gens, const std::string& gens2,
                  const std::string& format) {
  SubgroupGraph a = SubgroupGraph::fold(parse_gens(gens, rank), rank);
  SubgroupGraph b = SubgroupGraph::fold(parse_gens(gens2, rank), rank);
  SubgroupGraph g = SubgroupGraph::intersect(a, b);
  if (format == "dot") {
    std::cout << g.to_dot();
  } else {
    emit(graph_json(g));
  }
  return kExitDecisive;
}

int run_fringe(int rank, const std::string& gens, int vertex_limit) {
  SubgroupGraph g = SubgroupGraph::fold(parse_gens(gens, rank), rank);
  std::vector<SubgroupGraph> fr = g.fringe(vertex_limit);
  ojson j;
  j["count"] = fr.size();
  ojson arr = ojson::array();
  for (const SubgroupGraph& q : fr) {
    ojson e;
    e["rank"] = q.subgroup_rank();
    e["basis"] = words_json(q.basis());
    arr.push_back(std::move(e));
  }
  j["subgroups"] = std::move(arr);
  emit(j);
  return kExitDecisive;
}

int run_abelianize(int rank, const std::string& gens) {
  SubgroupGraph g = SubgroupGraph::fold(parse_gens(gens, rank), rank);
  std::vector<ExponentVector> vectors;
  for (const Word& w : g.basis()) vectors.push_back(exponent_vector(w));
  ObstructionResult ob = abelian_retract_obstruction(vectors, rank);
  ojson j;
  j["vectors"] = vectors;
  j["verdict"] = ob.verdict == Obstruction::Passes ? "passes" : "obstructed";
  if (!ob.reason.empty()) j["reason"] = ob.reason;
  if (ob.witness) j["witness"] = matrix_json(*ob.witness);
  emit(j);
  return kExitDecisive;
}

int run_is_retract(int rank, const std::string& gens, int bound,
                   unsigned long long budget) {
  SubgroupGraph h = SubgroupGraph::fold(parse_gens(gens, rank), rank);
  RetractVerdict res = is_retract(h, bound, budget);
  ojson j;
  switch (res.kind) {
    case VerdictKind::Yes:
      j["verdict"] = "yes";
      j["retraction"] = {{"images", words_json(res.retraction->images())}};
      break;
    case VerdictKind::No:
      j["verdict"] = "no";
      j["certificate"] = certificate_json(*res.certificate, h);
      break;
    case VerdictKind::Unknown:
      j["verdict"] = "unknown";
      j["bound"] = res.bound;
      break;
  }
  if (!res.note.empty()) j["note"] = res.note;
  emit(j);
  return res.kind == VerdictKind::Unknown ? kExitUnknown : kExitDecisive;
}

int run_is_verbally_closed(int rank, const std::string& gens, int bound,
                           unsigned long long budget) {
  SubgroupGraph h = SubgroupGraph::fold(parse_gens(gens, rank), rank);
  VerbalVerdict res = is_verbally_closed(h, bound, budget);
  ojson j;
  switch (res.kind) {
    case VerdictKind::Yes:
      j["verdict"] = "yes";
      j["retraction"] = {{"images", words_json(res.retraction->images())}};
      break;
    case VerdictKind::No:
      j["verdict"] = "no";
      j["certificate"] = certificate_json(*res.certificate, h);
      if (res.equation) {
        j["equation"] = {{"lhs", var_word_str(res.equation->lhs)},
                         {"rhs", res.equation->rhs.str()},
                         {"bound", res.equation->bound}};
      }
      break;
    case VerdictKind::Unknown:
      j["verdict"] = "unknown";
      j["bound"] = res.bound;
      break;
  }
  if (!res.note.empty()) j["note"] = res.note;
  emit(j);
  return res.kind == VerdictKind::Unknown ? kExitUnknown : kExitDecisive;
}

int run_vcl(int rank, const std::string& gens, int bound, unsigned long long budget,
            int vertex_limit) {
  SubgroupGraph h = SubgroupGraph::fold(parse_gens(gens, rank), rank);
  ClosureResult res = vcl(h, bound, budget, vertex_limit);
  ojson j;
  j["closure"] = words_json(res.closure.basis());
  j["status"] = res.status == ClosureStatus::Exact ? "exact" : "conditional";
  j["rank"] = res.closure.subgroup_rank();
  j["undecided"] = res.undecided.size();
  emit(j);
  return res.status == ClosureStatus::Exact ? kExitDecisive : kExitUnknown;
}

int run_solve(int rank, const std::string& system, const std::string& gens, int bound,
              unsigned long long budget) {
  std::string text;
  if (system == "-") {
    text = read_stdin();
  } else if (!system.empty() && system.front() == '@') {
    std::ifstream in(system.substr(1));
    if (!in) throw Error("cannot open system file " + system.substr(1));
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  } else {
    text = system;
  }
  CoefficientSystem sys = CoefficientSystem::parse_json(text, rank);
  SubgroupGraph domain = gens.empty() ? SubgroupGraph::whole_group(rank)
                                      : SubgroupGraph::fold(parse_gens(gens, rank), rank);
  ojson j;
  try {
    SolveResult res = solve_in_subgroup(sys, domain, bound, budget);
    if (res.status == SolveStatus::Found) {
      j["status"] = "found";
      j["assignment"] = words_json(res.solution->assignment.images());
      j["states"] = res.states;
      emit(j);
      return kExitDecisive;
    }
    j["status"] = "not-found-up-to-bound";
    j["bound"] = res.bound;
    j["states"] = res.states;
    emit(j);
    return kExitUnknown;
  } catch (const BudgetExceeded& e) {
    std::cerr << "vclose: " << e.what() << "\n";
    j["status"] = "budget-exceeded";
    j["states"] = e.states;
    emit(j);
    return kExitUnknown;
  }
}

std::vector<long long> parse_exps(const std::string& text) {
  std::vector<long long> out;
  std::string token;
  auto flush = [&] {
    if (!token.empty()) {
      out.push_back(std::stoll(token));
      token.clear();
    }
  };
  for (char ch : text) {
    if (ch == ',' || ch == ' ') {
      flush();
    } else {
      token += ch;
    }
  }
  flush();
  return out;
}

int run_nil_collect(int rank, int cls, const std::string& word) {
  auto basis = HallBasis::make(rank, cls);
  NilElement el = collect(Word::parse(word, rank), basis);
  ojson j;
  j["basis"] = basis->name();
  j["exps"] = el.exps;
  ojson names = ojson::array();
  for (const BasicCommutator& bc : basis->commutators()) names.push_back(bc.name);
  j["names"] = std::move(names);
  emit(j);
  return kExitDecisive;
}

int run_nil_width(int rank, int cls, const std::string& word, const std::string& exps,
                  int k, long long coord_bound, unsigned long long budget) {
  if (word.empty() && exps.empty()) {
    throw Error("nilpotent width needs --word or --exps");
  }
  auto basis = HallBasis::make(rank, cls);
  NilElement g = word.empty() ? nil_from_exponents(basis, parse_exps(exps))
                              : collect(Word::parse(word, rank), basis);
  ojson j;
  j["basis"] = basis->name();
  j["element"] = g.exps;
  j["k"] = k;
  j["coord_bound"] = coord_bound;
  try {
    WidthResult res = commutator_width_bounded(g, k, coord_bound, budget);
    j["representable"] = res.representable;
    j["states"] = res.states;
    if (res.representable) {
      ojson witness = ojson::array();
      for (const auto& [x, y] : res.witness) {
        witness.push_back({{"x", x.exps}, {"y", y.exps}});
      }
      j["witness"] = std::move(witness);
      emit(j);
      return kExitDecisive;
    }
    emit(j);
    return kExitUnknown;  // bounded non-representability is not a width proof
  } catch (const BudgetExceeded& e) {
    std::cerr << "vclose: " << e.what() << "\n";
    j["status"] = "budget-exceeded";
    j["states"] = e.states;
    emit(j);
    return kExitUnknown;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"free-group verbal closure toolkit"};
  app.require_subcommand(1);

  int rank = 2;
  std::string gens, gens2, word, format = "json", system;
  int bound = kDefaultSearchBound;
  unsigned long long budget = kDefaultBudget;
  int vertex_limit = kDefaultFringeVertexLimit;
  int cls = 2, k = 1;
  long long coord_bound = 3;
  std::string exps;

  auto add_rank = [&](CLI::App* sub) {
    sub->add_option("--rank", rank, "ambient free group rank")->required();
  };
  auto add_gens = [&](CLI::App* sub) {
    sub->add_option("--gens", gens, "comma-separated generator words, or - for stdin")
        ->required();
  };

  CLI::App* fold = app.add_subcommand("fold", "fold generators into a subgroup graph");
  add_rank(fold);
  add_gens(fold);
  fold->add_option("--format", format)->check(CLI::IsMember({"json", "dot", "text"}));

  CLI::App* member = app.add_subcommand("member", "decide subgroup membership");
  add_rank(member);
  add_gens(member);
  member->add_option("--word", word, "word to test")->required();

  CLI::App* basis = app.add_subcommand("basis", "free basis of the subgroup");
  add_rank(basis);
  add_gens(basis);

  CLI::App* intersect = app.add_subcommand("intersect", "pullback intersection");
  add_rank(intersect);
  add_gens(intersect);
  intersect->add_option("--gens2", gens2, "generators of the second subgroup")->required();
  intersect->add_option("--format", format)->check(CLI::IsMember({"json", "dot"}));

  CLI::App* fringe = app.add_subcommand("fringe", "folded quotients of the subgroup graph");
  add_rank(fringe);
  add_gens(fringe);
  fringe->add_option("--vertex-limit", vertex_limit, "largest graph size to quotient");

  CLI::App* abelianize = app.add_subcommand("abelianize", "exponent vectors and the integral obstruction");
  add_rank(abelianize);
  add_gens(abelianize);

  CLI::App* isr = app.add_subcommand("is-retract", "decide whether the subgroup is a retract");
  add_rank(isr);
  add_gens(isr);
  isr->add_option("--bound", bound, "search bound for retraction images");
  isr->add_option("--budget", budget, "search-state cap");

  CLI::App* isv = app.add_subcommand("is-verbally-closed", "decide verbal closedness");
  add_rank(isv);
  add_gens(isv);
  isv->add_option("--bound", bound, "search bound");
  isv->add_option("--budget", budget, "search-state cap");

  CLI::App* vclcmd = app.add_subcommand("vcl", "verbal closure of the subgroup");
  add_rank(vclcmd);
  add_gens(vclcmd);
  vclcmd->add_option("--bound", bound, "search bound per candidate");
  vclcmd->add_option("--budget", budget, "search-state cap per candidate");
  vclcmd->add_option("--vertex-limit", vertex_limit, "fringe vertex limit");

  CLI::App* solve = app.add_subcommand("solve", "bounded solver for coefficient systems");
  add_rank(solve);
  solve->add_option("--system", system, "system JSON, @file, or - for stdin")->required();
  solve->add_option("--gens", gens, "restrict unknowns to this subgroup");
  solve->add_option("--bound", bound, "max assignment word length");
  solve->add_option("--budget", budget, "search-state cap");

  CLI::App* nil = app.add_subcommand("nilpotent", "free nilpotent group computations");
  nil->require_subcommand(1);

  CLI::App* nilw = nil->add_subcommand("width", "bounded commutator width search");
  nilw->add_option("--rank", rank, "free nilpotent group rank")->required();
  nilw->add_option("--class", cls, "nilpotency class")->required();
  CLI::Option* ow = nilw->add_option("--word", word, "free word naming the element");
  nilw->add_option("--exps", exps, "Mal'cev exponent tuple, comma-separated")->excludes(ow);
  nilw->add_option("--k", k, "number of commutators in the product");
  nilw->add_option("--coord-bound", coord_bound, "operand coordinate box radius");
  nilw->add_option("--budget", budget, "search-state cap");

  CLI::App* nilc = nil->add_subcommand("collect", "Mal'cev normal form of a word");
  nilc->add_option("--rank", rank, "free nilpotent group rank")->required();
  nilc->add_option("--class", cls, "nilpotency class")->required();
  nilc->add_option("--word", word, "free word to collect")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*fold) return run_fold(rank, gens, format);
    if (*member) return run_member(rank, gens, word);
    if (*basis) return run_basis(rank, gens);
    if (*intersect) return run_intersect(rank, gens, gens2, format);
    if (*fringe) return run_fringe(rank, gens, vertex_limit);
    if (*abelianize) return run_abelianize(rank, gens);
    if (*isr) return run_is_retract(rank, gens, bound, budget);
    if (*isv) return run_is_verbally_closed(rank, gens, bound, budget);
    if (*vclcmd) return run_vcl(rank, gens, bound, budget, vertex_limit);
    if (*solve) return run_solve(rank, system, gens, bound, budget);
    if (*nilw) return run_nil_width(rank, cls, word, exps, k, coord_bound, budget);
    if (*nilc) return run_nil_collect(rank, cls, word);
  } catch (const Error& e) {
    std::cerr << "vclose: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "vclose: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
