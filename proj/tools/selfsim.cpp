#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "selfsim/bundled.hpp"
#include "selfsim/convalg.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/fixedpoints.hpp"
#include "selfsim/germs.hpp"
#include "selfsim/group.hpp"
#include "selfsim/mealy.hpp"
#include "selfsim/traces.hpp"

using namespace selfsim;
using nlohmann::ordered_json;

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kParse = 2, kCap = 3, kDomain = 4 };

struct Options {
  std::string machine = "grigorchuk.gt";
  std::string state;
  std::string element;
  std::string element1;
  std::string element2;
  std::string point;
  std::string basis;
  std::string subgroup;
  std::string expression;
  std::string op;
  std::size_t depth = 10;
  std::size_t cap_states = GroupLimits{}.max_states;
  std::size_t cap_patterns = AlgebraLimits{}.max_configurations;
  std::string format = "table";
  std::string output;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A path on disk, or the name of a bundled machine with or without ".gt".
std::string machine_text(const std::string& arg) {
  if (std::filesystem::is_regular_file(arg)) return read_file(arg);
  if (auto text = bundled_machine(arg)) return *text;
  if (auto text = bundled_machine(arg + ".gt")) return *text;
  throw ParseError("no machine file or bundled machine named '" + arg + "'");
}

// Element arguments are either inline text or a file holding it.
std::string element_text(const std::string& arg, const char* flag) {
  if (arg.empty()) throw ParseError(std::string("missing element (") + flag + ")");
  if (std::filesystem::is_regular_file(arg)) return read_file(arg);
  return arg;
}

std::string float_string(const Rational& q) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", to_double(q));
  return buf;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

ordered_json rational_json(const Rational& q) {
  return {{"num", numerator(q).str()}, {"den", denominator(q).str()}};
}

ordered_json scalar_json(const Scalar& s) {
  return {{"re", rational_json(s.re)}, {"im", rational_json(s.im)}, {"text", to_string(s)}};
}

std::string scalar_with_float(const Scalar& s) {
  std::string out = to_string(s) + " (" + float_string(s.re);
  if (!s.is_real()) out += (s.im < 0 ? "" : "+") + float_string(s.im) + "i";
  return out + ")";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Left-aligned columns separated by two spaces.
std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()));
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      line += row[i];
      if (i + 1 < row.size()) line += std::string(width[i] - row[i].size() + 2, ' ');
    }
    out += line + "\n";
  }
  return out;
}

std::string render_csv(const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
    out += "\n";
  }
  return out;
}

class Session {
 public:
  explicit Session(const Options& opt)
      : opt_(opt),
        machine_(parse_machine(machine_text(opt.machine))),
        group_(machine_, GroupLimits{opt.cap_states}),
        measures_(group_),
        limits_{AlgebraLimits{}.max_terms, opt.cap_patterns} {}

  std::string fixmeasure() const {
    if (opt_.state.empty()) throw ParseError("missing state (-s)");
    Aut q = group_.parse_expression(opt_.state);
    auto counts = fixed_counts(group_, q, opt_.depth);
    Rational interior = measures_.interior(q);
    Rational total = measures_.total(q);
    auto cert = boundary_null_certificate(group_, q);

    std::vector<std::vector<std::string>> rows{{"k", "f_k", "i_k", "P_k", "P_k_over_dk_num", "P_k_over_dk_den",
                                                "P_k_over_dk_float"}};
    Rational scale = 1;
    for (std::size_t k = 0; k <= opt_.depth; ++k) {
      Rational ratio = Rational(counts.boundary[k]) * scale;
      rows.push_back({std::to_string(k), counts.fixed[k].str(), counts.interior[k].str(), counts.boundary[k].str(),
                      numerator(ratio).str(), denominator(ratio).str(), float_string(ratio)});
      scale /= group_.degree();
    }
    if (opt_.format == "csv") return render_csv(rows);
    if (opt_.format == "json") {
      ordered_json j;
      j["machine"] = opt_.machine;
      j["state"] = opt_.state;
      j["K"] = opt_.depth;
      ordered_json table = ordered_json::array();
      scale = 1;
      for (std::size_t k = 0; k <= opt_.depth; ++k) {
        table.push_back({{"k", k},
                         {"f_k", counts.fixed[k].str()},
                         {"i_k", counts.interior[k].str()},
                         {"P_k", counts.boundary[k].str()},
                         {"P_k_over_dk", rational_json(Rational(counts.boundary[k]) * scale)}});
        scale /= group_.degree();
      }
      j["counts"] = table;
      j["mu_fix"] = rational_json(total);
      j["mu_int_fix"] = rational_json(interior);
      j["mu_boundary"] = rational_json(total - interior);
      j["certificate"] = certificate_json(cert);
      return j.dump(2) + "\n";
    }
    std::string out = "machine: " + opt_.machine + "\nstate: " + opt_.state + "\n\n";
    std::vector<std::vector<std::string>> table{{"k", "f_k", "i_k", "P_k", "P_k/d^k"}};
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& r = rows[i];
      std::string ratio = r[5] == "1" ? r[4] : r[4] + "/" + r[5];
      table.push_back({r[0], r[1], r[2], r[3], ratio + " (" + r[6] + ")"});
    }
    out += render_table(table) + "\n";
    out += "mu(Fix): " + to_string(total) + " (" + float_string(total) + ")\n";
    out += "mu(int Fix): " + to_string(interior) + "\n";
    out += "mu(Fix \\ int Fix): " + to_string(total - interior) + "\n";
    out += certificate_text(cert);
    return out;
  }

  std::string essfree() const {
    auto report = essential_freeness_report(group_, measures_);
    std::vector<std::vector<std::string>> rows{
        {"state", "p", "max_row_sum", "row_bound", "checks", "certificate", "mu_int_fix", "mu_fix"}};
    for (const auto& s : report.states) {
      rows.push_back({group_.label(s.state), std::to_string(s.certificate.p), s.certificate.max_row_sum.str(),
                      s.certificate.row_bound.str(), std::to_string(s.certificate.checks.size()),
                      s.certificate.vacuous ? "vacuous" : (s.certificate.holds ? "holds" : "fails"),
                      to_string(s.interior_measure), to_string(s.total_measure)});
    }
    if (opt_.format == "csv") return render_csv(rows);
    if (opt_.format == "json") {
      ordered_json j;
      j["machine"] = opt_.machine;
      j["essentially_free"] = report.essentially_free;
      j["topologically_free"] = report.topologically_free;
      ordered_json states = ordered_json::array();
      for (const auto& s : report.states) {
        states.push_back({{"state", group_.label(s.state)},
                          {"certificate", certificate_json(s.certificate)},
                          {"mu_int_fix", rational_json(s.interior_measure)},
                          {"mu_fix", rational_json(s.total_measure)}});
      }
      j["states"] = states;
      return j.dump(2) + "\n";
    }
    return "machine: " + opt_.machine + "\nessentially free: " + yes_no(report.essentially_free) +
           "\ntopologically free: " + yes_no(report.topologically_free) + "\n\n" + render_table(rows);
  }

  std::string hausdorff() const {
    auto w = hausdorff_witness(group_);
    std::string state = w ? group_.label(w->state) : "";
    std::string point = w ? w->point.to_string() : "";
    if (opt_.format == "csv") return render_csv({{"hausdorff", "state", "point"}, {yes_no(!w), state, point}});
    if (opt_.format == "json") {
      ordered_json j;
      j["machine"] = opt_.machine;
      j["hausdorff"] = !w;
      j["witness"] = w ? ordered_json{{"state", state}, {"point", point}} : ordered_json(nullptr);
      return j.dump(2) + "\n";
    }
    std::string out = "machine: " + opt_.machine + "\nhausdorff: " + yes_no(!w) + "\n";
    if (w) out += "witness: " + state + " " + point + "\n";
    return out;
  }

  std::string dangerous() const {
    Point x = point();
    bool verdict = is_dangerous(group_, x);
    if (opt_.format == "csv") return render_csv({{"point", "dangerous"}, {x.to_string(), yes_no(verdict)}});
    if (opt_.format == "json") {
      ordered_json j{{"machine", opt_.machine}, {"point", x.to_string()}, {"dangerous", verdict}};
      return j.dump(2) + "\n";
    }
    return "machine: " + opt_.machine + "\npoint: " + x.to_string() + "\ndangerous: " + yes_no(verdict) + "\n";
  }

  std::string trace() const {
    Element a = element(opt_.element, "-e");
    Scalar tau = canonical_trace(measures_, a);
    Scalar phi = isotropy_trace(measures_, a);
    std::optional<Point> x;
    if (!opt_.point.empty()) x = point();
    std::vector<std::vector<std::string>> rows{{"quantity", "value", "float"}};
    auto row = [&](const std::string& name, const Scalar& s) {
      rows.push_back({name, to_string(s), scalar_with_float(s).substr(to_string(s).size() + 2)});
      rows.back()[2].pop_back();
    };
    row("tau", tau);
    row("phi", phi);
    row("diff", phi - tau);
    Scalar e_val, f_val;
    if (x) {
      e_val = unit_restriction_eval(a, *x);
      f_val = isotropy_sum(a, *x);
      row("E(x)", e_val);
      row("F(x)", f_val);
    }
    if (opt_.format == "csv") return render_csv(rows);
    if (opt_.format == "json") {
      ordered_json j;
      j["machine"] = opt_.machine;
      j["element"] = format_element(a);
      j["tau"] = scalar_json(tau);
      j["phi"] = scalar_json(phi);
      j["diff"] = scalar_json(phi - tau);
      if (x) {
        j["point"] = x->to_string();
        j["E"] = scalar_json(e_val);
        j["F"] = scalar_json(f_val);
      }
      return j.dump(2) + "\n";
    }
    std::string out = "machine: " + opt_.machine + "\nelement:\n" + indent(format_element(a));
    out += "tau: " + scalar_with_float(tau) + "\nphi: " + scalar_with_float(phi) + "\ndiff: " + to_string(phi - tau) + "\n";
    if (x) {
      out += "point: " + x->to_string() + "\nE(a)(x): " + to_string(e_val) + "\nF(a)(x): " + to_string(f_val) + "\n";
    }
    return out;
  }

  std::string alg() const {
    const std::string& op = opt_.op;
    auto first = [&] { return element(opt_.element1.empty() ? opt_.element : opt_.element1, "-e1"); };
    if (op == "iszero" || op == "singular") {
      Element a = first();
      bool verdict = op == "iszero" ? is_zero(a, limits_) : is_singular(a, limits_);
      if (opt_.format == "json") return ordered_json{{op == "iszero" ? "zero" : "singular", verdict}}.dump(2) + "\n";
      if (opt_.format == "csv") return render_csv({{op == "iszero" ? "zero" : "singular"}, {yes_no(verdict)}});
      return std::string(op == "iszero" ? "zero: " : "singular: ") + yes_no(verdict) + "\n";
    }
    Element result(group_);
    if (op == "adjoint") {
      result = adjoint(first());
    } else if (op == "add" || op == "sub" || op == "mult") {
      Element a = first();
      Element b = element(opt_.element2, "-e2");
      result = op == "add" ? add(a, b) : op == "sub" ? subtract(a, b) : multiply(a, b);
    } else {
      throw ParseError("unknown algebra operation '" + op + "'");
    }
    std::string text = format_element(result);
    if (opt_.format == "json") {
      ordered_json terms = ordered_json::array();
      for (const auto& t : result.terms()) {
        terms.push_back({{"coeff", scalar_json(t.coeff)}, {"bisection", format_bisection(group_, t.bisection)}});
      }
      return ordered_json{{"terms", terms}}.dump(2) + "\n";
    }
    if (opt_.format == "csv") {
      std::vector<std::vector<std::string>> rows{{"coeff", "bisection"}};
      for (const auto& t : result.terms()) rows.push_back({to_string(t.coeff), format_bisection(group_, t.bisection)});
      return render_csv(rows);
    }
    return text;
  }

  std::string rep() const {
    Element a = element(opt_.element, "-e");
    Point x = point();
    std::vector<Germ> basis = opt_.basis.empty() ? orbit_basis({a}, x) : germs(opt_.basis, x);
    std::vector<Germ> subgroup = germs(opt_.subgroup, x);
    RepMatrix r = rep_matrix(a, x, basis, subgroup);
    std::vector<std::string> labels;
    for (const auto& g : r.basis) labels.push_back(format_germ(group_, g));
    if (opt_.format == "json") {
      ordered_json j;
      j["point"] = x.to_string();
      j["basis"] = labels;
      std::vector<std::string> h;
      for (const auto& g : r.subgroup) h.push_back(format_germ(group_, g));
      j["subgroup"] = h;
      ordered_json entries = ordered_json::array();
      for (const auto& row : r.entries) {
        ordered_json jr = ordered_json::array();
        for (const auto& s : row) jr.push_back(to_string(s));
        entries.push_back(jr);
      }
      j["entries"] = entries;
      j["closed"] = r.closed;
      return j.dump(2) + "\n";
    }
    std::vector<std::vector<std::string>> rows{{""}};
    rows[0].insert(rows[0].end(), labels.begin(), labels.end());
    for (std::size_t i = 0; i < r.entries.size(); ++i) {
      rows.push_back({labels[i]});
      for (const auto& s : r.entries[i]) rows.back().push_back(to_string(s));
    }
    if (opt_.format == "csv") return render_csv(rows);
    return render_table(rows) + "closed: " + yes_no(r.closed) + "\n";
  }

  std::string wordproblem() const {
    if (opt_.expression.empty()) throw ParseError("missing expression");
    bool identity = group_.is_identity(group_.parse_expression(opt_.expression));
    if (opt_.format == "json") return ordered_json{{"expression", opt_.expression}, {"identity", identity}}.dump(2) + "\n";
    if (opt_.format == "csv") return render_csv({{"expression", "identity"}, {opt_.expression, yes_no(identity)}});
    return "identity: " + yes_no(identity) + "\n";
  }

  std::string minimized() const { return format_machine(minimize(machine_).machine); }

 private:
  Point point() const {
    if (opt_.point.empty()) throw ParseError("missing point (-x)");
    return Point::parse(opt_.point, group_.degree());
  }

  Element element(const std::string& arg, const char* flag) const {
    return parse_element(group_, element_text(arg, flag));
  }

  // ';'-separated bisections, each taken at x.
  std::vector<Germ> germs(const std::string& list, const Point& x) const {
    std::vector<Germ> out;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ';');) {
      auto b = item.find_first_not_of(' ');
      if (b == std::string::npos) continue;
      item = item.substr(b, item.find_last_not_of(' ') - b + 1);
      out.push_back(make_germ(parse_bisection(group_, item), x));
    }
    return out;
  }

  static std::string indent(const std::string& text) {
    std::string out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out += "  " + line + "\n";
    return out;
  }

  static ordered_json certificate_json(const DecayCertificate& c) {
    ordered_json checks = ordered_json::array();
    for (const auto& ch : c.checks) {
      checks.push_back({{"k", ch.k}, {"level", c.p * ch.k}, {"a", ch.boundary_count.str()}, {"bound", ch.bound.str()}});
    }
    return {{"p", c.p},
            {"vacuous", c.vacuous},
            {"holds", c.holds},
            {"max_row_sum", c.max_row_sum.str()},
            {"row_bound", c.row_bound.str()},
            {"contraction", rational_json(c.contraction)},
            {"checks", checks}};
  }

  static std::string certificate_text(const DecayCertificate& c) {
    std::string out = "decay certificate: ";
    if (c.vacuous) return out + "vacuous (identity)\n";
    out += std::string(c.holds ? "holds" : "FAILS") + ", p = " + std::to_string(c.p) +
           ", max a_p = " + c.max_row_sum.str() + " <= d^p - 1 = " + c.row_bound.str() +
           ", contraction " + to_string(c.contraction) + "\n";
    for (const auto& ch : c.checks) {
      out += "  a_" + std::to_string(c.p * ch.k) + " = " + ch.boundary_count.str() + " <= " + ch.bound.str() + "\n";
    }
    return out;
  }

  const Options& opt_;
  Machine machine_;
  AutomatonGroup group_;
  FixMeasures measures_;
  AlgebraLimits limits_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-state self-similar groups: fixed-point measures, germs, convolution algebra, traces"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("-m,--machine", opt.machine, "machine file or bundled name")->capture_default_str();
    sub->add_option("--cap-states", opt.cap_states, "state cap for derived machines")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"table", "csv", "json"}))
        ->capture_default_str();
    sub->add_option("-o,--output", opt.output, "write output to a file");
  };
  auto patterns = [&](CLI::App* sub) {
    sub->add_option("--cap-patterns", opt.cap_patterns, "configuration budget for the zero test")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };

  auto* fix = app.add_subcommand("fixmeasure", "fixed-point counts, exact mu(Fix) and decay certificate");
  common(fix);
  fix->add_option("-s,--state", opt.state, "state or state expression")->required();
  fix->add_option("-K,--depth", opt.depth, "levels of the count table")->capture_default_str();

  auto* ess = app.add_subcommand("essfree", "essential freeness report for every state");
  common(ess);

  auto* haus = app.add_subcommand("hausdorff", "Hausdorff test with witness");
  common(haus);

  auto* dang = app.add_subcommand("dangerous", "is the point a dangerous unit");
  common(dang);
  dang->add_option("-x,--point", opt.point, "eventually periodic point u(v)")->required();

  auto* tr = app.add_subcommand("trace", "canonical and isotropy traces of an element");
  common(tr);
  patterns(tr);
  tr->add_option("-e,--element", opt.element, "element text or file")->required();
  tr->add_option("-x,--point", opt.point, "also evaluate E and F at this point");

  auto* alg = app.add_subcommand("alg", "algebra operations");
  common(alg);
  patterns(alg);
  alg->add_option("op", opt.op, "add | sub | mult | adjoint | iszero | singular")
      ->required()
      ->check(CLI::IsMember({"add", "sub", "mult", "adjoint", "iszero", "singular"}));
  alg->add_option("-e,--element", opt.element, "element text or file");
  alg->add_option("--e1", opt.element1, "first operand");
  alg->add_option("--e2", opt.element2, "second operand");

  auto* rep = app.add_subcommand("rep", "truncated quasi-regular representation matrix");
  common(rep);
  rep->add_option("-e,--element", opt.element, "element text or file")->required();
  rep->add_option("-x,--point", opt.point, "base point")->required();
  rep->add_option("--basis", opt.basis, "';'-separated bisections whose germs at x form the basis (default: orbit)");
  rep->add_option("--subgroup", opt.subgroup, "';'-separated bisections whose germs at x form H");

  auto* wp = app.add_subcommand("wordproblem", "decide whether a state expression is the identity");
  common(wp);
  wp->add_option("expression", opt.expression, "e.g. b*c*d or (a*b)^-1")->required();

  auto* mini = app.add_subcommand("minimize", "print the minimized machine");
  common(mini);

  // CLI11 reads "-e1" as the short flag -e with value "1", so the single-dash
  // spellings are rewritten to the long options before parsing.
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "-e1") a = "--e1";
    if (a == "-e2") a = "--e2";
    args.push_back(a);
  }
  std::reverse(args.begin(), args.end());

  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  try {
    Session session(opt);
    std::string out;
    if (*fix) out = session.fixmeasure();
    else if (*ess) out = session.essfree();
    else if (*haus) out = session.hausdorff();
    else if (*dang) out = session.dangerous();
    else if (*tr) out = session.trace();
    else if (*alg) out = session.alg();
    else if (*rep) out = session.rep();
    else if (*wp) out = session.wordproblem();
    else if (*mini) out = session.minimized();

    if (opt.output.empty()) {
      std::cout << out;
    } else {
      std::ofstream file(opt.output, std::ios::binary);
      if (!file) throw DomainError("cannot write '" + opt.output + "'");
      file << out;
    }
    return kOk;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << " (raise --cap-states or --cap-patterns)\n";
    return kCap;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
