#include "selfsim/mealy.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <unordered_map>

#include "selfsim/errors.hpp"

namespace selfsim {

bool is_identity_perm(const Perm& p) {
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] != x) return false;
  }
  return true;
}

Perm inverse_perm(const Perm& p) {
  Perm inv(p.size());
  for (std::size_t x = 0; x < p.size(); ++x) inv[p[x]] = static_cast<Letter>(x);
  return inv;
}

Machine::Machine(std::size_t degree, std::vector<MachineState> states)
    : degree_(degree), states_(std::move(states)) {
  if (degree_ < 2 || degree_ > kMaxDegree) {
    throw DomainError("alphabet size must be between 2 and " + std::to_string(kMaxDegree));
  }
  for (const auto& s : states_) {
    if (s.perm.size() != degree_ || s.next.size() != degree_) {
      throw DomainError("state '" + s.name + "' does not have one entry per letter");
    }
    std::vector<bool> seen(degree_, false);
    for (Letter y : s.perm) {
      if (y >= degree_ || seen[y]) throw DomainError("output of state '" + s.name + "' is not a permutation");
      seen[y] = true;
    }
    for (std::size_t t : s.next) {
      if (t >= states_.size()) throw DomainError("state '" + s.name + "' has a transition out of range");
    }
  }
  for (std::size_t q = 0; q < states_.size(); ++q) {
    const auto& s = states_[q];
    bool loops = std::all_of(s.next.begin(), s.next.end(), [q](std::size_t t) { return t == q; });
    bool structural = loops && is_identity_perm(s.perm);
    if (s.name == "e" && !structural) throw DomainError("state 'e' is reserved for the identity");
    if (structural && (!identity_ || s.name == "e")) identity_ = q;
  }
}

std::optional<std::size_t> Machine::find(std::string_view name) const {
  for (std::size_t q = 0; q < states_.size(); ++q) {
    if (states_[q].name == name) return q;
  }
  return std::nullopt;
}

Word Machine::apply(std::size_t q, const Word& w) const {
  Word out;
  out.reserve(w.size());
  for (Letter x : w) {
    out.push_back(image(q, x));
    q = next(q, x);
  }
  return out;
}

std::size_t Machine::restrict(std::size_t q, const Word& w) const {
  for (Letter x : w) q = next(q, x);
  return q;
}

namespace {

bool valid_name(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::size_t parse_count(const std::string& token, int line) {
  if (token.empty() || !std::all_of(token.begin(), token.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw ParseError("line " + std::to_string(line) + ": expected a number, got '" + token + "'");
  }
  return std::stoul(token);
}

}  // namespace

Machine parse_machine(std::string_view text) {
  struct RawState {
    std::string name;
    Perm perm;
    std::vector<std::string> next;
    int line;
  };
  std::optional<std::size_t> degree;
  std::vector<RawState> raw;
  std::unordered_map<std::string, std::size_t> index;

  std::istringstream in{std::string(text)};
  std::string line_text;
  int line = 0;
  while (std::getline(in, line_text)) {
    ++line;
    if (auto hash = line_text.find('#'); hash != std::string::npos) line_text.erase(hash);
    std::istringstream ls(line_text);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    auto fail = [&](const std::string& what) {
      throw ParseError("line " + std::to_string(line) + ": " + what);
    };
    if (tok[0] == "alphabet") {
      if (tok.size() != 2) fail("expected 'alphabet <d>'");
      if (degree) fail("duplicate alphabet directive");
      degree = parse_count(tok[1], line);
      if (*degree < 2 || *degree > kMaxDegree) fail("alphabet size must be between 2 and 36");
    } else if (tok[0] == "state") {
      if (!degree) fail("state before alphabet directive");
      std::size_t d = *degree;
      if (tok.size() != 2 * d + 4 || tok[2] != "perm" || tok[3 + d] != "to") {
        fail("expected 'state <name> perm <" + std::to_string(d) + " images> to <" + std::to_string(d) +
             " states>'");
      }
      if (!valid_name(tok[1])) fail("invalid state name '" + tok[1] + "'");
      if (index.count(tok[1])) fail("duplicate state '" + tok[1] + "'");
      RawState s{tok[1], {}, {}, line};
      std::vector<bool> seen(d, false);
      for (std::size_t x = 0; x < d; ++x) {
        std::size_t y = parse_count(tok[3 + x], line);
        if (y >= d) fail("image " + tok[3 + x] + " out of range");
        if (seen[y]) fail("output of state '" + s.name + "' is not a permutation");
        seen[y] = true;
        s.perm.push_back(static_cast<Letter>(y));
      }
      s.next.assign(tok.begin() + static_cast<long>(4 + d), tok.end());
      index.emplace(s.name, raw.size());
      raw.push_back(std::move(s));
    } else {
      fail("unknown directive '" + tok[0] + "'");
    }
  }
  if (!degree) throw ParseError("missing alphabet directive");
  std::size_t d = *degree;
  if (!index.count("e")) {
    Perm id(d);
    for (std::size_t x = 0; x < d; ++x) id[x] = static_cast<Letter>(x);
    index.emplace("e", raw.size());
    raw.push_back({"e", id, std::vector<std::string>(d, "e"), 0});
  }
  std::vector<MachineState> states;
  states.reserve(raw.size());
  for (const auto& s : raw) {
    MachineState st{s.name, s.perm, {}};
    for (const auto& t : s.next) {
      auto it = index.find(t);
      if (it == index.end()) {
        throw ParseError("line " + std::to_string(s.line) + ": unknown state '" + t + "'");
      }
      st.next.push_back(it->second);
    }
    states.push_back(std::move(st));
  }
  try {
    return Machine(d, std::move(states));
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
}

std::string format_machine(const Machine& m) {
  std::ostringstream out;
  out << "alphabet " << m.degree() << "\n";
  for (const auto& s : m.states()) {
    out << "state " << s.name << " perm";
    for (Letter y : s.perm) out << ' ' << static_cast<int>(y);
    out << " to";
    for (std::size_t t : s.next) out << ' ' << m.state(t).name;
    out << "\n";
  }
  return out.str();
}

Minimized minimize(const Machine& m) {
  const std::size_t n = m.size();
  const std::size_t d = m.degree();
  std::vector<std::size_t> cls(n);
  std::size_t count = 0;
  {
    std::map<Perm, std::size_t> ids;
    for (std::size_t q = 0; q < n; ++q) {
      auto [it, fresh] = ids.emplace(m.state(q).perm, ids.size());
      cls[q] = it->second;
    }
    count = ids.size();
  }
  while (true) {
    std::map<std::vector<std::size_t>, std::size_t> ids;
    std::vector<std::size_t> refined(n);
    for (std::size_t q = 0; q < n; ++q) {
      std::vector<std::size_t> sig;
      sig.reserve(d + 1);
      sig.push_back(cls[q]);
      for (Letter x = 0; x < d; ++x) sig.push_back(cls[m.next(q, x)]);
      auto [it, fresh] = ids.emplace(std::move(sig), ids.size());
      refined[q] = it->second;
    }
    cls = std::move(refined);
    if (ids.size() == count) break;
    count = ids.size();
  }

  // Renumber by first occurrence.
  std::vector<std::size_t> renumber(count, count);
  std::vector<std::size_t> rep;
  std::vector<std::size_t> mapping(n);
  for (std::size_t q = 0; q < n; ++q) {
    if (renumber[cls[q]] == count) {
      renumber[cls[q]] = rep.size();
      rep.push_back(q);
    }
    mapping[q] = renumber[cls[q]];
  }
  std::vector<MachineState> states;
  states.reserve(rep.size());
  for (std::size_t q : rep) {
    MachineState s{m.state(q).name, m.state(q).perm, {}};
    for (Letter x = 0; x < d; ++x) s.next.push_back(mapping[m.next(q, x)]);
    states.push_back(std::move(s));
  }
  // The identity class keeps the reserved name.
  if (auto e = m.find("e")) states[mapping[*e]].name = "e";
  return {Machine(d, std::move(states)), std::move(mapping)};
}

std::vector<std::optional<std::size_t>> moving_depths(const Machine& m) {
  std::vector<std::optional<std::size_t>> depth(m.size());
  for (std::size_t q = 0; q < m.size(); ++q) {
    if (!is_identity_perm(m.state(q).perm)) depth[q] = 1;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t q = 0; q < m.size(); ++q) {
      if (depth[q] == 1u) continue;
      std::optional<std::size_t> best;
      for (Letter x = 0; x < m.degree(); ++x) {
        if (auto c = depth[m.next(q, x)]; c && (!best || *c + 1 < *best)) best = *c + 1;
      }
      if (best && (!depth[q] || *best < *depth[q])) {
        depth[q] = best;
        changed = true;
      }
    }
  }
  return depth;
}

std::size_t distinguishing_depth(const Machine& m) {
  std::size_t p = 1;
  for (const auto& dq : moving_depths(m)) {
    if (dq) p = std::max(p, *dq);
  }
  return p;
}

}  // namespace selfsim
