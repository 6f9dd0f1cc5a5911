#include "crn/netdsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "crn/error.hpp"

namespace crn {

namespace {

bool is_name_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}

bool is_name_char(char c) { return is_name_start(c) || (c >= '0' && c <= '9') || c == '\''; }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Cursor over a single line; columns are 1-based.
class Cursor {
 public:
  Cursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }
  bool done() {
    skip_space();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view token) {
    if (!accept(token)) fail("expected '" + std::string(token) + "'");
  }
  std::size_t column() {
    skip_space();
    return pos_ + 1;
  }

  [[noreturn]] void fail(const std::string& message) { throw ParseError(line_, column(), message); }
  [[noreturn]] void fail_at(std::size_t column, const std::string& message) const {
    throw ParseError(line_, column, message);
  }

  std::string name() {
    skip_space();
    if (pos_ >= text_.size() || !is_name_start(text_[pos_])) fail("expected a species name");
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::optional<int> integer() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    if (pos_ == start) return std::nullopt;
    int value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) fail_at(start + 1, "integer out of range");
    return value;
  }

  double number() {
    skip_space();
    std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
            text_[pos_] == 'e' || text_[pos_] == 'E' ||
            ((text_[pos_] == '+' || text_[pos_] == '-') && (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E')))) {
      ++pos_;
    }
    const char* first = text_.data() + start;
    if (pos_ < text_.size() && *first == '+') ++first;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, text_.data() + pos_, value);
    if (pos_ == start || ec != std::errc() || ptr != text_.data() + pos_) {
      fail_at(start + 1, "expected a number");
    }
    if (!std::isfinite(value)) fail_at(start + 1, "number is not finite");
    return value;
  }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

struct Term {
  std::string name;
  int coef;
  std::size_t column;
};

struct PendingReaction {
  std::vector<Term> lhs, rhs;
  bool reversible;
  double kf, kr;
  std::size_t line, column;
};

std::vector<Term> parse_side(Cursor& cur) {
  std::vector<Term> terms;
  if (cur.peek() == '0') {
    std::size_t col = cur.column();
    auto zero = cur.integer();
    if (*zero != 0) cur.fail_at(col, "side must be '0' or a sum of species terms");
    if (is_name_start(cur.peek())) cur.fail_at(col, "coefficient must be positive");
    return terms;
  }
  for (;;) {
    std::size_t col = cur.column();
    auto coef = cur.integer();
    if (coef && *coef <= 0) cur.fail_at(col, "coefficient must be positive");
    std::string name = cur.name();
    terms.push_back({std::move(name), coef.value_or(1), col});
    if (!cur.accept("+")) break;
  }
  return terms;
}

std::map<std::string, double> parse_rates(Cursor& cur) {
  std::map<std::string, double> out;
  for (;;) {
    std::size_t col = cur.column();
    std::string key = cur.name();
    cur.expect("=");
    double value = cur.number();
    if (!out.emplace(key, value).second) cur.fail_at(col, "rate '" + key + "' given twice");
    if (!(value > 0.0)) cur.fail_at(col, "rate '" + key + "' must be positive");
    if (!cur.accept(",")) break;
  }
  return out;
}

std::string strip_comment(std::string_view line) {
  auto hash = line.find('#');
  return std::string(hash == std::string_view::npos ? line : line.substr(0, hash));
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

NetworkDocument parse_network(std::string_view text) {
  std::vector<std::string> species;
  std::unordered_map<std::string, std::size_t> index;
  bool declared = false;
  std::size_t declared_line = 0;
  std::vector<PendingReaction> pending;
  std::optional<std::pair<std::string, std::pair<std::size_t, std::size_t>>> signal, product;
  std::vector<std::tuple<std::string, double, std::size_t, std::size_t>> init;
  bool has_init = false;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string line = strip_comment(text.substr(start, end - start));
    start = end + 1;

    Cursor cur(line, line_no);
    if (cur.done()) continue;

    if (cur.accept("species:")) {
      if (declared) cur.fail("species declared twice");
      if (!pending.empty()) cur.fail("species must be declared before any reaction");
      declared = true;
      declared_line = line_no;
      while (!cur.done()) {
        std::size_t col = cur.column();
        std::string name = cur.name();
        if (!index.emplace(name, species.size()).second) cur.fail_at(col, "duplicate species '" + name + "'");
        species.push_back(std::move(name));
        cur.accept(",");
      }
      if (species.empty()) cur.fail("empty species list");
      continue;
    }
    const bool is_signal = cur.accept("signal:");
    if (is_signal || cur.accept("product:")) {
      auto& slot = is_signal ? signal : product;
      if (slot) cur.fail(std::string(is_signal ? "signal" : "product") + " given twice");
      std::size_t col = cur.column();
      std::string name = cur.name();
      if (!cur.done()) cur.fail("unexpected trailing input");
      slot.emplace(std::move(name), std::make_pair(line_no, col));
      continue;
    }
    if (cur.accept("init:")) {
      if (has_init) cur.fail("init given twice");
      has_init = true;
      while (!cur.done()) {
        std::size_t col = cur.column();
        std::string name = cur.name();
        cur.expect("=");
        double value = cur.number();
        if (value < 0.0) cur.fail_at(col, "initial value for '" + name + "' is negative");
        init.emplace_back(std::move(name), value, line_no, col);
        if (!cur.accept(",")) break;
      }
      if (!cur.done()) cur.fail("unexpected trailing input");
      continue;
    }

    PendingReaction rx{};
    rx.line = line_no;
    rx.column = cur.column();
    rx.lhs = parse_side(cur);
    if (cur.accept("<->")) {
      rx.reversible = true;
    } else if (cur.accept("->")) {
      rx.reversible = false;
    } else {
      cur.fail("expected '->' or '<->'");
    }
    rx.rhs = parse_side(cur);
    std::size_t at_col = cur.column();
    cur.expect("@");
    auto rates = parse_rates(cur);
    if (!cur.done()) cur.fail("unexpected trailing input");
    auto take = [&](const char* key) {
      auto it = rates.find(key);
      if (it == rates.end()) cur.fail_at(at_col, std::string("missing rate '") + key + "'");
      double v = it->second;
      rates.erase(it);
      return v;
    };
    if (rx.reversible) {
      rx.kf = take("kf");
      rx.kr = take("kr");
    } else {
      rx.kf = take("k");
    }
    if (!rates.empty()) cur.fail_at(at_col, "unknown rate '" + rates.begin()->first + "'");
    if (rx.lhs.empty() && rx.rhs.empty()) cur.fail_at(rx.column, "both sides are empty");

    for (const auto* side : {&rx.lhs, &rx.rhs}) {
      for (const auto& t : *side) {
        if (!index.count(t.name)) {
          if (declared) cur.fail_at(t.column, "undeclared species '" + t.name + "'");
          index.emplace(t.name, species.size());
          species.push_back(t.name);
        }
      }
    }
    pending.push_back(std::move(rx));
  }

  if (pending.empty()) throw ParseError(line_no, 1, "no reactions");

  const std::size_t n = species.size();
  std::vector<Reaction> reactions;
  RateFunction rates;
  std::map<Stoich, std::size_t> seen;
  std::vector<bool> used(n, false);
  for (const auto& rx : pending) {
    Stoich s(n, 0);
    std::vector<int> lhs_coef(n, 0), rhs_coef(n, 0);
    for (const auto& t : rx.lhs) lhs_coef[index.at(t.name)] += t.coef;
    for (const auto& t : rx.rhs) {
      std::size_t i = index.at(t.name);
      if (lhs_coef[i] != 0) throw ParseError(rx.line, t.column, "species '" + t.name + "' on both sides");
      rhs_coef[i] += t.coef;
    }
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = rhs_coef[i] - lhs_coef[i];
      if (s[i] != 0) used[i] = true;
    }
    auto add = [&](Stoich v, double k) {
      if (!seen.emplace(v, reactions.size()).second) throw ParseError(rx.line, rx.column, "duplicate reaction");
      reactions.emplace_back(std::move(v));
      rates.push_back(k);
    };
    Stoich rev(n);
    std::transform(s.begin(), s.end(), rev.begin(), [](int v) { return -v; });
    add(s, rx.kf);
    if (rx.reversible) add(std::move(rev), rx.kr);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!used[i]) throw ParseError(declared_line, 1, "species '" + species[i] + "' takes part in no reaction");
  }

  auto resolve = [&](const auto& slot) -> std::optional<std::size_t> {
    if (!slot) return std::nullopt;
    auto it = index.find(slot->first);
    if (it == index.end()) {
      throw ParseError(slot->second.first, slot->second.second, "unknown species '" + slot->first + "'");
    }
    return it->second;
  };

  std::optional<std::vector<double>> initial;
  if (has_init) {
    initial.emplace(n, 0.0);
    std::vector<bool> given(n, false);
    for (const auto& [name, value, line, col] : init) {
      auto it = index.find(name);
      if (it == index.end()) throw ParseError(line, col, "unknown species '" + name + "'");
      if (given[it->second]) throw ParseError(line, col, "initial value for '" + name + "' given twice");
      given[it->second] = true;
      (*initial)[it->second] = value;
    }
  }

  try {
    NetworkDocument doc{KineticSystem(ReactionNetwork(species, std::move(reactions)), std::move(rates)),
                        resolve(signal), resolve(product), std::move(initial)};
    return doc;
  } catch (const InvalidNetwork& e) {
    throw ParseError(line_no, 1, e.what());
  }
}

NetworkDocument parse_network_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidNetwork("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_network(buf.str());
}

std::string serialize_network(const NetworkDocument& doc) {
  const auto& net = doc.system.network();
  std::ostringstream out;
  out << "species:";
  for (std::size_t i = 0; i < net.num_species(); ++i) out << (i ? ", " : " ") << net.species_name(i);
  out << '\n';

  auto side = [&](const Reaction& R, int sign) {
    std::string s;
    for (std::size_t i = 0; i < R.size(); ++i) {
      int c = sign * R[i];
      if (c <= 0) continue;
      if (!s.empty()) s += " + ";
      if (c != 1) s += std::to_string(c) + " ";
      s += net.species_name(i);
    }
    return s.empty() ? std::string("0") : s;
  };

  std::vector<bool> emitted(net.num_reactions(), false);
  for (std::size_t r = 0; r < net.num_reactions(); ++r) {
    if (emitted[r]) continue;
    emitted[r] = true;
    const auto& R = net.reaction(r);
    out << side(R, -1);
    if (auto rev = net.reverse_of(r)) {
      emitted[*rev] = true;
      out << " <-> " << side(R, 1) << " @ kf=" << format_double(doc.system.rate(r))
          << ", kr=" << format_double(doc.system.rate(*rev)) << '\n';
    } else {
      out << " -> " << side(R, 1) << " @ k=" << format_double(doc.system.rate(r)) << '\n';
    }
  }

  if (doc.signal) out << "signal: " << net.species_name(*doc.signal) << '\n';
  if (doc.product) out << "product: " << net.species_name(*doc.product) << '\n';
  if (doc.initial_state) {
    out << "init:";
    for (std::size_t i = 0; i < net.num_species(); ++i) {
      out << (i ? ", " : " ") << net.species_name(i) << '=' << format_double((*doc.initial_state)[i]);
    }
    out << '\n';
  }
  return out.str();
}

bool equivalent(const NetworkDocument& a, const NetworkDocument& b) {
  const auto& na = a.system.network();
  const auto& nb = b.system.network();
  if (na.species() != nb.species() || na.num_reactions() != nb.num_reactions()) return false;
  std::map<Stoich, double> ra;
  for (std::size_t r = 0; r < na.num_reactions(); ++r) ra.emplace(na.reaction(r).stoich(), a.system.rate(r));
  for (std::size_t r = 0; r < nb.num_reactions(); ++r) {
    auto it = ra.find(nb.reaction(r).stoich());
    if (it == ra.end() || it->second != b.system.rate(r)) return false;
  }
  return a.signal == b.signal && a.product == b.product && a.initial_state == b.initial_state;
}

}  // namespace crn
