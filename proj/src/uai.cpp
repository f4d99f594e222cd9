#include "lsb/uai.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace lsb {

namespace {

struct Token {
  std::string text;
  int line;
};

class TokenStream {
 public:
  explicit TokenStream(const std::string& text) {
    int line = 1;
    std::string cur;
    int cur_line = 1;
    auto flush = [&] {
      if (!cur.empty()) {
        tokens_.push_back({cur, cur_line});
        cur.clear();
      }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
      char c = text[i];
      if (c == '#') {
        flush();
        while (i < text.size() && text[i] != '\n') ++i;
        ++line;
        continue;
      }
      if (c == '\n') {
        flush();
        ++line;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        flush();
        continue;
      }
      if (cur.empty()) cur_line = line;
      cur.push_back(c);
    }
    flush();
    last_line_ = line;
  }

  bool done() const { return pos_ >= tokens_.size(); }

  const Token& next(const std::string& what) {
    if (done()) throw ParseError("unexpected end of file while reading " + what, last_line_);
    const Token& t = tokens_[pos_++];
    cur_line_ = t.line;
    return t;
  }

  int cur_line() const { return cur_line_; }

  long long next_int(const std::string& what) {
    const Token& t = next(what);
    long long value = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc() || p != t.text.data() + t.text.size())
      throw ParseError("expected integer for " + what + ", got '" + t.text + "'", t.line);
    return value;
  }

  double next_double(const std::string& what) {
    const Token& t = next(what);
    try {
      std::size_t consumed = 0;
      double value = std::stod(t.text, &consumed);
      if (consumed != t.text.size()) throw std::invalid_argument(t.text);
      return value;
    } catch (const std::exception&) {
      throw ParseError("expected number for " + what + ", got '" + t.text + "'", t.line);
    }
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int last_line_ = 1;
  int cur_line_ = 1;
};

}  // namespace

FactorGraphModel parse_uai_text(const std::string& text, const std::string& source) {
  TokenStream ts(text);

  const Token& type_tok = ts.next("network type");
  NetworkType type;
  if (type_tok.text == "MARKOV") {
    type = NetworkType::Markov;
  } else if (type_tok.text == "BAYES") {
    type = NetworkType::Bayes;
  } else {
    throw ParseError("unknown network type '" + type_tok.text + "'", type_tok.line);
  }

  const long long nvars = ts.next_int("variable count");
  if (nvars < 1) throw ParseError("variable count must be positive", ts.cur_line());

  std::vector<int> cards(nvars);
  for (long long v = 0; v < nvars; ++v) {
    long long card = ts.next_int("cardinality of variable " + std::to_string(v));
    if (card < 1) throw ParseError("cardinality must be >= 1 for variable " + std::to_string(v), ts.cur_line());
    cards[v] = static_cast<int>(card);
  }

  const long long nfactors = ts.next_int("factor count");
  if (nfactors < 0) throw ParseError("factor count must be nonnegative", ts.cur_line());

  std::vector<Factor> factors(nfactors);
  for (long long f = 0; f < nfactors; ++f) {
    const std::string fname = "factor " + std::to_string(f);
    long long scope_size = ts.next_int("scope size of " + fname);
    if (scope_size < 1) throw ParseError("scope of " + fname + " must be nonempty", ts.cur_line());
    factors[f].scope.resize(scope_size);
    for (long long k = 0; k < scope_size; ++k) {
      long long var = ts.next_int("scope variable of " + fname);
      if (var < 0 || var >= nvars)
        throw ParseError("scope of " + fname + " references unknown variable " +
                             std::to_string(var),
                         ts.cur_line());
      factors[f].scope[k] = static_cast<int>(var);
    }
  }

  for (long long f = 0; f < nfactors; ++f) {
    const std::string fname = "factor " + std::to_string(f);
    std::size_t joint = 1;
    for (int v : factors[f].scope) joint *= static_cast<std::size_t>(cards[v]);

    long long table_size = ts.next_int("table size of " + fname);
    if (table_size != static_cast<long long>(joint))
      throw ParseError("table of " + fname + " has " + std::to_string(table_size) +
                           " entries, scope requires " + std::to_string(joint),
                       ts.cur_line());
    factors[f].log_table.resize(joint);
    for (std::size_t k = 0; k < joint; ++k) {
      double p = ts.next_double("table entry of " + fname);
      if (p < 0.0 || std::isnan(p))
        throw ParseError("table entry of " + fname + " must be a nonnegative probability", ts.cur_line());
      factors[f].log_table[k] = p == 0.0 ? kNegInf : std::log(p);
    }
  }

  return FactorGraphModel(std::move(cards), std::move(factors), type, source);
}

FactorGraphModel parse_uai(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open UAI file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_uai_text(buf.str(), path);
}

void serialize_uai(const FactorGraphModel& model, std::ostream& out) {
  out << (model.type() == NetworkType::Bayes ? "BAYES" : "MARKOV") << "\n";
  out << model.num_vars() << "\n";
  for (int v = 0; v < model.num_vars(); ++v) {
    out << model.cardinality(v) << (v + 1 == model.num_vars() ? "\n" : " ");
  }
  out << model.factors().size() << "\n";
  char buf[64];
  for (const Factor& f : model.factors()) {
    out << f.scope.size();
    for (int v : f.scope) out << ' ' << v;
    out << "\n";
  }
  for (const Factor& f : model.factors()) {
    out << "\n" << f.log_table.size() << "\n";
    for (std::size_t k = 0; k < f.log_table.size(); ++k) {
      double p = f.log_table[k] == kNegInf ? 0.0 : std::exp(f.log_table[k]);
      std::snprintf(buf, sizeof buf, "%.17g", p);
      out << buf << (k + 1 == f.log_table.size() ? "\n" : " ");
    }
  }
}

std::string serialize_uai(const FactorGraphModel& model) {
  std::ostringstream out;
  serialize_uai(model, out);
  return out.str();
}

}  // namespace lsb
